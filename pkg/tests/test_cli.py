import subprocess
import sys

import numpy as np
import pytest

from pentrans.cli import _exit_code, main
from pentrans.rips import distance_matrix_from_points, write_matrix
from pentrans.sweep import SweepError


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_pe_single_bar(workdir, capsys):
    (workdir / "d.csv").write_text("degree,birth,death\n0,0.0,1.0\n")
    assert main(["pe", "--diagram", "d.csv"]) == 0
    assert capsys.readouterr().out.strip() == "0.0"


def test_pe_options(workdir, capsys):
    (workdir / "d.csv").write_text("degree,birth,death\n0,0,1\n0,0,3\n1,0,inf\n")
    assert main(["pe", "--diagram", "d.csv", "--degree", "0"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.562335, abs=1e-6)
    assert main(["pe", "--diagram", "d.csv", "--degree", "0", "--normalized"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.811278, abs=1e-6)
    assert main(["pe", "--diagram", "d.csv"]) == 1
    assert main(["pe", "--diagram", "d.csv", "--degree", "1"]) == 2
    assert "--cap" in capsys.readouterr().err
    assert main(["pe", "--diagram", "d.csv", "--degree", "1", "--cap", "2"]) == 0


def test_pe_from_points(workdir, capsys):
    write_matrix(workdir / "p.csv", np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))
    assert main(["pe", "--points", "p.csv", "--degree", "1"]) == 0
    assert capsys.readouterr().out.strip() == "0.0"


def test_bottleneck(workdir, capsys):
    (workdir / "a.csv").write_text("degree,birth,death\n0,0,1\n")
    (workdir / "b.csv").write_text("degree,birth,death\n0,0,1.5\n")
    assert main(["bottleneck", "a.csv", "b.csv"]) == 0
    assert float(capsys.readouterr().out) == 0.5


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "usage" in capsys.readouterr().out
    assert main(["sweep", "--help"]) == 0


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["pe"]) == 1


def test_missing_config_names_file(workdir, capsys):
    assert main(["sweep", "kuramoto", "--config", "missing.cfg", "--out", "o"]) == 2
    assert "missing.cfg" in capsys.readouterr().err


def test_invalid_config(workdir, capsys):
    (workdir / "c.cfg").write_text("[kuramoto]\nspeed = 3\n")
    assert main(["sweep", "kuramoto", "--config", "c.cfg", "--out", "o"]) == 2
    assert "speed" in capsys.readouterr().err


def wrapped(cause):
    try:
        raise SweepError("kuramoto: lambda=1.0, r=0") from cause
    except SweepError as exc:
        return exc


def test_exit_code_mapping():
    assert _exit_code(FloatingPointError("overflow")) == 3
    assert _exit_code(wrapped(ZeroDivisionError())) == 3
    assert _exit_code(wrapped(ValueError("bad matrix"))) == 2
    assert _exit_code(SweepError("no samples")) == 2
    assert _exit_code(FileNotFoundError("x")) == 2


def test_simulate_and_sweep_and_plot(workdir, capsys):
    assert main(["simulate", "kuramoto", "--out", "k", "--n", "5", "--t-max", "0.2"]) == 0
    assert (workdir / "k" / "r.csv").read_text().startswith("t,r\n")
    assert main(["simulate", "vicsek", "--out", "v", "--n", "10", "--steps", "3"]) == 0
    assert len((workdir / "v" / "psi.csv").read_text().splitlines()) == 5
    (workdir / "c.cfg").write_text("[kuramoto]\nn = 8\nk_grid = 0, 4\nrealizations = 2\nt_max = 2\n"
                                   "[detector]\nwindow = 0.5\n")
    assert main(["sweep", "kuramoto", "--config", "c.cfg", "--out", "s"]) == 0
    assert (workdir / "s" / "estimate.txt").exists()
    assert main(["plot", "probability", "s", "--out", "p.svg"]) == 0
    assert main(["plot", "band", "s/series/4.0_0.csv", "s/series/4.0_1.csv", "--out", "b.svg"]) == 0
    assert main(["plot", "line", "s/observables/0.0_0.csv", "--out", "l.svg"]) == 0
    assert (workdir / "p.svg").read_text().startswith("<svg")
    assert main(["plot", "line", "--out", "x.svg"]) == 1
    assert main(["plot", "line", "nope.csv", "--out", "x.svg"]) == 2


def make_manifest(root):
    rng = np.random.default_rng(0)
    rows = ["file,control,run,step,kind"]
    for lam in (0.5, 1.0):
        for t in range(4):
            name = f"m_{lam}_{t}.csv"
            write_matrix(root / name, distance_matrix_from_points(rng.normal(size=(6, 2)) * lam))
            rows.append(f"{name},{lam},0,{t},distances")
    (root / "manifest.csv").write_text("\n".join(rows) + "\n")


def test_bin_and_external_sweep(workdir):
    (workdir / "data").mkdir()
    make_manifest(workdir / "data")
    assert main(["bin", "--manifest", "data", "--bins", "2", "--out", "binned"]) == 0
    lines = (workdir / "binned" / "binned_pe.csv").read_text().splitlines()
    assert lines[0] == "bin_lo,bin_hi,count,mean_pe,ci95" and len(lines) == 3
    (workdir / "det.cfg").write_text("[detector]\nwindow = 1\ntolerance = 10\n")
    assert main(["sweep", "external", "--manifest", "data", "--config", "det.cfg", "--out", "ext"]) == 0
    assert (workdir / "ext" / "p_lambda.csv").read_text() == "lambda,p\n0.5,1.0\n1.0,1.0\n"
    assert main(["sweep", "external", "--out", "ext"]) == 1
    (workdir / "pairs.csv").write_text("control,pe\n0.1,1\n0.2,2\n")
    assert main(["bin", "--pairs", "pairs.csv", "--bins", "5", "--scheme", "quantile", "--out", "q.csv"]) == 2


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "pentrans", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "simulate" in out.stdout
