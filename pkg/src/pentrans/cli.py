"""Command line entry point.

Exit status: 0 success, 1 usage error, 2 invalid input (bad file, config or
value), 3 numerical failure. ``PENTRANS_LOG`` sets the log level (default
WARNING) and changes nothing else.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import ingest as ing
from . import kuramoto, plotting, vicsek
from .config import ConfigError, load_config, load_detector
from .diagram import (
    DiagramError,
    PersistenceDiagram,
    finitize,
    normalized_persistent_entropy,
    persistent_entropy,
    read_diagrams,
    truncate_lifetimes,
)
from .metrics import bottleneck
from .rips import distance_matrix_from_points, read_distance_matrix, read_point_cloud, vr_persistence
from .sweep import (
    Detector,
    ExternalSweep,
    KuramotoSweep,
    SweepError,
    VicsekSweep,
    read_estimate,
    read_p_lambda,
    read_series,
    run_sweep,
    write_sweep,
)

log = logging.getLogger("pentrans")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x: float) -> str:
    return repr(float(x))


# -- pe / bottleneck --------------------------------------------------------

def _diagram_from_args(args):
    if args.diagram:
        dgms = read_diagrams(args.diagram)
        if args.degree is None:
            if len(dgms) != 1:
                raise UsageError(f"{args.diagram} holds degrees {sorted(dgms)}; pick one with --degree")
            return next(iter(dgms.values())), None
        if args.degree not in dgms:
            raise DiagramError(f"{args.diagram}: no bars of degree {args.degree}")
        return dgms[args.degree], None
    d = read_distance_matrix(args.distances) if args.distances else distance_matrix_from_points(read_point_cloud(args.points))
    degree = 0 if args.degree is None else args.degree
    return vr_persistence(d, max_degree=1)[degree], float(d.max())


def cmd_pe(args) -> int:
    dgm, default_cap = _diagram_from_args(args)
    cap = args.cap if args.cap is not None else default_cap
    if dgm.has_infinite:
        if cap is None:
            raise DiagramError("diagram has infinite bars; pass --cap")
        dgm = finitize(dgm, cap)
    dgm = truncate_lifetimes(dgm, args.tau)
    value = normalized_persistent_entropy(dgm) if args.normalized else persistent_entropy(dgm)
    print(_fmt(value))
    return EXIT_OK


def _single(path, degree):
    dgms = read_diagrams(path)
    if degree is None:
        if len(dgms) > 1:
            raise UsageError(f"{path} holds degrees {sorted(dgms)}; pick one with --degree")
        if not dgms:
            raise DiagramError(f"{path}: no bars; pass --degree")
        return next(iter(dgms.values()))
    return dgms.get(degree, PersistenceDiagram(degree, []))


def cmd_bottleneck(args) -> int:
    a, b = _single(args.a, args.degree), _single(args.b, args.degree)
    if args.cap is not None:
        a, b = finitize(a, args.cap), finitize(b, args.cap)
    print(_fmt(bottleneck(a, b)))
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

def _write_rows(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.model == "kuramoto":
        cfg = kuramoto.KuramotoConfig.random(args.n or 50, args.coupling, args.seed, args.edge_prob,
                                             args.t_max, args.dt)
        traj = kuramoto.integrate(cfg)
        _write_rows(out / "r.csv", "t,r", zip(traj.times, traj.r))
        _write_rows(out / "phases.csv", "t," + ",".join(f"theta{i}" for i in range(cfg.n)),
                    (np.concatenate([[t], row]) for t, row in zip(traj.times, traj.wrapped_phases)))
    else:
        kw = dict(eta=args.eta, seed=args.seed)
        for key in ("n", "box", "v0", "r_int", "steps", "noise_span", "update"):
            if getattr(args, key) is not None:
                kw[key] = getattr(args, key)
        traj = vicsek.simulate(vicsek.VicsekConfig(**kw))
        _write_rows(out / "psi.csv", "t,psi", zip(traj.times, traj.psi))
        n = traj.orientations.shape[1]
        _write_rows(out / "orientations.csv", "t," + ",".join(f"theta{i}" for i in range(n)),
                    (np.concatenate([[t], row]) for t, row in zip(traj.times, traj.orientations)))
    print(out)
    return EXIT_OK


# -- sweep --------------------------------------------------------------------

def external_sweep(samples, direction: str, detector: Detector) -> ExternalSweep:
    """Group ingested samples by (control, run); each group is one realization over steps."""
    groups: dict = {}
    for s in samples:
        groups.setdefault((s.control, s.run), []).append((float(s.step), s.distances()))
    for items in groups.values():
        items.sort(key=lambda x: x[0])
    grid = tuple(sorted({lam for lam, _ in groups}))
    return ExternalSweep(groups, grid, direction, detector)


def cmd_sweep(args) -> int:
    if args.model == "external":
        if not args.manifest:
            raise UsageError("sweep external needs --manifest")
        det = load_detector(args.config) if args.config else Detector()
        cfg = external_sweep(ing.ingest(args.manifest), args.direction, det)
    else:
        if args.config:
            cfg = load_config(args.config, args.model)
        else:
            cfg = KuramotoSweep() if args.model == "kuramoto" else VicsekSweep()
    result = run_sweep(cfg, workers=args.workers)
    out = write_sweep(result, args.out)
    print(f"lambda_c_hat={result.estimate.lambda_c_hat}")
    log.info("wrote %s", out)
    return EXIT_OK


# -- bin ----------------------------------------------------------------------

def cmd_bin(args) -> int:
    if args.manifest:
        pairs = ing.pe_pipeline(ing.ingest(args.manifest), args.degree, args.tau, workers=args.workers)
    elif args.pairs:
        pairs = ing.read_pairs(args.pairs)
    else:
        raise UsageError("bin needs --manifest or --pairs")
    curve = ing.bin_by_control(pairs, args.bins, args.scheme)
    out = Path(args.out)
    if out.suffix != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "binned_pe.csv"
    ing.write_binned(out, curve)
    print(out)
    return EXIT_OK


# -- plot ---------------------------------------------------------------------

def cmd_plot(args) -> int:
    if not args.inputs:
        raise UsageError("plot needs at least one input")
    if args.kind == "line":
        series = [read_series(p) for p in args.inputs]
        svg = plotting.line_plot([(t, v) for _, t, v in series], [Path(p).stem for p in args.inputs],
                                 ylabel=series[0][0], title=args.title)
    elif args.kind == "band":
        series = [read_series(p) for p in args.inputs]
        t0 = series[0][1]
        if any(len(t) != len(t0) or not np.allclose(t, t0) for _, t, _ in series):
            raise ValueError("band inputs must share one time axis")
        svg = plotting.band_plot([(t0, [v for _, _, v in series])], ylabel=series[0][0], title=args.title)
    elif args.kind == "barcode":
        svg = plotting.barcode_plot(read_diagrams(args.inputs[0]), title=args.title)
    else:
        sweep_dir = Path(args.inputs[0])
        grid, p = read_p_lambda(sweep_dir / "p_lambda.csv")
        est = read_estimate(sweep_dir / "estimate.txt")
        lam = None if est.get("lambda_c_hat", "NA") == "NA" else float(est["lambda_c_hat"])
        svg = plotting.probability_plot(grid, p, float(est.get("p0", 0.9)), lam, title=args.title)
    plotting.write_svg(args.out, svg)
    print(args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pentrans", description="Persistent-entropy transition toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    pe = sub.add_parser("pe", help="persistent entropy of a diagram or a point set")
    src = pe.add_mutually_exclusive_group(required=True)
    src.add_argument("--diagram", help="diagram CSV (degree,birth,death)")
    src.add_argument("--distances", help="distance-matrix CSV")
    src.add_argument("--points", help="point-cloud CSV")
    pe.add_argument("--degree", type=int, choices=(0, 1))
    pe.add_argument("--tau", type=float, default=0.0, help="drop bars shorter than tau")
    pe.add_argument("--cap", type=float, help="death value for infinite bars")
    pe.add_argument("--normalized", action="store_true", help="divide by log of the bar count")
    pe.set_defaults(func=cmd_pe)

    bn = sub.add_parser("bottleneck", help="bottleneck distance between two diagram CSVs")
    bn.add_argument("a")
    bn.add_argument("b")
    bn.add_argument("--degree", type=int, choices=(0, 1))
    bn.add_argument("--cap", type=float, help="death value for infinite bars")
    bn.set_defaults(func=cmd_bottleneck)

    sim = sub.add_parser("simulate", help="run one Kuramoto or Vicsek trajectory")
    sim.add_argument("model", choices=("kuramoto", "vicsek"))
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--n", type=int)
    sim.add_argument("--coupling", type=float, default=5.0, help="Kuramoto K")
    sim.add_argument("--edge-prob", type=float, default=0.78)
    sim.add_argument("--t-max", type=float, default=10.0)
    sim.add_argument("--dt", type=float, default=0.02)
    sim.add_argument("--eta", type=float, default=0.1, help="Vicsek noise amplitude")
    sim.add_argument("--box", type=float)
    sim.add_argument("--v0", type=float)
    sim.add_argument("--r-int", type=float)
    sim.add_argument("--steps", type=int)
    sim.add_argument("--noise-span", type=float)
    sim.add_argument("--update", choices=("backward", "forward"))
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="parameter sweep with stability detection")
    sw.add_argument("model", choices=("kuramoto", "vicsek", "external"))
    sw.add_argument("--config", help="INI config; for external only [detector] is read")
    sw.add_argument("--manifest", help="external: manifest CSV or directory holding manifest.csv")
    sw.add_argument("--direction", choices=("inf_above", "sup_above"), default="inf_above")
    sw.add_argument("--out", required=True, help="output directory")
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    bi = sub.add_parser("bin", help="bin (control, PE) pairs into binned_pe.csv")
    src = bi.add_mutually_exclusive_group()
    src.add_argument("--manifest", help="manifest CSV or directory")
    src.add_argument("--pairs", help="CSV of control,pe rows")
    bi.add_argument("--degree", type=int, choices=(0, 1), default=0)
    bi.add_argument("--tau", type=float, default=0.0)
    bi.add_argument("--bins", type=int, default=20)
    bi.add_argument("--scheme", choices=("fixed_width", "quantile"), default="fixed_width")
    bi.add_argument("--workers", type=int, default=1)
    bi.add_argument("--out", required=True, help="output CSV path or directory")
    bi.set_defaults(func=cmd_bin)

    pl = sub.add_parser("plot", help="render an SVG figure")
    pl.add_argument("kind", choices=("line", "band", "barcode", "probability"))
    pl.add_argument("inputs", nargs="*", help="series CSVs, a diagram CSV, or a sweep directory")
    pl.add_argument("--out", required=True)
    pl.add_argument("--title", default="")
    pl.set_defaults(func=cmd_plot)
    return p


def _exit_code(exc: BaseException) -> int:
    cause = exc
    while isinstance(cause, SweepError) and cause.__cause__ is not None:
        cause = cause.__cause__
    if isinstance(cause, SweepError):
        return EXIT_INPUT
    if isinstance(cause, (ArithmeticError, np.linalg.LinAlgError)):
        return EXIT_NUMERIC
    if isinstance(cause, (ValueError, OSError, ConfigError, KeyError)):
        return EXIT_INPUT
    return EXIT_NUMERIC


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("PENTRANS_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level if isinstance(level, int) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:
        code = _exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        log.debug("traceback", exc_info=True)
        return code


if __name__ == "__main__":
    sys.exit(main())
