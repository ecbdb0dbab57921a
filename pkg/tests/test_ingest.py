import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pentrans.diagram import finitize, persistent_entropy, truncate_lifetimes
from pentrans.ingest import (
    IndexedSample,
    IngestError,
    bin_by_control,
    ingest,
    pe_pipeline,
    read_binned,
    read_pairs,
    sample_pe,
    shrinking_family,
    write_binned,
    write_pairs,
)
from pentrans.rips import distance_matrix_from_points, vr_persistence, write_matrix

from .conftest import point_clouds

SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)


def write_manifest(root, rows):
    lines = ["file,control,run,step,kind"] + [",".join(map(str, r)) for r in rows]
    (root / "manifest.csv").write_text("\n".join(lines) + "\n")


def test_empty_manifest(tmp_path):
    write_manifest(tmp_path, [])
    assert ingest(tmp_path) == []


def test_two_files_in_run_step_order(tmp_path):
    write_matrix(tmp_path / "a.csv", distance_matrix_from_points(SQUARE))
    write_matrix(tmp_path / "b.csv", SQUARE)
    write_manifest(tmp_path, [("a.csv", 0.5, 1, 0, "distances"), ("b.csv", 0.9, 0, 3, "points")])
    samples = ingest(tmp_path / "manifest.csv")
    assert [(s.run, s.step) for s in samples] == [(0, 3), (1, 0)]
    assert samples[0].kind == "points" and samples[0].control == 0.9


def test_nan_cell_is_named(tmp_path):
    (tmp_path / "bad.csv").write_text("0,1\n1,nan\n")
    write_manifest(tmp_path, [("bad.csv", 0.1, 0, 0, "distances")])
    with pytest.raises(IngestError, match=r"bad.csv: row 1, column 1"):
        ingest(tmp_path)


@pytest.mark.parametrize(
    "row, msg",
    [(("a.csv", "", 0, 0, "points"), "missing 'control'"),
     (("a.csv", 0.1, "x", 0, "points"), "bad 'run'"),
     (("a.csv", 0.1, 0, 0, "graphs"), "kind")],
)
def test_manifest_metadata_errors(tmp_path, row, msg):
    write_matrix(tmp_path / "a.csv", SQUARE)
    write_manifest(tmp_path, [row])
    with pytest.raises(IngestError, match=msg):
        ingest(tmp_path)


def test_missing_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        ingest(tmp_path)
    write_manifest(tmp_path, [("nope.csv", 0.1, 0, 0, "points")])
    with pytest.raises(FileNotFoundError, match="nope.csv"):
        ingest(tmp_path)


def test_asymmetric_matrix_named(tmp_path):
    (tmp_path / "asym.csv").write_text("0,1\n2,0\n")
    write_manifest(tmp_path, [("asym.csv", 0.1, 0, 0, "distances")])
    with pytest.raises(IngestError, match="asym.csv"):
        ingest(tmp_path)


def test_square_loop_has_zero_h1_entropy():
    s = IndexedSample(1.0, 0, 0, "points", SQUARE)
    assert pe_pipeline([s], degree=1) == [(1.0, 0.0)]


def test_empty_after_truncation_and_duplicates():
    s = IndexedSample(1.0, 0, 0, "points", SQUARE)
    assert sample_pe(s, 0, tau=10.0) == 0.0
    assert pe_pipeline([s, s]) == [(1.0, sample_pe(s))] * 2
    with pytest.raises(ValueError):
        pe_pipeline([s], tau=-1)


def test_pipeline_error_names_sample():
    s = IndexedSample(1.0, 0, 0, "distances", np.array([[0, 1.0], [3.0, 0]]), "x.csv")
    with pytest.raises(IngestError, match="x.csv"):
        sample_pe(s)


def test_parallel_pipeline_matches_serial(rng):
    samples = [IndexedSample(float(i), 0, i, "points", rng.normal(size=(8, 2))) for i in range(4)]
    assert pe_pipeline(samples, workers=2) == pe_pipeline(samples)


@settings(max_examples=100)
@given(point_clouds(min_n=2, max_n=10), st.sampled_from([0, 1]), st.floats(0, 3))
def test_truncation_commutes(points, k, tau):
    d = distance_matrix_from_points(points)
    s = IndexedSample(0.0, 0, 0, "points", points)
    cap = float(d.max())
    raw = finitize(vr_persistence(d)[k], cap)
    assert sample_pe(s, k, tau) == pytest.approx(persistent_entropy(truncate_lifetimes(raw, tau)), abs=1e-12)


def test_binning_examples():
    curve = bin_by_control([(0.1, 1.0), (0.1, 3.0)], n_bins=1)
    assert curve.mean[0] == 2.0
    assert curve.ci95[0] == pytest.approx(1.96 * statistics.stdev([1.0, 3.0]) / math.sqrt(2))
    assert curve.ci95[0] == pytest.approx(1.96)
    curve = bin_by_control([(0.2, 0.7)] * 5 + [(0.9, 0.7)] * 3, n_bins=4)
    occ = curve.occupied()
    assert (curve.mean[occ] == 0.7).all() and (curve.ci95[occ] == 0).all()
    assert np.isnan(curve.mean[~occ]).all()
    curve = bin_by_control([(0.0, 1.0), (1.0, 3.0), (0.5, 5.0)], n_bins=1)
    assert curve.mean[0] == 3.0


def test_bin_edges_left_closed_last_closed():
    curve = bin_by_control([(0.0, 1.0), (0.5, 2.0), (1.0, 3.0)], n_bins=2)
    assert curve.edges.tolist() == [0.0, 0.5, 1.0]
    assert curve.counts.tolist() == [1, 2]
    assert np.isnan(curve.ci95[0])


def test_binning_errors():
    with pytest.raises(ValueError):
        bin_by_control([], 3)
    with pytest.raises(ValueError):
        bin_by_control([(0.1, 1.0)], 0)
    with pytest.raises(ValueError, match="distinct"):
        bin_by_control([(0.1, 1.0), (0.1, 2.0), (0.2, 1.0)], 3, scheme="quantile")
    with pytest.raises(ValueError):
        bin_by_control([(0.1, 1.0)], 1, scheme="log")


pairs_strategy = st.lists(st.tuples(st.floats(0, 5), st.floats(0, 3)), min_size=1, max_size=60)


@given(pairs_strategy, st.integers(1, 25), st.sampled_from(["fixed_width", "quantile"]), st.randoms())
def test_binning_conserves_and_ignores_order(pairs, m, scheme, rnd):
    if scheme == "quantile":
        m = min(m, len({p[0] for p in pairs}))
    curve = bin_by_control(pairs, m, scheme)
    assert curve.counts.sum() == len(pairs)
    assert (np.diff(curve.edges) >= 0).all()
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    again = bin_by_control(shuffled, m, scheme)
    np.testing.assert_array_equal(again.counts, curve.counts)
    np.testing.assert_array_equal(again.mean, curve.mean)


def test_shrinking_family_gives_monotone_curve():
    controls = np.linspace(0.05, 1.0, 60)[::-1]
    pairs = pe_pipeline(shrinking_family(controls))
    curve = bin_by_control(pairs, 20)
    means = curve.mean[curve.occupied()]
    assert (np.diff(means) >= -1e-12).all()
    assert means[0] < means[-1]


def test_binned_and_pairs_round_trip(tmp_path):
    curve = bin_by_control([(0.0, 1.0), (0.5, 2.0), (1.0, 3.0), (1.0, 4.0)], n_bins=3)
    write_binned(tmp_path / "b.csv", curve)
    assert (tmp_path / "b.csv").read_text().splitlines()[0] == "bin_lo,bin_hi,count,mean_pe,ci95"
    back = read_binned(tmp_path / "b.csv")
    np.testing.assert_array_equal(back.edges, curve.edges)
    np.testing.assert_array_equal(back.counts, curve.counts)
    np.testing.assert_array_equal(back.mean, curve.mean)
    np.testing.assert_array_equal(back.ci95, curve.ci95)
    write_pairs(tmp_path / "p.csv", [(0.1, 0.2), (0.3, 0.4)])
    assert read_pairs(tmp_path / "p.csv") == [(0.1, 0.2), (0.3, 0.4)]
