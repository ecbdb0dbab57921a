"""Externally produced point clouds or distance matrices, indexed by a control value.

A manifest CSV with header ``file,control,run,step,kind`` lists one sample per
row; ``kind`` is ``points`` or ``distances`` and ``file`` is resolved relative
to the manifest. Samples come back ordered by (run, step).

The pipeline is distances -> Rips persistence -> finitize at the largest
distance -> truncate at tau -> PE. Pooled (control, PE) pairs are then binned
and summarised by a mean and an approximate normal 95% CI.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .diagram import finitize, persistent_entropy, truncate_lifetimes
from .rips import (
    DistanceMatrixError,
    as_distance_matrix,
    distance_matrix_from_points,
    h0_single_linkage,
    read_distance_matrix,
    read_point_cloud,
    vr_persistence,
)

MANIFEST_HEADER = ("file", "control", "run", "step", "kind")
BINNED_HEADER = ("bin_lo", "bin_hi", "count", "mean_pe", "ci95")
KINDS = ("points", "distances")
Z95 = 1.96


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class IndexedSample:
    control: float
    run: int
    step: int
    kind: str
    payload: np.ndarray
    source: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise IngestError(f"{self.source or 'sample'}: kind must be one of {KINDS}, got {self.kind!r}")
        if not math.isfinite(self.control):
            raise IngestError(f"{self.source or 'sample'}: control value must be finite")

    @property
    def label(self) -> str:
        return self.source or f"run={self.run}, step={self.step}"

    def distances(self) -> np.ndarray:
        if self.kind == "points":
            return distance_matrix_from_points(self.payload)
        return as_distance_matrix(self.payload)


def _manifest_path(path) -> Path:
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.csv"
    if not path.is_file():
        raise FileNotFoundError(f"{path}: manifest not found")
    return path


def _cell(row: dict, key: str, path: Path, lineno: int, cast):
    raw = (row.get(key) or "").strip()
    if not raw:
        raise IngestError(f"{path}:{lineno}: missing {key!r}")
    try:
        return cast(raw)
    except ValueError:
        raise IngestError(f"{path}:{lineno}: bad {key!r} value {raw!r}") from None


def ingest(path) -> list[IndexedSample]:
    """Load every sample listed in a manifest (or ``<dir>/manifest.csv``)."""
    manifest = _manifest_path(path)
    samples = []
    with open(manifest, newline="") as fh:
        reader = csv.DictReader(fh)
        header = tuple(h.strip() for h in (reader.fieldnames or ()))
        if header != MANIFEST_HEADER:
            raise IngestError(f"{manifest}: expected header {','.join(MANIFEST_HEADER)}, got {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if all(not (v or "").strip() for v in row.values()):
                continue
            file = _cell(row, "file", manifest, lineno, str)
            control = _cell(row, "control", manifest, lineno, float)
            run = _cell(row, "run", manifest, lineno, int)
            step = _cell(row, "step", manifest, lineno, int)
            kind = _cell(row, "kind", manifest, lineno, str)
            if kind not in KINDS:
                raise IngestError(f"{manifest}:{lineno}: kind must be one of {KINDS}, got {kind!r}")
            data = manifest.parent / file
            if not data.is_file():
                raise FileNotFoundError(f"{data}: listed in {manifest}:{lineno} but not found")
            try:
                payload = read_distance_matrix(data) if kind == "distances" else read_point_cloud(data)
            except DistanceMatrixError as exc:
                raise IngestError(str(exc)) from None
            samples.append(IndexedSample(control, run, step, kind, payload, str(data)))
    samples.sort(key=lambda s: (s.run, s.step))
    return samples


def sample_pe(sample: IndexedSample, degree: int = 0, tau: float = 0.0) -> float:
    if degree not in (0, 1):
        raise ValueError(f"degree must be 0 or 1, got {degree}")
    try:
        d = sample.distances()
        dgm = h0_single_linkage(d) if degree == 0 else vr_persistence(d, max_degree=1)[1]
        return persistent_entropy(truncate_lifetimes(finitize(dgm, float(d.max())), tau))
    except ValueError as exc:
        raise IngestError(f"{sample.label}: {exc}") from exc


def _pe_task(args):
    sample, degree, tau = args
    return sample_pe(sample, degree, tau)


def pe_pipeline(samples: Sequence[IndexedSample], degree: int = 0, tau: float = 0.0,
                workers: int = 1) -> list[tuple[float, float]]:
    """(control, PE) per sample, in input order."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    tasks = [(s, degree, tau) for s in samples]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_pe_task, tasks))
    else:
        values = [_pe_task(t) for t in tasks]
    return [(s.control, v) for s, v in zip(samples, values)]


# -- binning ------------------------------------------------------------------

@dataclass(frozen=True)
class BinnedCurve:
    """Bins ``[edges[i], edges[i+1])``, the last one closed.

    ``mean`` is NaN for empty bins and ``ci95`` is NaN when a bin holds fewer
    than two samples.
    """

    edges: np.ndarray
    counts: np.ndarray
    mean: np.ndarray
    ci95: np.ndarray

    @property
    def n_bins(self) -> int:
        return len(self.counts)

    def occupied(self) -> np.ndarray:
        return self.counts > 0


def fixed_width_edges(controls: np.ndarray, n_bins: int) -> np.ndarray:
    return np.linspace(controls.min(), controls.max(), n_bins + 1)


def quantile_edges(controls: np.ndarray, n_bins: int) -> np.ndarray:
    """Quantiles of the distinct control values, so edges never repeat."""
    distinct = np.unique(controls)
    if n_bins > len(distinct):
        raise ValueError(f"{n_bins} quantile bins requested but only {len(distinct)} distinct control values")
    return np.quantile(distinct, np.linspace(0.0, 1.0, n_bins + 1))


def assign_bins(controls: np.ndarray, edges: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(edges, controls, side="right") - 1
    return np.clip(idx, 0, len(edges) - 2)


def bin_by_control(pairs, n_bins: int = 20, scheme: str = "fixed_width") -> BinnedCurve:
    """Pool (control, PE) pairs into ``n_bins`` bins and summarise each."""
    arr = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
    if len(arr) == 0:
        raise ValueError("no (control, PE) pairs to bin")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if not np.isfinite(arr).all():
        raise ValueError("control and PE values must be finite")
    # canonical order so sums do not depend on how the pairs arrived
    arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
    controls, values = arr[:, 0], arr[:, 1]
    if scheme == "fixed_width":
        edges = fixed_width_edges(controls, n_bins)
    elif scheme == "quantile":
        edges = quantile_edges(controls, n_bins)
    else:
        raise ValueError(f"scheme must be 'fixed_width' or 'quantile', got {scheme!r}")
    idx = assign_bins(controls, edges)
    counts = np.bincount(idx, minlength=n_bins)
    mean = np.full(n_bins, np.nan)
    ci = np.full(n_bins, np.nan)
    for b in np.flatnonzero(counts):
        v = values[idx == b]
        # shifted by the first value: identical PEs give an exact mean and CI 0
        dv = v - v[0]
        mean[b] = v[0] + dv.mean()
        if len(v) > 1:
            ci[b] = Z95 * dv.std(ddof=1) / math.sqrt(len(v))
    return BinnedCurve(edges, counts, mean, ci)


def _num(x: float) -> str:
    return "NA" if not np.isfinite(x) else repr(float(x))


def write_binned(path, curve: BinnedCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BINNED_HEADER)
        for i in range(curve.n_bins):
            w.writerow((_num(curve.edges[i]), _num(curve.edges[i + 1]), int(curve.counts[i]),
                        _num(curve.mean[i]), _num(curve.ci95[i])))


def read_binned(path) -> BinnedCurve:
    path = Path(path)
    lo, hi, counts, mean, ci = [], [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader, ())) != BINNED_HEADER:
            raise ValueError(f"{path}: expected header {','.join(BINNED_HEADER)}")
        for row in reader:
            a, b, c, m, s = row
            lo.append(float(a)); hi.append(float(b)); counts.append(int(c))
            mean.append(math.nan if m == "NA" else float(m))
            ci.append(math.nan if s == "NA" else float(s))
    return BinnedCurve(np.array(lo + hi[-1:]), np.array(counts), np.array(mean), np.array(ci))


def read_pairs(path) -> list[tuple[float, float]]:
    """Read a ``control,pe`` CSV (header required)."""
    path = Path(path)
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) != 2:
            raise IngestError(f"{path}: expected a two-column header such as 'control,pe'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                ell, pe = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                raise IngestError(f"{path}:{lineno}: expected two numbers, got {row!r}") from None
            if not (math.isfinite(ell) and math.isfinite(pe)):
                raise IngestError(f"{path}:{lineno}: non-finite value")
            out.append((ell, pe))
    return out


def write_pairs(path, pairs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("control", "pe"))
        for ell, pe in pairs:
            w.writerow((repr(float(ell)), repr(float(pe))))


def shrinking_family(controls: Sequence[float], n_points: int = 16) -> list[IndexedSample]:
    """Synthetic samples whose H0 diagram loses bars as the control value falls.

    Sample ``i`` places ``k = max(1, round(n_points * control / max(control)))``
    points on a line at spacing ``control`` and stacks the rest on the origin.
    Its capped H0 diagram is ``k - 1`` equal bars plus one bar of length
    ``(k - 1) * control``, so PE is ``log(2 (k - 1)) / 2 + log(2) / 2`` for
    ``k >= 2`` and 0 for ``k = 1``: non-decreasing in the control value.
    """
    controls = [float(c) for c in controls]
    if not controls or min(controls) <= 0:
        raise ValueError("controls must be a nonempty list of positive values")
    hi = max(controls)
    out = []
    for step, ell in enumerate(controls):
        keep = max(1, int(round(n_points * ell / hi)))
        pts = np.zeros((n_points, 2))
        pts[:keep, 0] = ell * np.arange(keep)
        out.append(IndexedSample(ell, 0, step, "points", pts, f"synthetic step {step}"))
    return out
