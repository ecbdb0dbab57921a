"""Sliding-window stabilization time, stability probability, critical estimate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .diagram import (
    PersistenceDiagram,
    finitize,
    max_lifetime,
    normalized_persistent_entropy,
    persistent_entropy,
    truncate_lifetimes,
)
from .rips import h0_single_linkage, vr_persistence

STATISTICS = ("npe_h0", "pe_h0", "pe_h1", "max_lifetime_h1")
DIRECTIONS = ("inf_above", "sup_above")


@dataclass(frozen=True)
class StatisticSeries:
    times: np.ndarray
    values: np.ndarray
    kind: str = "npe_h0"

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-d and of equal length")
        if len(times) > 1 and not (np.diff(times) > 0).all():
            raise ValueError("times must be strictly increasing")
        if self.kind not in STATISTICS:
            raise ValueError(f"unknown statistic {self.kind!r}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class StabilityRecord:
    parameter: float
    realization: int
    t_star: Optional[float]
    horizon: float

    @property
    def stable(self) -> bool:
        return self.t_star is not None and self.t_star <= self.horizon


@dataclass(frozen=True)
class CriticalEstimate:
    grid: tuple
    probabilities: tuple
    p0: float
    direction: str
    lambda_c_hat: Optional[float]

    @classmethod
    def from_probabilities(cls, grid, probabilities, p0: float, direction: str) -> "CriticalEstimate":
        lam = estimate_critical(grid, probabilities, p0, direction)
        return cls(tuple(map(float, grid)), tuple(map(float, probabilities)), p0, direction, lam)


def _time_tol(times: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.abs(times).max()))


def _window_deviations(series: StatisticSeries, window: float) -> np.ndarray:
    """max |S(s) - S(t)| over s in [t, t + W] for each start t whose window fits."""
    t, s = series.times, series.values
    tol = _time_tol(t)
    starts = np.flatnonzero(t + window <= t[-1] + tol)
    ends = np.searchsorted(t, t[starts] + window + tol, side="right")
    return np.array([np.abs(s[i:j] - s[i]).max() for i, j in zip(starts, ends)])


def _check_window(series: StatisticSeries, window: float):
    if not window > 0:
        raise ValueError("window must be > 0")
    span = series.times[-1] - series.times[0] if len(series.times) else -1.0
    if span + _time_tol(series.times) < window:
        raise ValueError(f"series spans {span}, shorter than the window {window}")


def transition_time(series: StatisticSeries, window: float, tolerance: float) -> Optional[float]:
    """Earliest sampled t with every sample in [t, t + window] within ``tolerance`` of S(t).

    Only starts whose whole window lies inside the series are considered.
    Returns None when no window qualifies.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be > 0")
    _check_window(series, window)
    dev = _window_deviations(series, window)
    ok = np.flatnonzero(dev <= tolerance)
    if len(ok) == 0:
        return None
    return float(series.times[ok[0]])


def calibrate_tolerance(series: StatisticSeries, window: float) -> float:
    """Smallest tolerance at which ``transition_time`` is defined.

    This is the quietest window's fluctuation range, the noise floor a
    tolerance has to clear.
    """
    _check_window(series, window)
    return float(_window_deviations(series, window).min())


def stability_probability(records: Sequence[StabilityRecord]) -> float:
    """Fraction of realizations with a defined t* no later than the horizon."""
    records = list(records)
    if not records:
        raise ValueError("no records")
    lam, horizon = records[0].parameter, records[0].horizon
    if any(r.parameter != lam for r in records):
        raise ValueError("records mix different parameter values")
    if any(r.horizon != horizon for r in records):
        raise ValueError("records mix different horizons")
    return float(Fraction(sum(r.stable for r in records), len(records)))


def estimate_critical(grid, probabilities, p0: float, direction: str) -> Optional[float]:
    """Smallest (``inf_above``) or largest (``sup_above``) grid value with p >= p0."""
    grid = np.asarray(grid, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    if len(grid) == 0:
        raise ValueError("empty grid")
    if grid.shape != p.shape:
        raise ValueError("grid and probabilities differ in length")
    if (np.diff(grid) <= 0).any():
        raise ValueError("grid must be strictly increasing")
    if not 0 < p0 < 1:
        raise ValueError("p0 must lie in (0, 1)")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    hits = np.flatnonzero(p >= p0)
    if len(hits) == 0:
        return None
    idx = hits[0] if direction == "inf_above" else hits[-1]
    return float(grid[idx])


def diagram_statistic(diagram: PersistenceDiagram, kind: str) -> float:
    if kind == "npe_h0":
        return normalized_persistent_entropy(diagram)
    if kind in ("pe_h0", "pe_h1"):
        return persistent_entropy(diagram)
    if kind == "max_lifetime_h1":
        return max_lifetime(diagram)
    raise ValueError(f"unknown statistic {kind!r}")


def statistic_degree(kind: str) -> int:
    return 0 if kind.endswith("h0") else 1


def distance_statistic(d: np.ndarray, kind: str = "npe_h0", tau: float = 0.0) -> float:
    """Persistence -> finitize at the largest distance -> truncate -> statistic.

    Degree-0 statistics take the spanning-tree path, which yields the same
    diagram as the full Rips reduction at a fraction of the cost.
    """
    if statistic_degree(kind) == 0:
        dgm = h0_single_linkage(d)
    else:
        dgm = vr_persistence(d, max_degree=1)[1]
    dgm = truncate_lifetimes(finitize(dgm, float(np.max(d))), tau)
    return diagram_statistic(dgm, kind)
