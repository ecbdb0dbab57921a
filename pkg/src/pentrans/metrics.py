"""Bottleneck distance between finite persistence diagrams.

The distance is found by binary search over the finite set of candidate
costs (every pairwise l-infinity cost and every half-lifetime), testing at
each threshold whether the bipartite graph of admissible assignments has a
perfect matching. Each bar may also be sent to the diagonal at cost
``(death - birth) / 2``; diagonal-to-diagonal assignments are free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .diagram import Bar, DiagramError, PersistenceDiagram

DIAGONAL = None


@dataclass(frozen=True)
class Matching:
    """Optimal assignment; ``None`` on either side stands for the diagonal."""

    pairs: tuple
    cost: float


def _checked_bars(a: PersistenceDiagram, b: PersistenceDiagram):
    if a.degree != b.degree:
        raise DiagramError(f"degree mismatch: {a.degree} vs {b.degree}")
    if a.has_infinite or b.has_infinite:
        raise DiagramError("bottleneck needs finitized diagrams")
    return a.bars, b.bars


def _costs(x: np.ndarray, y: np.ndarray):
    cross = np.maximum(
        np.abs(x[:, None, 0] - y[None, :, 0]), np.abs(x[:, None, 1] - y[None, :, 1])
    )
    return cross, (x[:, 1] - x[:, 0]) / 2, (y[:, 1] - y[:, 0]) / 2


def _match_at(cross, half_x, half_y, threshold):
    """Maximum matching at ``threshold``; returns row -> column assignment."""
    m, n = cross.shape
    size = m + n
    block = np.zeros((size, size), dtype=bool)
    block[:m, :n] = cross <= threshold
    block[np.arange(m), n + np.arange(m)] = half_x <= threshold
    block[m + np.arange(n), np.arange(n)] = half_y <= threshold
    block[m:, n:] = True
    graph = csr_matrix(block.astype(np.int8))
    return maximum_bipartite_matching(graph, perm_type="column")


def _candidates(cross, half_x, half_y):
    return np.unique(np.concatenate([[0.0], cross.ravel(), half_x, half_y]))


def _solve(a, b):
    x, y = _checked_bars(a, b)
    m, n = len(x), len(y)
    if m + n == 0:
        return 0.0, np.zeros(0, dtype=int), 0, 0
    cross, half_x, half_y = _costs(x, y)
    cand = _candidates(cross, half_x, half_y)
    lo, hi = 0, len(cand) - 1
    best = _match_at(cross, half_x, half_y, cand[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        assign = _match_at(cross, half_x, half_y, cand[mid])
        if (assign >= 0).all():
            hi, best = mid, assign
        else:
            lo = mid + 1
    return float(cand[lo]), best, m, n


def bottleneck(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Bottleneck distance between two finitized diagrams of equal degree."""
    return _solve(a, b)[0]


def bottleneck_matching(a: PersistenceDiagram, b: PersistenceDiagram) -> Matching:
    cost, assign, m, n = _solve(a, b)
    pairs = []
    for row, col in enumerate(assign):
        left = Bar(*map(float, a.bars[row])) if row < m else DIAGONAL
        right = Bar(*map(float, b.bars[col])) if col < n else DIAGONAL
        if left is DIAGONAL and right is DIAGONAL:
            continue
        pairs.append((left, right))
    return Matching(tuple(pairs), cost)


def converged_in_metric(series, tol: float) -> bool:
    """True iff every diagram is within ``tol`` of the last one."""
    series = list(series)
    if not series:
        raise ValueError("series must be nonempty")
    final = series[-1]
    return all(bottleneck(dgm, final) <= tol for dgm in series)
