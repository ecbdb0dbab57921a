"""Vietoris-Rips persistence in degrees 0 and 1 from a distance matrix.

Simplices are ordered by (filtration value, dimension, vertex tuple), so the
output never depends on iteration order. Degree 0 is a union-find sweep over
the sorted edges, which is the reduction of the edge boundary matrix. Degree 1
reduces the triangle boundary matrix over Z/2 with two standard shortcuts:

* rows of negative edges (edges that merge components) are dropped, since a
  pivot can never land on them;
* reduction stops once every positive edge has found its killing triangle.

Zero-length degree-1 pairs (a loop born and filled at the same value) are not
reported; their presence depends on tie-breaking, the rest of the diagram
does not.
"""

from __future__ import annotations

import csv
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .diagram import PersistenceDiagram

SYM_RTOL = 1e-12


class DistanceMatrixError(ValueError):
    pass


def as_distance_matrix(d) -> np.ndarray:
    """Validate ``d`` as a distance matrix and return a clean float copy.

    Entries must be finite, nonnegative and symmetric up to rounding
    (``1e-12`` relative to the largest entry); the diagonal must be zero.
    """
    d = np.array(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DistanceMatrixError(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] == 0:
        raise DistanceMatrixError("distance matrix is empty")
    if not np.isfinite(d).all():
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise DistanceMatrixError(f"non-finite entry at ({i}, {j})")
    if (d < 0).any():
        i, j = np.argwhere(d < 0)[0]
        raise DistanceMatrixError(f"negative entry {d[i, j]} at ({i}, {j})")
    tol = SYM_RTOL * max(1.0, float(d.max()))
    asym = np.abs(d - d.T)
    if (asym > tol).any():
        i, j = np.argwhere(asym > tol)[0]
        raise DistanceMatrixError(f"matrix is not symmetric at ({i}, {j})")
    if (np.abs(np.diag(d)) > tol).any():
        raise DistanceMatrixError("diagonal must be zero")
    upper = np.triu(d, 1)
    return upper + upper.T


def distance_matrix_from_points(points, metric: str = "euclidean") -> np.ndarray:
    if metric != "euclidean":
        raise ValueError(f"unsupported metric {metric!r}")
    try:
        x = np.array(points, dtype=float)
    except ValueError as exc:
        raise DistanceMatrixError(f"points must share one dimension: {exc}") from None
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise DistanceMatrixError(f"expected a nonempty (n, dim) point array, got shape {x.shape}")
    if x.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(x, metric="euclidean"))


def _sorted_edges(d: np.ndarray, max_radius: float):
    n = len(d)
    iu, ju = np.triu_indices(n, 1)
    w = d[iu, ju]
    keep = w <= max_radius
    iu, ju, w = iu[keep], ju[keep], w[keep]
    order = np.lexsort((ju, iu, w))
    return iu[order], ju[order], w[order]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True


def _h0(n, ei, ej, ew):
    uf = _UnionFind(n)
    deaths = []
    negative = np.zeros(len(ew), dtype=bool)
    for idx in range(len(ew)):
        if uf.union(int(ei[idx]), int(ej[idx])):
            deaths.append(float(ew[idx]))
            negative[idx] = True
            if len(deaths) == n - 1:
                break
    n_inf = n - len(deaths)
    bars = [(0.0, x) for x in deaths] + [(0.0, np.inf)] * n_inf
    return PersistenceDiagram(0, bars), negative


def _h1(n, d, ei, ej, ew, negative, max_radius):
    n_edges = len(ew)
    positive = ~negative
    n_positive = int(positive.sum())
    if n < 3 or n_positive == 0:
        return PersistenceDiagram(1, [])

    rank = np.full((n, n), -1, dtype=np.int64)
    rank[ei, ej] = np.arange(n_edges)
    rank[ej, ei] = np.arange(n_edges)

    i, j, k = _index_triples(n)
    filt = np.maximum(np.maximum(d[i, j], d[i, k]), d[j, k])
    keep = filt <= max_radius
    i, j, k, filt = i[keep], j[keep], k[keep], filt[keep]
    order = np.lexsort((k, j, i, filt))
    i, j, k, filt = i[order], j[order], k[order], filt[order]
    faces = np.stack([rank[i, j], rank[i, k], rank[j, k]], axis=1)

    pivot_col: dict[int, set] = {}
    bars = []
    paired = 0
    for t in range(len(filt)):
        col = {int(e) for e in faces[t] if positive[e]}
        while col:
            low = max(col)
            other = pivot_col.get(low)
            if other is None:
                break
            col ^= other
        if not col:
            continue
        low = max(col)
        pivot_col[low] = col
        paired += 1
        birth, death = float(ew[low]), float(filt[t])
        if death > birth:
            bars.append((birth, death))
        if paired == n_positive:
            break
    for e in np.flatnonzero(positive):
        if int(e) not in pivot_col:
            bars.append((float(ew[e]), np.inf))
    return PersistenceDiagram(1, bars)


def _index_triples(n: int):
    """All index triples i < j < k, lexicographically ordered."""
    t = np.array(list(combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
    return t[:, 0], t[:, 1], t[:, 2]


def vr_persistence(d, max_degree: int = 1, max_radius: float | None = None) -> dict[int, PersistenceDiagram]:
    """Vietoris-Rips persistence diagrams up to ``max_degree`` (0 or 1).

    ``max_radius`` defaults to the largest entry of ``d``; simplices whose
    filtration value exceeds it are left out. Classes still alive at the
    radius get an infinite death.
    """
    if max_degree not in (0, 1):
        raise ValueError(f"max_degree must be 0 or 1, got {max_degree}")
    d = as_distance_matrix(d)
    n = len(d)
    if max_radius is None:
        max_radius = float(d.max())
    ei, ej, ew = _sorted_edges(d, max_radius)
    h0, negative = _h0(n, ei, ej, ew)
    out = {0: h0}
    if max_degree >= 1:
        out[1] = _h1(n, d, ei, ej, ew, negative, max_radius)
    return out


def h0_single_linkage(d) -> PersistenceDiagram:
    """Degree-0 diagram from a minimum spanning tree (dense Prim).

    Finite deaths are the MST edge weights; one bar never dies.
    """
    d = as_distance_matrix(d)
    n = len(d)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = d[0].copy()
    best[0] = np.inf
    deaths = np.empty(n - 1)
    for step in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        deaths[step] = cand[v]
        in_tree[v] = True
        np.minimum(best, d[v], out=best)
    bars = np.zeros((n, 2))
    bars[: n - 1, 1] = np.sort(deaths)
    bars[n - 1, 1] = np.inf
    return PersistenceDiagram(0, bars)


def enclosing_cap(d) -> float:
    """Largest pairwise distance; the default cap for infinite deaths."""
    return float(np.max(d))


# -- CSV files ----------------------------------------------------------------

def _read_numeric_csv(path) -> np.ndarray:
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        for r, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            vals = []
            for c, cell in enumerate(row):
                try:
                    x = float(cell)
                except ValueError:
                    raise DistanceMatrixError(f"{path}: row {r}, column {c}: not a number: {cell!r}") from None
                if not np.isfinite(x):
                    raise DistanceMatrixError(f"{path}: row {r}, column {c}: non-finite value {cell!r}")
                vals.append(x)
            if rows and len(vals) != len(rows[0]):
                raise DistanceMatrixError(f"{path}: row {r} has {len(vals)} columns, expected {len(rows[0])}")
            rows.append(vals)
    if not rows:
        raise DistanceMatrixError(f"{path}: file is empty")
    return np.array(rows)


def read_distance_matrix(path) -> np.ndarray:
    m = _read_numeric_csv(path)
    try:
        return as_distance_matrix(m)
    except DistanceMatrixError as exc:
        raise DistanceMatrixError(f"{path}: {exc}") from None


def read_point_cloud(path) -> np.ndarray:
    return _read_numeric_csv(path)


def write_matrix(path, m: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.atleast_2d(m):
            w.writerow([repr(float(x)) for x in row])
