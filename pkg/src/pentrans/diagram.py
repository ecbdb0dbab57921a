"""Persistence diagrams and the entropy functionals defined on them."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np


class DiagramError(ValueError):
    """Raised for malformed diagrams or invalid diagram operations."""


class Bar(NamedTuple):
    birth: float
    death: float

    @property
    def lifetime(self) -> float:
        return self.death - self.birth


def _as_bar_array(bars) -> np.ndarray:
    arr = np.asarray(bars, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2))
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DiagramError(f"bars must be (birth, death) pairs, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death) bars in one homological degree.

    Bars are kept as a read-only ``(m, 2)`` float array. The order of bars
    carries no meaning; equality compares the sorted multisets.
    """

    degree: int
    bars: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        if self.degree not in (0, 1):
            raise DiagramError(f"homological degree must be 0 or 1, got {self.degree}")
        arr = _as_bar_array(self.bars).copy()
        if np.isnan(arr).any():
            raise DiagramError("diagram contains NaN")
        if np.isinf(arr[:, 0]).any():
            raise DiagramError("births must be finite")
        if (arr[:, 1] < arr[:, 0]).any():
            raise DiagramError("every bar needs death >= birth")
        arr.setflags(write=False)
        object.__setattr__(self, "bars", arr)

    def __len__(self) -> int:
        return len(self.bars)

    def __iter__(self):
        return (Bar(float(b), float(d)) for b, d in self.bars)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(
            self.sorted_bars(), other.sorted_bars()
        )

    __hash__ = None  # type: ignore[assignment]

    def sorted_bars(self) -> np.ndarray:
        if len(self.bars) == 0:
            return self.bars
        order = np.lexsort((self.bars[:, 1], self.bars[:, 0]))
        return self.bars[order]

    @property
    def lifetimes(self) -> np.ndarray:
        return self.bars[:, 1] - self.bars[:, 0]

    @property
    def has_infinite(self) -> bool:
        return bool(np.isinf(self.bars[:, 1]).any())

    def total_persistence(self) -> float:
        return float(self.lifetimes.sum())

    def scaled(self, c: float) -> "PersistenceDiagram":
        return PersistenceDiagram(self.degree, self.bars * c)


def _finite_lifetimes(diagram: PersistenceDiagram) -> np.ndarray:
    if diagram.has_infinite:
        raise DiagramError("diagram has an infinite bar; finitize it first")
    ell = diagram.lifetimes
    if (ell < 0).any():
        raise DiagramError("negative lifetime")
    return ell[ell > 0]


def lifetime_distribution(diagram: PersistenceDiagram) -> np.ndarray:
    """Normalized positive lifetimes ``p_i = l_i / L``; empty if ``L == 0``."""
    ell = _finite_lifetimes(diagram)
    if len(ell) == 0:
        return ell
    return ell / ell.sum()


def _entropy(p: np.ndarray) -> float:
    if len(p) <= 1:
        return 0.0
    return float(-np.sum(p * np.log(p)))


def persistent_entropy(diagram: PersistenceDiagram) -> float:
    """Shannon entropy (natural log) of the normalized bar lifetimes.

    Zero-lifetime bars are dropped before normalization and an empty
    diagram has entropy 0.
    """
    return _entropy(lifetime_distribution(diagram))


def normalized_persistent_entropy(diagram: PersistenceDiagram) -> float:
    """Persistent entropy divided by ``log m``, with 0 for ``m <= 1`` bars."""
    p = lifetime_distribution(diagram)
    if len(p) <= 1:
        return 0.0
    return min(1.0, _entropy(p) / math.log(len(p)))


def truncate_lifetimes(diagram: PersistenceDiagram, tau: float) -> PersistenceDiagram:
    """Keep only bars with lifetime >= tau."""
    if not tau >= 0:
        raise DiagramError(f"truncation threshold must be >= 0, got {tau}")
    if tau == 0:
        return diagram
    keep = diagram.lifetimes >= tau
    return PersistenceDiagram(diagram.degree, diagram.bars[keep])


def finitize(diagram: PersistenceDiagram, death_cap: float) -> PersistenceDiagram:
    """Replace every infinite death by ``death_cap``."""
    bars = diagram.bars
    if len(bars) == 0:
        return diagram
    if death_cap < bars[:, 0].max():
        raise DiagramError(f"death cap {death_cap} lies below an existing birth")
    inf = np.isinf(bars[:, 1])
    if not inf.any():
        return diagram
    out = bars.copy()
    out[inf, 1] = death_cap
    return PersistenceDiagram(diagram.degree, out)


def max_lifetime(diagram: PersistenceDiagram) -> float:
    if len(diagram) == 0:
        return 0.0
    return float(diagram.lifetimes.max())


# -- CSV serialization ------------------------------------------------------

DIAGRAM_HEADER = ("degree", "birth", "death")


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def write_diagrams(path, diagrams: Iterable[PersistenceDiagram]) -> None:
    """Write diagrams as CSV rows ``degree,birth,death`` (``inf`` for infinity)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DIAGRAM_HEADER)
        for dgm in diagrams:
            for b, d in dgm.sorted_bars():
                writer.writerow((dgm.degree, _fmt(b), _fmt(d)))


def read_diagrams(path) -> dict[int, PersistenceDiagram]:
    """Read a diagram CSV into a ``degree -> diagram`` map."""
    path = Path(path)
    rows: dict[int, list[tuple[float, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != DIAGRAM_HEADER:
            raise DiagramError(f"{path}: expected header 'degree,birth,death'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise DiagramError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                k, b, d = int(row[0]), float(row[1]), float(row[2])
            except ValueError as exc:
                raise DiagramError(f"{path}:{lineno}: {exc}") from None
            rows.setdefault(k, []).append((b, d))
    try:
        return {k: PersistenceDiagram(k, v) for k, v in sorted(rows.items())}
    except DiagramError as exc:
        raise DiagramError(f"{path}: {exc}") from None
