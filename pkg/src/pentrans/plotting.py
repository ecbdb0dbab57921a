"""Deterministic SVG figures: line, band, barcode and probability plots.

The SVG is written by hand with fixed-precision coordinates, no timestamps
and no random ids, so equal inputs give byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .diagram import PersistenceDiagram

WIDTH, HEIGHT = 640, 400
MARGIN = 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _f(x: float) -> str:
    return f"{x:.3f}"


def _range(values) -> tuple[float, float]:
    arr = np.asarray([v for v in np.ravel(values) if np.isfinite(v)], dtype=float)
    if len(arr) == 0:
        return 0.0, 1.0
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        pad = max(abs(lo), 1.0) * 0.5
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


@dataclass
class _Panel:
    x0: float
    y0: float
    w: float
    h: float
    xr: tuple
    yr: tuple

    def x(self, v: float) -> float:
        lo, hi = self.xr
        return self.x0 + (v - lo) / (hi - lo) * self.w

    def y(self, v: float) -> float:
        lo, hi = self.yr
        return self.y0 + self.h - (v - lo) / (hi - lo) * self.h


class _Svg:
    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width, self.height = width, height
        self.items: list[str] = []

    def add(self, item: str):
        self.items.append(item)

    def text(self, x, y, s, anchor="middle", size=12):
        self.add(f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}">{escape(str(s))}</text>')

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0, dash: Optional[str] = None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                 f'stroke="{stroke}" stroke-width="{width}"{d}/>')

    def polyline(self, pts, stroke, width=1.5):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self.add(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def polygon(self, pts, fill, opacity=0.25):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self.add(f'<polygon points="{coords}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>')

    def circle(self, x, y, r, fill):
        self.add(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="{fill}"/>')

    def axes(self, p: _Panel, xlabel="", ylabel="", title=""):
        self.add(f'<rect x="{_f(p.x0)}" y="{_f(p.y0)}" width="{_f(p.w)}" height="{_f(p.h)}" '
                 f'fill="none" stroke="#000000" stroke-width="1"/>')
        for v in np.linspace(*p.xr, 5):
            self.text(p.x(v), p.y0 + p.h + 15, f"{v:.3g}", size=10)
        for v in np.linspace(*p.yr, 5):
            self.text(p.x0 - 5, p.y(v) + 4, f"{v:.3g}", anchor="end", size=10)
        if xlabel:
            self.text(p.x0 + p.w / 2, p.y0 + p.h + 32, xlabel)
        if ylabel:
            self.add(f'<text x="{_f(p.x0 - 38)}" y="{_f(p.y0 + p.h / 2)}" font-size="12" text-anchor="middle" '
                     f'transform="rotate(-90 {_f(p.x0 - 38)} {_f(p.y0 + p.h / 2)})">{escape(ylabel)}</text>')
        if title:
            self.text(p.x0 + p.w / 2, p.y0 - 8, title)

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        body = [f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>'] + self.items
        return "\n".join([head, *body, "</svg>"]) + "\n"


def _main_panel(xr, yr) -> _Panel:
    return _Panel(MARGIN + 20, MARGIN - 20, WIDTH - 2 * MARGIN - 20, HEIGHT - 2 * MARGIN, xr, yr)


def line_plot(series: Sequence[tuple], labels: Sequence[str] = (), xlabel="t", ylabel="", title="") -> str:
    """One polyline per ``(x, y)`` pair."""
    if not series:
        raise ValueError("nothing to plot")
    xs = [np.asarray(x, dtype=float) for x, _ in series]
    ys = [np.asarray(y, dtype=float) for _, y in series]
    panel = _main_panel(_range(np.concatenate(xs)), _range(np.concatenate(ys)))
    svg = _Svg()
    svg.axes(panel, xlabel, ylabel, title)
    for i, (x, y) in enumerate(zip(xs, ys)):
        svg.polyline([(panel.x(a), panel.y(b)) for a, b in zip(x, y)], PALETTE[i % len(PALETTE)])
    for i, lab in enumerate(labels):
        svg.text(panel.x0 + panel.w - 5, panel.y0 + 15 + 14 * i, lab, anchor="end", size=10)
    return svg.render()


def band_stats(ys: Sequence) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(ys, dtype=float)
    if arr.ndim != 2 or len(arr) == 0:
        raise ValueError("band needs equal-length realizations")
    return arr.mean(axis=0), arr.std(axis=0)


def band_plot(groups: Sequence[tuple], labels: Sequence[str] = (), xlabel="t", ylabel="", title="") -> str:
    """Mean line with a shaded mean +- one standard deviation band per group.

    Each group is ``(x, [y_realization, ...])`` with a shared ``x``.
    """
    if not groups:
        raise ValueError("nothing to plot")
    stats = []
    for x, ys in groups:
        x = np.asarray(x, dtype=float)
        mean, std = band_stats(ys)
        if mean.shape != x.shape:
            raise ValueError("realizations must match the time axis")
        stats.append((x, mean, std))
    xr = _range(np.concatenate([s[0] for s in stats]))
    yr = _range(np.concatenate([np.concatenate([m - s, m + s]) for _, m, s in stats]))
    panel = _main_panel(xr, yr)
    svg = _Svg()
    svg.axes(panel, xlabel, ylabel, title)
    for i, (x, mean, std) in enumerate(stats):
        color = PALETTE[i % len(PALETTE)]
        upper = [(panel.x(a), panel.y(b)) for a, b in zip(x, mean + std)]
        lower = [(panel.x(a), panel.y(b)) for a, b in zip(x[::-1], (mean - std)[::-1])]
        svg.polygon(upper + lower, color)
        svg.polyline([(panel.x(a), panel.y(b)) for a, b in zip(x, mean)], color)
    for i, lab in enumerate(labels):
        svg.text(panel.x0 + panel.w - 5, panel.y0 + 15 + 14 * i, lab, anchor="end", size=10)
    return svg.render()


def barcode_plot(diagrams: dict, title="") -> str:
    """Degree-0 barcode on the left, degree-1 on the right; infinite bars run to the edge."""
    if not diagrams:
        raise ValueError("nothing to plot")
    finite = [v for d in diagrams.values() for v in np.ravel(d.bars) if np.isfinite(v)]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    xr = (lo, hi if hi > lo else lo + 1.0)
    svg = _Svg()
    if title:
        svg.text(WIDTH / 2, 14, title)
    pw = (WIDTH - 3 * MARGIN) / 2
    for slot, degree in enumerate((0, 1)):
        dgm: PersistenceDiagram = diagrams.get(degree, PersistenceDiagram(degree, []))
        panel = _Panel(MARGIN + slot * (pw + MARGIN), MARGIN - 20, pw, HEIGHT - 2 * MARGIN, xr, (0.0, 1.0))
        svg.axes(panel, "filtration value", "", f"H{degree}")
        bars = dgm.sorted_bars()
        n = len(bars)
        for i, (b, d) in enumerate(bars):
            y = panel.y0 + (i + 1) * panel.h / (n + 1)
            x2 = panel.x0 + panel.w if not np.isfinite(d) else panel.x(d)
            svg.line(panel.x(b), y, x2, y, PALETTE[degree], width=2.0)
    return svg.render()


def probability_plot(grid, probabilities, p0: float, lambda_c_hat: Optional[float],
                     xlabel="lambda", title="") -> str:
    """p(lambda) with a dashed p0 level and a dashed marker at lambda_c_hat."""
    grid = np.asarray(grid, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    if len(grid) == 0 or grid.shape != p.shape:
        raise ValueError("grid and probabilities must be nonempty and of equal length")
    panel = _main_panel(_range(grid), (-0.05, 1.05))
    svg = _Svg()
    svg.axes(panel, xlabel, "p", title)
    svg.line(panel.x0, panel.y(p0), panel.x0 + panel.w, panel.y(p0), "#555555", dash="6,4")
    if lambda_c_hat is not None:
        x = panel.x(lambda_c_hat)
        svg.line(x, panel.y0, x, panel.y0 + panel.h, "#d62728", width=1.5, dash="6,4")
    svg.polyline([(panel.x(a), panel.y(b)) for a, b in zip(grid, p)], PALETTE[0])
    for a, b in zip(grid, p):
        svg.circle(panel.x(a), panel.y(b), 3, PALETTE[0])
    return svg.render()


def write_svg(path, text: str) -> Path:
    path = Path(path)
    path.write_text(text)
    return path
