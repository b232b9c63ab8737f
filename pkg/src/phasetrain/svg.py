"""Minimal self-contained SVG line plots: axes, ticks, legend, markers.

Output is a pure function of the inputs (fixed number formatting, no ids or
timestamps), so identical data gives byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=64, right=168, top=36, bottom=48)


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    dashed: bool = False
    points: bool = False


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    series: List[Series] = field(default_factory=list)
    vlines: List[Tuple[float, str]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def add(self, label, x, y, **kw) -> "Figure":
        self.series.append(Series(label, list(x), list(y), **kw))
        return self


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while first + k * step <= hi + 1e-9 * step:
        ticks.append(round(first + k * step, 12))
        k += 1
    return ticks


def _limits(values: np.ndarray) -> Tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12:
        pad = max(abs(lo) * 0.1, 0.5)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render(fig: Figure, xlim: Optional[Tuple[float, float]] = None, ylim: Optional[Tuple[float, float]] = None) -> str:
    finite = [
        (np.asarray(s.x, float), np.asarray(s.y, float)) for s in fig.series
    ]
    xs = np.concatenate([x[np.isfinite(x) & np.isfinite(y)] for x, y in finite] or [np.zeros(1)])
    ys = np.concatenate([y[np.isfinite(x) & np.isfinite(y)] for x, y in finite] or [np.zeros(1)])
    if xs.size == 0:
        xs = ys = np.zeros(1)
    x0, x1 = xlim or _limits(xs)
    y0, y1 = ylim or _limits(ys)
    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(fig.title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{_fmt(X)}" y1="{top + ph}" x2="{_fmt(X)}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{_fmt(X)}" y="{top + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{left - 4}" y1="{_fmt(Y)}" x2="{left}" y2="{_fmt(Y)}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{_fmt(Y + 4)}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(fig.xlabel)}</text>')
    out.append(
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">{escape(fig.ylabel)}</text>'
    )
    for xv, label in fig.vlines:
        if x0 <= xv <= x1:
            X = _fmt(px(xv))
            out.append(f'<line x1="{X}" y1="{top}" x2="{X}" y2="{top + ph}" stroke="gray" stroke-dasharray="2,3"/>')
            out.append(f'<text x="{X}" y="{top - 4}" text-anchor="middle" fill="gray">{escape(label)}</text>')

    out.append(f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>')
    for i, (s, (x, y)) in enumerate(zip(fig.series, finite)):
        color = PALETTE[i % len(PALETTE)]
        keep = np.isfinite(x) & np.isfinite(y)
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x[keep], y[keep]))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline clip-path="url(#plot)" fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{pts}"/>')
        if s.points:
            for a, b in zip(x[keep], y[keep]):
                out.append(f'<circle cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" r="2.5" fill="{color}"/>')
        ly = top + 12 + 16 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{escape(s.label)}</text>')
    for j, note in enumerate(fig.notes):
        ly = top + 20 + 16 * (len(fig.series) + j)
        out.append(f'<text x="{left + pw + 12}" y="{ly}">{escape(note)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write(fig: Figure, path, **kw) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render(fig, **kw))
