"""Minimal dependency-free SVG line plots."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
WIDTH, HEIGHT = 720, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 20, 40, 60


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step + 1e-9) + 1)]


def line_plot(curves, xlabel, ylabel, title="", max_points=2000) -> str:
    """Render ``curves`` (``(label, x, y)`` triples) as one SVG document."""
    xs = [np.asarray(c[1], dtype=float) for c in curves]
    ys = [np.asarray(c[2], dtype=float) for c in curves]
    finite = [y[np.isfinite(y)] for y in ys]
    x_lo = min(x.min() for x in xs)
    x_hi = max(x.max() for x in xs)
    y_lo = min((f.min() for f in finite if f.size), default=-1.0)
    y_hi = max((f.max() for f in finite if f.size), default=1.0)
    if y_hi - y_lo < 1e-300:
        pad = max(abs(y_hi), 1.0)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return TOP + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="{TOP - 15}" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for tx in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{px(tx):.2f}" y1="{TOP + ph}" x2="{px(tx):.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(tx):.2f}" y="{TOP + ph + 18}" text-anchor="middle">{tx:.6g}</text>')
    for ty in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{LEFT - 5}" y1="{py(ty):.2f}" x2="{LEFT}" y2="{py(ty):.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{py(ty) + 4:.2f}" text-anchor="end">{ty:.3g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph / 2:.1f})">{escape(ylabel)}</text>')

    for k, (x, y, (label, _, _)) in enumerate(zip(xs, ys, curves)):
        stride = max(len(x) // max_points, 1)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[::stride], y[::stride]) if np.isfinite(b))
        color = COLORS[k % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = TOP + 16 + 16 * k
        out.append(f'<line x1="{LEFT + 10}" y1="{ly - 4}" x2="{LEFT + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + 36}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
