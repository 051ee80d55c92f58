"""Minimal SVG emitter for smoothing results.

Fixed-size canvas with the raw data polyline, the smoothed polyline, and
a shaded parallelogram over each open join (the region whose interior
points leave the join alone).  No plotting dependencies.
"""

from __future__ import annotations

import numpy as np

from .core import Approximation, DataSeries
from .join import Parallelogram
from .solver import _piece_sign

WIDTH = 800.0
HEIGHT = 500.0
MARGIN = 45.0


def _scales(xs: np.ndarray, *ys: np.ndarray):
    ymin = min(float(np.min(v)) for v in ys)
    ymax = max(float(np.max(v)) for v in ys)
    if ymax == ymin:
        ymin -= 1.0
        ymax += 1.0
    xmin, xmax = float(xs[0]), float(xs[-1])
    if xmax == xmin:
        xmin -= 1.0
        xmax += 1.0

    def sx(v: float) -> float:
        return MARGIN + (v - xmin) / (xmax - xmin) * (WIDTH - 2 * MARGIN)

    def sy(v: float) -> float:
        return HEIGHT - MARGIN - (v - ymin) / (ymax - ymin) * (HEIGHT - 2 * MARGIN)

    return sx, sy


def _polyline(sx, sy, xs, ys, stroke: str, width: float, dash: str = "") -> str:
    pts = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}" for a, b in zip(xs, ys))
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline points="{pts}" fill="none" stroke="{stroke}"'
        f' stroke-width="{width}"{dash_attr}/>'
    )


def render_svg(d: DataSeries, approx: Approximation) -> str:
    """SVG document overlaying data, fit, and join parallelograms."""
    sx, sy = _scales(d.x, d.f, approx.y)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}"'
        f' height="{HEIGHT:.0f}" viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">',
        f'<rect width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="white"/>',
    ]
    osgn = approx.orientation.first_piece
    if approx.h > 0:
        for alpha, (s1, t1) in enumerate(approx.joins, start=1):
            pi = Parallelogram.for_join(
                d, s1 - 1, t1 - 1, approx.h, _piece_sign(osgn, alpha)
            )
            pts = " ".join(f"{sx(cx):.2f},{sy(cy):.2f}" for cx, cy in pi.corners)
            parts.append(
                f'<polygon points="{pts}" fill="#7fb3d5" fill-opacity="0.35"'
                ' stroke="#2e86c1" stroke-width="0.8"/>'
            )
    parts.append(_polyline(sx, sy, d.x, d.f, "#888888", 1.0, dash="3,3"))
    for xv, fv in zip(d.x, d.f):
        parts.append(f'<circle cx="{sx(float(xv)):.2f}" cy="{sy(float(fv)):.2f}" r="1.6" fill="#555555"/>')
    parts.append(_polyline(sx, sy, d.x, approx.y, "#c0392b", 1.8))
    parts.append(
        f'<text x="{MARGIN:.0f}" y="{MARGIN / 2:.0f}" font-family="monospace"'
        f' font-size="13">h = {approx.h:.6g}, q = {approx.q}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
