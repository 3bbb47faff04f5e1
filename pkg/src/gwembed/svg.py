"""Tiny static SVG writer for scatter plots and line charts (no plotting backend)."""

from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

W, H, PAD = 480, 400, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _scale(vals, lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return a + (np.asarray(vals, dtype=float) - lo) / span * (b - a)


def _ramp(t: float) -> str:
    # blue -> yellow -> red
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        r, g, b = 2 * t, 2 * t, 1 - 2 * t
    else:
        r, g, b = 1.0, 2 - 2 * t, 0.0
    return "#%02x%02x%02x" % (int(40 + 200 * r), int(40 + 180 * g), int(40 + 200 * b))


def _frame(title: str, xlabel: str, ylabel: str, xr, yr) -> list:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD / 2}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{PAD}" y2="{PAD / 2}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle" font-family="sans-serif" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 14 {H / 2})">{escape(ylabel)}</text>',
    ]
    for val, x in ((xr[0], PAD), (xr[1], W - PAD / 2)):
        parts.append(f'<text x="{x}" y="{H - PAD + 14}" text-anchor="middle" font-family="sans-serif" '
                     f'font-size="10">{val:.3g}</text>')
    for val, y in ((yr[0], H - PAD), (yr[1], PAD / 2)):
        parts.append(f'<text x="{PAD - 4}" y="{y}" text-anchor="end" font-family="sans-serif" '
                     f'font-size="10">{val:.3g}</text>')
    return parts


def scatter_svg(x, y, colors: Optional[Sequence[float]] = None, title: str = "",
                xlabel: str = "", ylabel: str = "", max_points: int = 5000, diagonal: bool = False) -> str:
    """Scatter plot; ``colors`` are scalars mapped onto a colour ramp."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    stride = max(1, math.ceil(len(x) / max_points))
    idx = np.arange(0, len(x), stride)
    xr = (float(x.min()), float(x.max())) if len(x) else (0.0, 1.0)
    yr = (float(y.min()), float(y.max())) if len(y) else (0.0, 1.0)
    if diagonal:
        lo, hi = min(xr[0], yr[0]), max(xr[1], yr[1])
        xr = yr = (lo, hi)
    px = _scale(x[idx], *xr, PAD, W - PAD / 2)
    py = _scale(y[idx], *yr, H - PAD, PAD / 2)
    if colors is not None:
        c = np.asarray(colors, dtype=float)[idx]
        lo, hi = float(c.min()), float(c.max())
        fills = [_ramp((v - lo) / (hi - lo) if hi > lo else 0.5) for v in c]
    else:
        fills = [PALETTE[0]] * len(idx)
    parts = _frame(title, xlabel, ylabel, xr, yr)
    if diagonal:
        parts.append(f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD / 2}" y2="{PAD / 2}" '
                     'stroke="#999" stroke-dasharray="4 3"/>')
    parts += [f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2" fill="{f}" fill-opacity="0.7"/>'
              for a, b, f in zip(px, py, fills)]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def line_chart_svg(series: Mapping[str, Sequence[float]], title: str = "", xlabel: str = "iteration",
                   ylabel: str = "cost", log_y: bool = True) -> str:
    """One polyline per named series, x = index."""
    def tr(v):
        v = np.asarray(v, dtype=float)
        return np.log10(np.maximum(v, 1e-300)) if log_y else v

    ys = [tr(v) for v in series.values() if len(v)]
    if not ys:
        raise ValueError("line chart needs at least one non-empty series")
    xmax = max(len(v) for v in ys) - 1 or 1
    ylo = min(float(v.min()) for v in ys)
    yhi = max(float(v.max()) for v in ys)
    label = f"log10 {ylabel}" if log_y else ylabel
    parts = _frame(title, xlabel, label, (0, xmax), (ylo, yhi))
    for k, (name, v) in enumerate(series.items()):
        if not len(v):
            continue
        col = PALETTE[k % len(PALETTE)]
        yy = tr(v)
        px = _scale(np.arange(len(yy)), 0, xmax, PAD, W - PAD / 2)
        py = _scale(yy, ylo, yhi, H - PAD, PAD / 2)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        parts.append(f'<text x="{W - PAD / 2 - 4}" y="{PAD / 2 + 14 * (k + 1)}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11" fill="{col}">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
