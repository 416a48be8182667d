"""Self-contained SVG plots: log-log curves and half-space heatmaps."""

from __future__ import annotations

import math
from collections.abc import Sequence
from html import escape

import numpy as np

from dyadnorm.halfspace.estimate import Sample

WIDTH = 640
HEIGHT = 420
MARGIN = 60


def loglog_svg(
    points: Sequence[tuple[float, float]],
    title: str = "",
    x_label: str = "lambda",
    y_label: str = "lambda^p W(lambda)",
) -> str:
    """Polyline of the positive finite points on log-log axes, decade ticks on both."""
    pts = np.array(
        [(x, y) for x, y in points if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y)],
        dtype=np.float64,
    ).reshape(-1, 2)
    parts = [_open(title)]
    if pts.size == 0:
        parts.append(_text(WIDTH / 2, HEIGHT / 2, "no positive values", anchor="middle"))
        parts.append("</svg>\n")
        return "".join(parts)
    logs = np.log10(pts)
    (x0, y0), (x1, y1) = logs.min(axis=0), logs.max(axis=0)
    x0, x1 = _pad(x0, x1)
    y0, y1 = _pad(y0, y1)
    sx = (WIDTH - 2 * MARGIN) / (x1 - x0)
    sy = (HEIGHT - 2 * MARGIN) / (y1 - y0)
    xs = MARGIN + (logs[:, 0] - x0) * sx
    ys = HEIGHT - MARGIN - (logs[:, 1] - y0) * sy
    parts.append(_axes(x_label, y_label))
    for d in range(math.ceil(x0), math.floor(x1) + 1):
        x = MARGIN + (d - x0) * sx
        parts.append(_tick(x, HEIGHT - MARGIN, x, HEIGHT - MARGIN + 5))
        parts.append(_text(x, HEIGHT - MARGIN + 18, f"1e{d}", anchor="middle"))
    for d in range(math.ceil(y0), math.floor(y1) + 1):
        y = HEIGHT - MARGIN - (d - y0) * sy
        parts.append(_tick(MARGIN - 5, y, MARGIN, y))
        parts.append(_text(MARGIN - 8, y + 4, f"1e{d}", anchor="end"))
    order = np.argsort(xs, kind="stable")
    coords = " ".join(f"{xs[i]:.2f},{ys[i]:.2f}" for i in order)
    parts.append(f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{coords}"/>\n')
    for i in order:
        parts.append(f'<circle cx="{xs[i]:.2f}" cy="{ys[i]:.2f}" r="2" fill="#1f77b4"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def heatmap_svg(samples: Sequence[Sample], title: str = "") -> str:
    """Samples of the first coordinate against log2 t, colour scaled to the largest |a|."""
    parts = [_open(title)]
    if not samples:
        parts.append(_text(WIDTH / 2, HEIGHT / 2, "no samples", anchor="middle"))
        parts.append("</svg>\n")
        return "".join(parts)
    xs = np.array([s[0][0] for s in samples], dtype=np.float64)
    ts = np.log2(np.array([s[1] for s in samples], dtype=np.float64))
    values = np.abs(np.array([s[2] for s in samples], dtype=np.float64))
    top = float(values.max()) or 1.0
    x0, x1 = _pad(float(xs.min()), float(xs.max()))
    t0, t1 = _pad(float(ts.min()), float(ts.max()))
    sx = (WIDTH - 2 * MARGIN) / (x1 - x0)
    st = (HEIGHT - 2 * MARGIN) / (t1 - t0)
    parts.append(_axes("x", "log2 t"))
    for x, t, v in zip(xs, ts, values, strict=True):
        shade = int(round(255 * (1 - v / top)))
        px = MARGIN + (x - x0) * sx
        py = HEIGHT - MARGIN - (t - t0) * st
        parts.append(
            f'<rect x="{px - 2:.2f}" y="{py - 2:.2f}" width="4" height="4" '
            f'fill="rgb(255,{shade},{shade})"/>\n'
        )
    parts.append(_text(WIDTH - MARGIN, MARGIN - 10, f"max |a| = {top:.6g}", anchor="end"))
    parts.append("</svg>\n")
    return "".join(parts)


def _pad(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    return lo, hi


def _open(title: str) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">\n'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
    )
    if title:
        head += _text(WIDTH / 2, MARGIN / 2, title, anchor="middle")
    return head


def _axes(x_label: str, y_label: str) -> str:
    bottom = HEIGHT - MARGIN
    return (
        _tick(MARGIN, bottom, WIDTH - MARGIN, bottom)
        + _tick(MARGIN, MARGIN, MARGIN, bottom)
        + _text(WIDTH / 2, HEIGHT - 15, x_label, anchor="middle")
        + f'<text x="15" y="{HEIGHT / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {HEIGHT / 2:.2f})">{escape(y_label)}</text>\n'
    )


def _tick(x1: float, y1: float, x2: float, y2: float) -> str:
    return f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="black"/>\n'


def _text(x: float, y: float, text: str, anchor: str = "start") -> str:
    return f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}">{escape(text)}</text>\n'
