"""Tiny deterministic SVG scatter/line plots.

Hand-rolled so that identical inputs yield byte-identical files: no
timestamps, no dict-order dependence, fixed decimal formatting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Series", "render_plot"]

_PALETTE = ("#1f6f8b", "#d1495b", "#66a182", "#8d6a9f", "#edae49")


@dataclass(frozen=True)
class Series:
    """One plotted series: a scatter cloud or a polyline."""

    points: np.ndarray
    kind: str = "scatter"  # or "line"
    color: str | None = None
    radius: float = 1.6


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0 or not math.isfinite(span):
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_plot(
    path,
    series: list[Series],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    annotations: list[str] = (),
    size: tuple[int, int] = (640, 480),
) -> None:
    """Write an SVG scatter/line plot; output depends only on arguments."""
    width, height = size
    ml, mr, mt, mb = 62, 16, 34, 46
    pw, ph = width - ml - mr, height - mt - mb

    finite = [
        s.points[np.all(np.isfinite(s.points), axis=1)] for s in series if len(s.points)
    ]
    allpts = np.vstack([p for p in finite if p.shape[0]]) if finite else np.empty((0, 2))
    if allpts.shape[0]:
        x_lo, x_hi = float(allpts[:, 0].min()), float(allpts[:, 0].max())
        y_lo, y_hi = float(allpts[:, 1].min()), float(allpts[:, 1].max())
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    padx, pady = 0.04 * (x_hi - x_lo), 0.04 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - padx, x_hi + padx
    y_lo, y_hi = y_lo - pady, y_hi + pady

    def sx(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#444444" stroke-width="1"/>',
    ]

    out.append('<g class="ticks" font-family="monospace" font-size="11" fill="#333333">')
    for t in _nice_ticks(x_lo + padx, x_hi - padx):
        px = sx(t)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{mt + ph}" x2="{_fmt(px)}" y2="{mt + ph + 4}" '
            'stroke="#444444" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{mt + ph + 17}" text-anchor="middle">{t:.4g}</text>'
        )
    for t in _nice_ticks(y_lo + pady, y_hi - pady):
        py = sy(t)
        out.append(
            f'<line x1="{ml - 4}" y1="{_fmt(py)}" x2="{ml}" y2="{_fmt(py)}" '
            'stroke="#444444" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{ml - 7}" y="{_fmt(py + 4)}" text-anchor="end">{t:.4g}</text>'
        )
    out.append("</g>")

    for i, s in enumerate(series):
        color = s.color or _PALETTE[i % len(_PALETTE)]
        pts = s.points[np.all(np.isfinite(s.points), axis=1)]
        out.append(f'<g class="series series-{s.kind}" id="series-{i}">')
        if s.kind == "line" and pts.shape[0] >= 2:
            coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
            out.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                'stroke-width="1.5"/>'
            )
        else:
            for x, y in pts:
                out.append(
                    f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="{s.radius}" '
                    f'fill="{color}" fill-opacity="0.55"/>'
                )
        out.append("</g>")

    text_y = mt - 12
    if title:
        out.append(
            f'<text x="{width / 2:.0f}" y="{text_y}" text-anchor="middle" '
            f'font-family="monospace" font-size="13" fill="#111111">{title}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{ml + pw / 2:.0f}" y="{height - 10}" text-anchor="middle" '
            f'font-family="monospace" font-size="12" fill="#111111">{xlabel}</text>'
        )
    if ylabel:
        out.append(
            f'<text x="14" y="{mt + ph / 2:.0f}" text-anchor="middle" '
            f'font-family="monospace" font-size="12" fill="#111111" '
            f'transform="rotate(-90 14 {mt + ph / 2:.0f})">{ylabel}</text>'
        )
    for j, note in enumerate(annotations):
        out.append(
            f'<text x="{ml + 8}" y="{mt + 16 + 14 * j}" font-family="monospace" '
            f'font-size="11" fill="#222222" class="annotation">{note}</text>'
        )
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
