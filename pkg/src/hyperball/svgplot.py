"""Tiny dependency-free SVG line plots (axes, ticks, one or more polylines)."""

from __future__ import annotations

import math

__all__ = ["line_plot"]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]


def _ticks(lo: float, hi: float, target: int = 6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * span:
        out.append(t)
        t += step
    return out


def line_plot(path, xs, series, title: str = "", xlabel: str = "", ylabel: str = "",
              logy: bool = False, width: int = 720, height: int = 480) -> None:
    """Write an SVG plot of one or more (label, y-array) series over xs."""
    ml, mr, mt, mb = 64, 16, 32, 48
    pw, ph = width - ml - mr, height - mt - mb
    xs = list(map(float, xs))
    prepared = []
    for label, ys in series:
        ys = [float(v) for v in ys]
        if logy:
            ys = [math.log10(v) if v > 0 else float("nan") for v in ys]
        prepared.append((label, ys))
    all_y = [v for _, ys in prepared for v in ys if v == v]
    if not all_y:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(all_y), max(all_y)
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0

    def X(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def Y(y):
        return mt + (1.0 - (y - y0) / (y1 - y0)) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for t in _ticks(x0, x1):
        parts.append(f'<line x1="{X(t):.1f}" y1="{mt + ph}" x2="{X(t):.1f}" y2="{mt + ph + 5}" stroke="#333"/>')
        parts.append(f'<text x="{X(t):.1f}" y="{mt + ph + 20}" font-size="11" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        label = f"1e{t:.3g}" if logy else f"{t:.4g}"
        parts.append(f'<line x1="{ml - 5}" y1="{Y(t):.1f}" x2="{ml}" y2="{Y(t):.1f}" stroke="#333"/>')
        parts.append(f'<text x="{ml - 8}" y="{Y(t) + 4:.1f}" font-size="11" text-anchor="end">{label}</text>')
        parts.append(f'<line x1="{ml}" y1="{Y(t):.1f}" x2="{ml + pw}" y2="{Y(t):.1f}" stroke="#eee"/>')
    for i, (label, ys) in enumerate(prepared):
        pts = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in zip(xs, ys) if y == y)
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if label:
            parts.append(f'<text x="{ml + pw - 8}" y="{mt + 16 + 14 * i}" font-size="12" '
                         f'text-anchor="end" fill="{color}">{label}</text>')
    if title:
        parts.append(f'<text x="{ml + pw / 2}" y="{mt - 10}" font-size="13" text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{ml + pw / 2}" y="{height - 10}" font-size="12" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{mt + ph / 2}" font-size="12" text-anchor="middle" '
                     f'transform="rotate(-90 16 {mt + ph / 2})">{ylabel}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
