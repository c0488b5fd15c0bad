"""Log-log line chart rendered straight to SVG text (no plotting dependency)."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

__all__ = ["loglog_svg"]

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
DASHES = ["", "6,3", "2,2", "8,3,2,3"]


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _decade_label(k: int) -> str:
    return f"10<tspan baseline-shift=\"super\" font-size=\"9\">{k}</tspan>"


def loglog_svg(
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    *,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    vlines: Mapping[str, float] | None = None,
    width: int = 760,
    height: int = 520,
) -> str:
    """Return an SVG document plotting each series against ``x`` on log axes.

    Series whose values coincide are drawn on top of one another (later ones
    dashed) so overlap stays visible. ``vlines`` draws labelled dashed
    vertical markers.
    """
    if not series:
        raise ValueError("nothing to plot")
    xs = [float(v) for v in x]
    ys_all = [float(v) for s in series.values() for v in s if v > 0]
    if any(v <= 0 for v in xs) or not ys_all:
        raise ValueError("log axes need positive data")
    left, right, top, bottom = 86, 150, 40, 62
    pw, ph = width - left - right, height - top - bottom

    x_lo, x_hi = math.floor(math.log10(min(xs))), math.ceil(math.log10(max(xs)))
    y_lo, y_hi = math.floor(math.log10(min(ys_all))), math.ceil(math.log10(max(ys_all)))
    if y_lo == y_hi:
        y_hi += 1
    if x_lo == x_hi:
        x_hi += 1

    def px(v: float) -> float:
        return left + (math.log10(v) - x_lo) / (x_hi - x_lo) * pw

    def py(v: float) -> float:
        return top + (y_hi - math.log10(v)) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{left + pw / 2:.2f}" y="24" text-anchor="middle" font-size="14">{_esc(title)}</text>')

    # grid and decade ticks
    xstep = max(1, (x_hi - x_lo) // 10)
    for k in range(x_lo, x_hi + 1, xstep):
        X = px(10.0**k)
        out.append(f'<line x1="{X:.2f}" y1="{top}" x2="{X:.2f}" y2="{top + ph}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 18}" text-anchor="middle">{_decade_label(k)}</text>')
    ystep = max(1, (y_hi - y_lo) // 12)
    for k in range(y_lo, y_hi + 1, ystep):
        Y = py(10.0**k)
        out.append(f'<line x1="{left}" y1="{Y:.2f}" x2="{left + pw}" y2="{Y:.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end">{_decade_label(k)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')

    for label, xv in (vlines or {}).items():
        X = px(xv)
        out.append(
            f'<line x1="{X:.2f}" y1="{top}" x2="{X:.2f}" y2="{top + ph}" stroke="#555" '
            f'stroke-dasharray="5,4" class="marker"/>'
        )
        out.append(f'<text x="{X + 3:.2f}" y="{top + 14}" fill="#555">{_esc(label)}</text>')

    seen: dict[tuple, int] = {}
    for i, (name, ys) in enumerate(series.items()):
        key = tuple(float(v) for v in ys)
        dup = seen.get(key, 0)
        seen[key] = dup + 1
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys) if b > 0)
        color = COLORS[i % len(COLORS)]
        dash = f' stroke-dasharray="{DASHES[dup % len(DASHES)]}"' if dup else ""
        out.append(
            f'<polyline class="series" data-name="{_esc(name)}" fill="none" stroke="{color}" '
            f'stroke-width="2"{dash} points="{pts}"/>'
        )
        ly = top + 16 + 18 * i
        out.append(
            f'<line x1="{left + pw + 14}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" stroke="{color}" '
            f'stroke-width="2"{dash}/>'
        )
        out.append(f'<text x="{left + pw + 46}" y="{ly + 4}">{_esc(name)}</text>')

    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 16}" text-anchor="middle">{_esc(x_label)}</text>')
    out.append(
        f'<text x="18" y="{top + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.2f})">{_esc(y_label)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
