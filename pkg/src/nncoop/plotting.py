"""Static SVG line charts of coverage curves, written without a plotting library."""
from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
_W, _H = 460, 340
_LEFT, _RIGHT, _TOP, _BOTTOM = 56, 16, 34, 46


def _label(curve):
    if curve.method == "mc":
        return f"{curve.model} {curve.scheme} (MC)"
    return f"{curve.model} {curve.scheme} (analytic)"


def _panel(parts, x0, title, curves, x_range):
    pw = _W - _LEFT - _RIGHT
    ph = _H - _TOP - _BOTTOM
    lo, hi = x_range

    def sx(v):
        return x0 + _LEFT + (v - lo) / (hi - lo) * pw

    def sy(v):
        return _TOP + (1.0 - v) * ph

    parts.append(f'<text x="{x0 + _W / 2:.1f}" y="20" text-anchor="middle" '
                 f'font-size="13">{escape(title)}</text>')
    for k in range(6):
        y = k / 5
        parts.append(f'<line x1="{sx(lo):.1f}" y1="{sy(y):.1f}" x2="{sx(hi):.1f}" y2="{sy(y):.1f}" '
                     f'stroke="#ddd"/>')
        parts.append(f'<text x="{sx(lo) - 6:.1f}" y="{sy(y) + 4:.1f}" text-anchor="end" '
                     f'font-size="10">{y:.1f}</text>')
    for v in np.linspace(lo, hi, 7):
        parts.append(f'<line x1="{sx(v):.1f}" y1="{sy(0):.1f}" x2="{sx(v):.1f}" y2="{sy(0) + 4:.1f}" '
                     f'stroke="#333"/>')
        parts.append(f'<text x="{sx(v):.1f}" y="{sy(0) + 16:.1f}" text-anchor="middle" '
                     f'font-size="10">{v:g}</text>')
    parts.append(f'<rect x="{sx(lo):.1f}" y="{sy(1):.1f}" width="{pw}" height="{ph}" '
                 f'fill="none" stroke="#333"/>')
    parts.append(f'<text x="{sx((lo + hi) / 2):.1f}" y="{_H - 8}" text-anchor="middle" '
                 f'font-size="11">threshold T [dB]</text>')
    parts.append(f'<text x="{x0 + 14}" y="{sy(0.5):.1f}" font-size="11" text-anchor="middle" '
                 f'transform="rotate(-90 {x0 + 14} {sy(0.5):.1f})">coverage probability</text>')

    for i, c in enumerate(curves):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(c.t_db, c.values))
        dash = ' stroke-dasharray="5,3"' if c.method == "mc" else ""
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>')
        if c.method == "mc":
            for x, y in zip(c.t_db, c.values):
                parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2" fill="{color}"/>')
        ly = _TOP + 14 + 14 * i
        lx = sx(hi) - 190
        parts.append(f'<line x1="{lx:.1f}" y1="{ly - 4}" x2="{lx + 18:.1f}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.6"{dash}/>')
        parts.append(f'<text x="{lx + 22:.1f}" y="{ly}" font-size="10">{escape(_label(c))}</text>')


def render_svg(panels):
    """``panels`` is a list of ``(title, curves)``; returns the SVG text."""
    if not panels:
        raise ValueError("nothing to plot")
    all_t = np.concatenate([c.t_db for _, cs in panels for c in cs]) if any(
        cs for _, cs in panels) else np.array([0.0, 1.0])
    x_range = (float(all_t.min()), float(all_t.max()))
    if x_range[1] <= x_range[0]:
        x_range = (x_range[0] - 1.0, x_range[0] + 1.0)
    width = _W * len(panels)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{_H}" '
             f'viewBox="0 0 {width} {_H}" font-family="sans-serif">',
             f'<rect width="{width}" height="{_H}" fill="white"/>']
    for k, (title, curves) in enumerate(panels):
        _panel(parts, k * _W, title, curves, x_range)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, panels):
    Path(path).write_text(render_svg(panels))
