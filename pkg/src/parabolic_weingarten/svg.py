"""Minimal SVG of profile curves in the ``(x, z)`` half-plane.

Coordinates are rounded to 1e-6 so output is bit-stable across runs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .analysis import polyline
from .ode import Trace

WIDTH = 600.0
HEIGHT = 400.0
MARGIN = 30.0


def _fmt(v: float) -> str:
    r = round(float(v), 6) + 0.0
    text = f"{r:.6f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def _frame(curves: list[np.ndarray]) -> tuple[float, float, float, float]:
    allp = np.concatenate(curves)
    x0, x1 = float(allp[:, 0].min()), float(allp[:, 0].max())
    z1 = float(allp[:, 1].max())
    # the boundary line z = 0 is always in view
    pad = 0.05 * max(x1 - x0, z1, 1e-9)
    return x0 - pad, x1 + pad, 0.0, z1 + pad


def profile_svg(curves, title: str = "", clip_length: float | None = None) -> str:
    """SVG text with one polyline per curve plus the boundary line and a vertical axis.

    ``curves`` holds traces or ``(n, 2)`` point arrays.  ``clip_length``
    keeps only states with ``|s| <= clip_length`` from traces.
    """
    pts = []
    for c in curves:
        if isinstance(c, Trace):
            p = polyline(c)
            if clip_length is not None:
                keep = np.abs(c.s) <= clip_length
                p = np.column_stack([c.x[keep], c.z[keep]]) if keep.sum() < len(c) else p
            pts.append(p)
        else:
            pts.append(np.asarray(c, dtype=float).reshape(-1, 2))
    if not pts or all(len(p) == 0 for p in pts):
        raise ValueError("nothing to draw")
    x0, x1, z0, z1 = _frame([p for p in pts if len(p)])
    scale = min((WIDTH - 2 * MARGIN) / (x1 - x0), (HEIGHT - 2 * MARGIN) / (z1 - z0))

    def to_px(x, z):
        return MARGIN + (x - x0) * scale, HEIGHT - MARGIN - (z - z0) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(WIDTH)}" height="{_fmt(HEIGHT)}" '
           f'viewBox="0 0 {_fmt(WIDTH)} {_fmt(HEIGHT)}">']
    if title:
        out.append(f"<title>{title}</title>")
    lx0, ly = to_px(x0, 0.0)
    lx1, _ = to_px(x1, 0.0)
    out.append(f'<line x1="{_fmt(lx0)}" y1="{_fmt(ly)}" x2="{_fmt(lx1)}" y2="{_fmt(ly)}" '
               'stroke="#888" stroke-width="1"/>')
    if x0 <= 0.0 <= x1:
        ax, ay0 = to_px(0.0, z0)
        _, ay1 = to_px(0.0, z1)
        out.append(f'<line x1="{_fmt(ax)}" y1="{_fmt(ay0)}" x2="{_fmt(ax)}" y2="{_fmt(ay1)}" '
                   'stroke="#ccc" stroke-width="1" stroke-dasharray="4 3"/>')
    for p in pts:
        if len(p) == 0:
            continue
        px, py = to_px(p[:, 0], p[:, 1])
        coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        out.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{coords}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(curves, path, **kw) -> Path:
    path = Path(path)
    path.write_text(profile_svg(curves, **kw))
    return path
