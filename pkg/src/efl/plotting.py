"""Deterministic SVG rendering of 3-player preference regions on the simplex.

One panel per player: each sample point of the triangle is colored by the
player's preferred tile set (multi-tile sets blend the tile colors), and
every found cut is marked. Output bytes depend only on the inputs: fixed
palette, fixed 200x200 sampling, fixed float formatting.
"""

from __future__ import annotations

import numpy as np

from .core import InputError

SAMPLES = 200
TILE_COLORS = {1: (228, 26, 28), 2: (55, 126, 184), 3: (77, 175, 74)}
PANEL_W = 320
PANEL_H = 300
MARGIN = 24

# Triangle corners in panel coordinates: tile-1 vertex top, 2 bottom-left, 3 bottom-right.
_V1 = (PANEL_W / 2.0, 30.0)
_V2 = (40.0, PANEL_H - 24.0)
_V3 = (PANEL_W - 40.0, PANEL_H - 24.0)


def _to_xy(x1, x2, x3):
    px = x1 * _V1[0] + x2 * _V2[0] + x3 * _V3[0]
    py = x1 * _V1[1] + x2 * _V2[1] + x3 * _V3[1]
    return px, py


def _barycentric_grid():
    """Row-major SAMPLES x SAMPLES lattice: row fixes x1, column sweeps x2.

    Columns are ordered so the pixel x-coordinate increases along a row.
    """
    rows = []
    for a in range(SAMPLES):
        x1 = a / (SAMPLES - 1.0)
        span = 1.0 - x1
        for b in range(SAMPLES - 1, -1, -1):
            x2 = span * b / (SAMPLES - 1.0)
            rows.append((x1, x2, max(span - x2, 0.0)))
    pts = np.asarray(rows, dtype=np.float64)
    pts /= pts.sum(axis=1, keepdims=True)
    return pts


def _blend(tiles):
    if not tiles:
        return (245, 245, 245)
    rs = [TILE_COLORS[t] for t in tiles]
    return tuple(int(round(sum(c[k] for c in rs) / len(rs))) for k in range(3))


def render_ternary(oracle, divisions):
    """SVG text for a 3-player oracle's regions with division markers."""
    if oracle.arity != 3 or oracle.players != 3:
        raise InputError("plot supports r=3 only")
    pts = _barycentric_grid()
    prefs = oracle.batch(pts)

    width = 3 * PANEL_W + 4 * MARGIN
    height = PANEL_H + 2 * MARGIN + 20
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    thickness = 1.8
    for j in range(3):
        ox = MARGIN + j * (PANEL_W + MARGIN)
        out.append(f'<g transform="translate({ox} {MARGIN})">')
        out.append(
            f'<text x="{PANEL_W / 2:.2f}" y="14" text-anchor="middle" '
            f'font-family="monospace" font-size="13">player {j + 1}</text>'
        )
        for a in range(SAMPLES):
            base = a * SAMPLES
            run_color = None
            run_x0 = run_x1 = run_y = 0.0
            for b in range(SAMPLES):
                idx = base + b
                tiles = tuple(int(t) + 1 for t in np.flatnonzero(prefs[idx, j]))
                color = _blend(tiles)
                px, py = _to_xy(*pts[idx])
                if run_color == color:
                    run_x1 = px
                else:
                    if run_color is not None:
                        out.append(_run_rect(run_color, run_x0, run_x1, run_y, thickness))
                    run_color, run_x0, run_x1, run_y = color, px, px, py
            out.append(_run_rect(run_color, run_x0, run_x1, run_y, thickness))
        tri = " ".join(f"{x:.2f},{y:.2f}" for x, y in (_V1, _V2, _V3))
        out.append(f'<polygon points="{tri}" fill="none" stroke="#222222" stroke-width="1"/>')
        for (vx, vy), label, dy in ((_V1, "x1", -6), (_V2, "x2", 14), (_V3, "x3", 14)):
            out.append(
                f'<text x="{vx:.2f}" y="{vy + dy:.2f}" text-anchor="middle" '
                f'font-family="monospace" font-size="11">{label}</text>'
            )
        for d in divisions:
            px, py = _to_xy(*d.cut.lengths)
            out.append(
                f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="#000000" '
                f'stroke="#ffffff" stroke-width="1.2"/>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _run_rect(color, x0, x1, y, thickness):
    r, g, b = color
    return (
        f'<rect x="{x0 - thickness / 2:.2f}" y="{y - thickness / 2:.2f}" '
        f'width="{x1 - x0 + thickness:.2f}" height="{thickness:.2f}" '
        f'fill="rgb({r},{g},{b})"/>'
    )
