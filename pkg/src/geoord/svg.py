"""Minimal SVG rendering of curves and motions.

Planar data is drawn as is, sphere points by orthographic projection onto the
xy-plane, and motions by their translation path.  Motions with a rotation get
a short glyph (the rotated x-axis) at every m-th sample.
"""
from __future__ import annotations

import numpy as np

SIZE = 400.0
MARGIN = 20.0
GLYPH = 12.0


def _fmt(x):
    return f"{x:.3f}"


def _frame(xy):
    lo = xy.min(axis=0)
    span = float(max((xy.max(axis=0) - lo).max(), 1e-12))
    scale = (SIZE - 2 * MARGIN) / span

    def tr(p):
        return MARGIN + (p[0] - lo[0]) * scale, SIZE - MARGIN - (p[1] - lo[1]) * scale

    return tr


def render(xy, closed=False, directions=None, every=1):
    """SVG text for the polyline through ``xy`` (n, 2).

    ``directions`` (n, 2) gives glyph directions; glyphs are drawn at samples
    0, every, 2 * every, ...  An empty ``xy`` gives an empty document.
    """
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE:.0f}" height="{SIZE:.0f}" '
            f'viewBox="0 0 {SIZE:.0f} {SIZE:.0f}">\n')
    if len(xy) == 0:
        return head + "</svg>\n"
    tr = _frame(xy)
    pts = [tr(p) for p in xy]
    d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in pts)
    if closed:
        d += " Z"
    lines = [head, f'<path class="curve" d="{d}" fill="none" stroke="black" stroke-width="1.5"/>\n']
    if directions is not None:
        every = max(1, int(every))
        dirs = np.asarray(directions, dtype=float).reshape(-1, 2)
        for i in range(0, len(pts), every):
            x, y = pts[i]
            u = dirs[i]
            nrm = float(np.hypot(*u))
            if nrm > 0:
                u = u / nrm
            lines.append(f'<line class="glyph" x1="{_fmt(x)}" y1="{_fmt(y)}" '
                         f'x2="{_fmt(x + GLYPH * u[0])}" y2="{_fmt(y - GLYPH * u[1])}" '
                         f'stroke="red" stroke-width="1"/>\n')
    lines.append("</svg>\n")
    return "".join(lines)


def sample_geometry(manifold, points):
    """(xy, directions) for sample-file points of the given manifold."""
    P = np.asarray(points, dtype=float)
    if len(P) == 0:
        return np.zeros((0, 2)), None
    if manifold in ("plane", "s2"):
        return P[:, :2], None
    if manifold == "se2":
        return P[:, 1:3], np.column_stack([np.cos(P[:, 0]), np.sin(P[:, 0])])
    if manifold == "scaled_se2":
        return P[:, 2:4], np.column_stack([np.cos(P[:, 1]), np.sin(P[:, 1])])
    if manifold == "se3":
        return P[:, :2, 3], P[:, :2, 0]
    # unknown: translation-only fallback
    return P.reshape(len(P), -1)[:, :2], None


def motion_geometry(curve):
    """(xy, directions) for a MotionCurve."""
    if len(curve) == 0:
        return np.zeros((0, 2)), None
    d = np.asarray(curve.translations)
    if curve.kind == "se3":
        return d[:, :2], np.asarray(curve.rotations)[:, :2, 0]
    th = np.asarray(curve.rotations)
    return d[:, :2], np.column_stack([np.cos(th), np.sin(th)])
