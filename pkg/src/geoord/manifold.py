"""Sphere metric geometry and geodesics on the bilinear patch x(u, v) = (u, v, uv)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .errors import NoConvergence, RadiusMismatch


@dataclass(frozen=True, eq=False)
class SpherePoint:
    p: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (3,):
            raise ValueError("sphere point needs 3 coordinates")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if abs(np.linalg.norm(p) - self.radius) > 1e-9:
            raise ValueError(f"|p| = {np.linalg.norm(p)!r} is not the radius {self.radius!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_direction(cls, x, radius=1.0):
        x = np.asarray(x, dtype=float)
        return cls(radius * x / np.linalg.norm(x), radius)


def sphere_dist(a: SpherePoint, b: SpherePoint) -> float:
    """Great-circle distance."""
    if a.radius != b.radius:
        raise RadiusMismatch(f"radii differ: {a.radius} vs {b.radius}")
    R = a.radius
    return R * sphere_angle(a.p / R, b.p / R)


def sphere_angle(x, y):
    """Angle between unit vectors, vectorised over leading axes.

    atan2 of cross and dot keeps full precision near 0 and pi, where arccos of
    a clamped dot product loses half the digits.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cr = np.linalg.norm(np.cross(x, y), axis=-1)
    dot = np.sum(x * y, axis=-1)
    out = np.arctan2(cr, dot)
    return float(out) if out.ndim == 0 else out


def sphere_injectivity_radius(R: float) -> float:
    """Distance from any point to its cut locus (the antipode): pi R."""
    if not R > 0:
        raise ValueError("radius must be positive")
    return math.pi * R


def great_circle_feature_size(R: float) -> float:
    """Distance from a great circle to its medial axis (the two poles)."""
    return 0.5 * math.pi * R


def slerp(x, y, t):
    """Great-circle interpolation between unit vectors x and y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    omega = sphere_angle(x, y)
    if omega < 1e-12:
        out = (1 - t) * x + t * y
    else:
        so = math.sin(omega)
        out = (np.sin((1 - t) * omega) / so) * x + (np.sin(t * omega) / so) * y
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


@dataclass(frozen=True)
class SurfaceParamPoint:
    u: float
    v: float

    def embed(self):
        return np.array([self.u, self.v, self.u * self.v])


def first_fundamental_form(q: SurfaceParamPoint):
    """(E, F, G) of the patch (u, v, uv) at q."""
    return 1.0 + q.v * q.v, q.u * q.v, 1.0 + q.u * q.u


def curve_length(u, v):
    """Length of the node polyline (u_i, v_i) under the first fundamental form,
    with E, F, G taken at segment midpoints."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    du = np.diff(u)
    dv = np.diff(v)
    um = 0.5 * (u[1:] + u[:-1])
    vm = 0.5 * (v[1:] + v[:-1])
    E = 1.0 + vm * vm
    F = um * vm
    G = 1.0 + um * um
    return float(np.sum(np.sqrt(E * du * du + 2 * F * du * dv + G * dv * dv)))


@dataclass(frozen=True, eq=False)
class GeodesicSolution:
    u: np.ndarray
    v: np.ndarray
    residual: float
    length: float
    iterations: int = 0

    @property
    def nodes(self):
        return [SurfaceParamPoint(a, b) for a, b in zip(self.u, self.v)]


def geodesic_residual(u, v, h):
    """Central-difference residual of the geodesic equations at interior nodes."""
    ui, vi = u[1:-1], v[1:-1]
    du = (u[2:] - u[:-2]) / (2 * h)
    dv = (v[2:] - v[:-2]) / (2 * h)
    D = 1.0 + ui * ui + vi * vi
    P = du * dv
    ru = (u[2:] - 2 * ui + u[:-2]) / (h * h) + 2 * vi / D * P
    rv = (v[2:] - 2 * vi + v[:-2]) / (h * h) + 2 * ui / D * P
    return ru, rv


def _jacobian(u, v, h):
    m = len(u) - 2
    ui, vi = u[1:-1], v[1:-1]
    du = (u[2:] - u[:-2]) / (2 * h)
    dv = (v[2:] - v[:-2]) / (2 * h)
    D = 1.0 + ui * ui + vi * vi
    P = du * dv
    cu = 2 * vi / D
    cv = 2 * ui / D
    ih2 = 1.0 / (h * h)
    i2h = 1.0 / (2 * h)
    rows, cols, vals = [], [], []

    def put(r, c, x, mask=None):
        if mask is None:
            mask = np.ones(m, dtype=bool)
        rows.append(r[mask])
        cols.append(c[mask])
        vals.append(np.broadcast_to(x, (m,))[mask])

    k = np.arange(m)
    ru_row, rv_row = 2 * k, 2 * k + 1
    u_col, v_col = 2 * k, 2 * k + 1
    has_prev = k > 0
    has_next = k < m - 1
    # residual of the u equation
    put(ru_row, u_col, -2 * ih2 + (-4 * ui * vi / D**2) * P)
    put(ru_row, v_col, (2 / D - 4 * vi * vi / D**2) * P)
    put(ru_row, u_col - 2, ih2 - cu * dv * i2h, has_prev)
    put(ru_row, u_col + 2, ih2 + cu * dv * i2h, has_next)
    put(ru_row, v_col - 2, -cu * du * i2h, has_prev)
    put(ru_row, v_col + 2, cu * du * i2h, has_next)
    # residual of the v equation
    put(rv_row, v_col, -2 * ih2 + (-4 * ui * vi / D**2) * P)
    put(rv_row, u_col, (2 / D - 4 * ui * ui / D**2) * P)
    put(rv_row, v_col - 2, ih2 - cv * du * i2h, has_prev)
    put(rv_row, v_col + 2, ih2 + cv * du * i2h, has_next)
    put(rv_row, u_col - 2, -cv * dv * i2h, has_prev)
    put(rv_row, u_col + 2, cv * dv * i2h, has_next)
    return sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(2 * m, 2 * m)
    )


def bilinear_geodesic_bvp(p0: SurfaceParamPoint, p1: SurfaceParamPoint, n_nodes: int = 1001,
                          tol: float = 1e-8, max_iter: int = 200, max_halvings: int = 30) -> GeodesicSolution:
    """Geodesic between p0 and p1 on the patch (u, v, uv).

    Finite-difference collocation on a uniform grid in t in [0, 1], solved by
    damped Newton from the straight parameter line.  Raises NoConvergence with
    the best iterate attached if the residual stays above ``tol``.
    """
    if n_nodes < 10:
        raise ValueError("n_nodes must be at least 10")
    t = np.linspace(0.0, 1.0, n_nodes)
    h = 1.0 / (n_nodes - 1)
    u = p0.u + (p1.u - p0.u) * t
    v = p0.v + (p1.v - p0.v) * t
    u[0], u[-1], v[0], v[-1] = p0.u, p1.u, p0.v, p1.v

    def max_res(u, v):
        ru, rv = geodesic_residual(u, v, h)
        return max(np.max(np.abs(ru)), np.max(np.abs(rv)))

    res = max_res(u, v)
    it = 0
    while res >= tol and it < max_iter:
        it += 1
        ru, rv = geodesic_residual(u, v, h)
        F = np.empty(2 * len(ru))
        F[0::2], F[1::2] = ru, rv
        step = spsolve(_jacobian(u, v, h), -F)
        lam = 1.0
        for _ in range(max_halvings + 1):
            un, vn = u.copy(), v.copy()
            un[1:-1] += lam * step[0::2]
            vn[1:-1] += lam * step[1::2]
            new = max_res(un, vn)
            if new < res:
                break
            lam *= 0.5
        else:
            break
        u, v, res = un, vn, new

    sol = GeodesicSolution(u, v, float(res), curve_length(u, v), it)
    if res >= tol:
        raise NoConvergence(f"residual {res:.3e} after {it} Newton iterations", sol)
    return sol
