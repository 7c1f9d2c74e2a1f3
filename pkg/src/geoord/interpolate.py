"""Upsample ordered motion samples into a smooth motion.

Three schemes: piecewise metric geodesics, geodesic rotations with a natural
cubic spline through the translations, and cubic de Casteljau on SE(3) from
two end frames and their body velocities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AntipodalRotation, TooFewNodes
from .liegroup import (
    ANTIPODAL_TOL,
    PlanarMotion,
    RigidMotion3,
    Twist,
    exp_so3,
    geodesic_se3_arrays,
    log_se3_arrays,
    log_so3,
    relative_rotation,
    riemannian_exp,
    wrap_angle,
)
from .reconstruct import OrderedPath
from .sampling import SampleSet

SCHEMES = ("geodesic", "partial_geodesic", "de_casteljau")


@dataclass(frozen=True, eq=False)
class MotionCurve:
    """Samples of a motion at parameters 0 = t_0 < ... < t_m = 1.

    ``kind`` is 'se3' (rotations (m, 3, 3), translations (m, 3)) or 'se2'
    (rotations are angles (m,), translations (m, 2)).
    """

    params: np.ndarray
    rotations: np.ndarray
    translations: np.ndarray
    kind: str = "se3"
    scheme: str = "geodesic"

    def __post_init__(self):
        t = np.array(self.params, dtype=float)
        R = np.array(self.rotations, dtype=float)
        d = np.array(self.translations, dtype=float)
        if self.kind not in ("se3", "se2"):
            raise ValueError(f"unknown motion kind {self.kind!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if len(t) and (t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0)):
            raise ValueError("params must increase strictly from 0 to 1")
        if len(R) != len(t) or len(d) != len(t):
            raise ValueError("params, rotations and translations differ in length")
        if self.kind == "se3" and len(R):
            err = np.abs(np.swapaxes(R, 1, 2) @ R - np.eye(3)).max()
            if err > 1e-9:
                raise ValueError(f"rotation blocks are not orthonormal (error {err:.2e})")
        for x in (t, R, d):
            x.setflags(write=False)
        object.__setattr__(self, "params", t)
        object.__setattr__(self, "rotations", R)
        object.__setattr__(self, "translations", d)

    def __len__(self):
        return len(self.params)

    @property
    def samples(self):
        if self.kind == "se3":
            return [RigidMotion3(r, d) for r, d in zip(self.rotations, self.translations)]
        return [PlanarMotion(th, *d) for th, d in zip(self.rotations, self.translations)]

    def to_records(self):
        out = []
        for t, r, d in zip(self.params, self.rotations, self.translations):
            rec = {"t": float(t)}
            if self.kind == "se3":
                rec["rotation"] = [float(x) for x in r.ravel()]
            else:
                rec["theta"] = float(r)
            rec["translation"] = [float(x) for x in d]
            out.append(rec)
        return out

    @classmethod
    def from_records(cls, recs, scheme="geodesic"):
        if not recs:
            return cls(np.zeros(0), np.zeros((0, 3, 3)), np.zeros((0, 3)), "se3", scheme)
        t = [r["t"] for r in recs]
        d = [r["translation"] for r in recs]
        if "rotation" in recs[0]:
            R = [np.reshape(r["rotation"], (3, 3)) for r in recs]
            return cls(t, R, d, "se3", scheme)
        return cls(t, [r["theta"] for r in recs], d, "se2", scheme)


@dataclass(frozen=True, eq=False)
class BoundaryData:
    g0: RigidMotion3
    g1: RigidMotion3
    v0: Twist
    v1: Twist

    def __post_init__(self):
        if np.trace(relative_rotation(self.g0.r, self.g1.r)) <= -1.0 + ANTIPODAL_TOL:
            raise AntipodalRotation("end frames are rotated by pi relative to each other")


def _nodes(p: OrderedPath, s: SampleSet):
    if s.manifold not in ("se3", "se2"):
        raise ValueError(f"interpolation needs se3 or se2 samples, not {s.manifold}")
    if len(p.order) != len(s):
        raise ValueError("path and sample set differ in size")
    idx = list(p.order) + ([p.order[0]] if p.closed and len(p.order) > 2 else [])
    P = s.points[idx]
    if s.manifold == "se3":
        return "se3", P[:, :3, :3], P[:, :3, 3]
    return "se2", P[:, 0], P[:, 1:]


def _grid(m, k):
    """Global and local parameters for m nodes, k steps per segment.

    t = (i k + j) / ((m - 1) k) is formed from integers, so doubling k
    reproduces every earlier parameter bit for bit."""
    if k < 1:
        raise ValueError("k must be at least 1")
    i = np.repeat(np.arange(m - 1), k)
    j = np.tile(np.arange(k), m - 1)
    seg = np.append(i, m - 2)
    loc = np.append(j / k, 1.0)
    t = np.append((i * k + j) / ((m - 1) * k), 1.0)
    return t, seg, loc


def _segment_rotations(kind, rots, seg, loc):
    m = len(rots)
    if kind == "se2":
        dth = wrap_angle(rots[1:] - rots[:-1])
        return rots[seg] + loc * dth[seg]
    out = np.empty((len(seg), 3, 3))
    for a in range(m - 1):
        sel = seg == a
        w0 = log_so3(relative_rotation(rots[a], rots[a + 1]))
        out[sel] = rots[a] @ exp_so3(loc[sel, None] * w0)
    # the curve passes through every node exactly
    out[loc == 0.0] = rots[seg[loc == 0.0]]
    out[-1] = rots[-1]
    return out


def _check_nodes(m):
    if m < 2:
        raise TooFewNodes("need at least two nodes")


def interpolate_geodesic(p: OrderedPath, s: SampleSet, k: int) -> MotionCurve:
    """Piecewise geodesics; k steps per segment."""
    kind, rots, trans = _nodes(p, s)
    _check_nodes(len(rots))
    t, seg, loc = _grid(len(rots), k)
    R = _segment_rotations(kind, rots, seg, loc)
    d = (1.0 - loc)[:, None] * trans[seg] + loc[:, None] * trans[np.minimum(seg + 1, len(rots) - 1)]
    d[loc == 0.0] = trans[seg[loc == 0.0]]
    d[-1] = trans[-1]
    return MotionCurve(t, R, d, kind, "geodesic")


def interpolate_partial_geodesic(p: OrderedPath, s: SampleSet, k: int) -> MotionCurve:
    """Geodesic rotations; translations from a natural cubic spline through
    all node translations, knots uniform in segment index."""
    kind, rots, trans = _nodes(p, s)
    m = len(rots)
    if m < 3:
        raise TooFewNodes("the translation spline needs at least three nodes")
    t, seg, loc = _grid(m, k)
    R = _segment_rotations(kind, rots, seg, loc)
    knots = np.arange(m) / (m - 1)
    d = CubicSpline(knots, trans, bc_type="natural")(t)
    d[loc == 0.0] = trans[seg[loc == 0.0]]
    d[-1] = trans[-1]
    return MotionCurve(t, R, d, kind, "partial_geodesic")


def control_frames(b: BoundaryData):
    """b0 = g0, b1 = g0 moved along v0/3, b2 = g1 moved along -v1/3, b3 = g1,
    moving along metric geodesics with body-frame velocity."""
    return (b.g0, riemannian_exp(b.g0, b.v0.scaled(1.0 / 3.0)),
            riemannian_exp(b.g1, b.v1.scaled(-1.0 / 3.0)), b.g1)


def _geo(a, c, t):
    R, d = geodesic_se3_arrays(a, c, [t])
    return RigidMotion3(R[0], d[0])


def decasteljau_point(ctrl, t):
    pts = list(ctrl)
    while len(pts) > 1:
        pts = [_geo(a, c, t) for a, c in zip(pts[:-1], pts[1:])]
    return pts[0]


def interpolate_decasteljau(b: BoundaryData, k: int) -> MotionCurve:
    """Cubic de Casteljau through three levels of geodesic interpolation,
    sampled at k uniform parameters.  The ends are exact and the body
    velocities there are v0 and v1."""
    if k < 2:
        raise ValueError("k must be at least 2")
    ctrl = control_frames(b)
    ts = np.linspace(0.0, 1.0, k)
    pts = [decasteljau_point(ctrl, t) for t in ts[1:-1]]
    pts = [b.g0] + pts + [b.g1]
    return MotionCurve(ts, [g.r for g in pts], [g.d for g in pts], "se3", "de_casteljau")


def body_velocity_fd(curve_fn, t, h=1e-6):
    """Central difference of log(g(t-h)^-1 g(t+h)) / 2h, one-sided at the ends."""
    a, c = max(t - h, 0.0), min(t + h, 1.0)
    ga, gc = curve_fn(a), curve_fn(c)
    rel = ga.inverse() @ gc
    w, v = log_se3_arrays(rel.r, rel.d)
    return Twist(w / (c - a), v / (c - a))


INTERPOLATORS = {
    "geodesic": interpolate_geodesic,
    "partial_geodesic": interpolate_partial_geodesic,
}
