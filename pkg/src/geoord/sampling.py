"""Sample sets on the supported manifolds, their metrics, and density checks.

A sample is dense when consecutive points are within epsilon and epsilon is
below both the curve's smallest feature size and the manifold's injectivity
radius.  Feature sizes are supplied per curve (analytic or brute force, see
``curve_reach``); general medial-axis computation is not attempted.
"""
from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AntipodalRotation, DuplicatePoints, EmptySample
from .liegroup import (
    MetricWeights,
    PlanarMotion,
    RigidMotion3,
    ScaledPlanarMotion,
    dist_scaled_se2,
    dist_se2,
    dist_se3,
    exp_so3,
    log_so3,
    relative_rotation,
    wrap_angle,
)
from .manifold import SpherePoint, slerp, sphere_angle, sphere_injectivity_radius

MANIFOLDS = ("plane", "s2", "se2", "scaled_se2", "se3")
POINT_SHAPE = {"plane": (2,), "s2": (3,), "se2": (3,), "scaled_se2": (4,), "se3": (4, 4)}
EUCLIDEAN_INJECTIVITY = sys.float_info.max
DUPLICATE_TOL = 1e-12


def default_workers():
    env = os.environ.get("GEOORD_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Unordered samples of one manifold plus the metric parameters.

    ``points`` has shape (n,) + POINT_SHAPE[manifold]: plane (x, y), s2 (x, y, z)
    on the sphere of ``radius``, se2 (theta, u, v), scaled_se2
    (lambda, theta, dx, dy), se3 4x4 homogeneous matrices.
    """

    manifold: str
    points: np.ndarray
    weights: MetricWeights = field(default_factory=MetricWeights)
    radius: float = 1.0

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise ValueError(f"unknown manifold {self.manifold!r}")
        pts = np.array(self.points, dtype=float)
        shape = POINT_SHAPE[self.manifold]
        if pts.ndim == len(shape) and len(pts) == 0:
            pts = pts.reshape((0,) + shape)
        if pts.shape[1:] != shape:
            raise ValueError(f"{self.manifold} points need shape (n, {shape}), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if self.manifold == "s2":
            if not self.radius > 0:
                raise ValueError("radius must be positive")
            if len(pts) and np.max(np.abs(np.linalg.norm(pts, axis=1) - self.radius)) > 1e-9:
                raise ValueError("s2 points must lie on the sphere of the given radius")
        if self.manifold == "se3" and len(pts):
            R = pts[:, :3, :3]
            err = np.linalg.norm(np.swapaxes(R, 1, 2) @ R - np.eye(3), axis=(1, 2))
            if np.max(err) > 1e-9 or np.max(np.abs(np.linalg.det(R) - 1.0)) > 1e-9:
                raise ValueError("se3 rotation blocks must be in SO(3)")
            if np.any(pts[:, 3] != np.array([0.0, 0.0, 0.0, 1.0])):
                raise ValueError("se3 bottom row must be (0, 0, 0, 1)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @classmethod
    def from_elements(cls, elements, weights=None):
        """Build from typed values (PlanarMotion, RigidMotion3, SpherePoint, ...)."""
        elements = list(elements)
        weights = weights or MetricWeights()
        if not elements:
            raise EmptySample("no elements")
        first = elements[0]
        if isinstance(first, RigidMotion3):
            return cls("se3", [e.matrix() for e in elements], weights)
        if isinstance(first, PlanarMotion):
            return cls("se2", [e.as_array() for e in elements], weights)
        if isinstance(first, ScaledPlanarMotion):
            return cls("scaled_se2", [e.as_array() for e in elements], weights)
        if isinstance(first, SpherePoint):
            return cls("s2", [e.p for e in elements], weights, first.radius)
        return cls("plane", elements, weights)

    def element(self, i):
        x = self.points[i]
        if self.manifold == "se3":
            return RigidMotion3.from_matrix(x)
        if self.manifold == "se2":
            return PlanarMotion(*x)
        if self.manifold == "scaled_se2":
            return ScaledPlanarMotion(x[0], x[1], (x[2], x[3]))
        if self.manifold == "s2":
            return SpherePoint(x, self.radius)
        return x.copy()

    def take(self, idx):
        return SampleSet(self.manifold, self.points[np.asarray(idx, dtype=int)], self.weights, self.radius)

    def distance(self, i, j):
        return point_distance(self.manifold, self.points[i], self.points[j], self.weights, self.radius)

    def distance_matrix(self, workers=None):
        return pairwise_distances(self, workers)

    def injectivity_radius(self):
        return injectivity_radius(self.manifold, self.weights, self.radius)


def point_distance(manifold, x, y, weights=MetricWeights(), radius=1.0):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if manifold == "plane":
        return math.hypot(x[0] - y[0], x[1] - y[1])
    if manifold == "s2":
        return radius * sphere_angle(x / radius, y / radius)
    if manifold == "se2":
        return dist_se2(PlanarMotion(*x), PlanarMotion(*y), weights)
    if manifold == "scaled_se2":
        return dist_scaled_se2(ScaledPlanarMotion(x[0], x[1], x[2:]), ScaledPlanarMotion(y[0], y[1], y[2:]), weights)
    if manifold == "se3":
        return dist_se3(RigidMotion3.from_matrix(x), RigidMotion3.from_matrix(y), weights)
    raise ValueError(f"unknown manifold {manifold!r}")


def _symmetrize(D):
    U = np.triu(D, 1)
    return U + U.T


def pairwise_distances(s: SampleSet, workers=None):
    """Full symmetric distance matrix with zero diagonal.

    SE(3) rows go through the selected kernel backend, split across a thread
    pool (``workers`` or GEOORD_THREADS, default: CPU count) for large sets.
    """
    P = s.points
    n = len(P)
    w = s.weights
    if s.manifold == "se3":
        return _se3_matrix(P, w, workers)
    if s.manifold == "plane":
        diff = P[:, None, :] - P[None, :, :]
        D = np.sqrt(np.sum(diff * diff, axis=-1))
    elif s.manifold == "s2":
        U = P / s.radius
        D = s.radius * sphere_angle(U[:, None, :], U[None, :, :])
    elif s.manifold == "se2":
        dt = wrap_angle(P[:, None, 0] - P[None, :, 0])
        dd = P[:, None, 1:] - P[None, :, 1:]
        D = np.sqrt(w.alpha * dt * dt + w.beta * np.sum(dd * dd, axis=-1))
    else:  # scaled_se2
        dl = P[:, None, 0] - P[None, :, 0]
        dt = wrap_angle(P[:, None, 1] - P[None, :, 1])
        dd = P[:, None, 2:] - P[None, :, 2:]
        D = np.sqrt(w.alpha * (dl * dl + dt * dt) + w.beta * np.sum(dd * dd, axis=-1))
    return _symmetrize(np.asarray(D, dtype=float).reshape(n, n))


def _se3_matrix(P, w, workers):
    n = len(P)
    T = np.ascontiguousarray(P, dtype=float)
    out = np.zeros((n, n))
    workers = workers or default_workers()
    if workers <= 1 or n < 256:
        bad = kernels.se3_distance_rows(T, w.alpha, w.beta, 0, n, out)
        bads = [bad]
    else:
        # rows near the top carry more work; interleave small blocks
        bounds = list(range(0, n, 32)) + [n]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(kernels.se3_distance_rows, T, w.alpha, w.beta, a, b, out)
                for a, b in zip(bounds[:-1], bounds[1:])
            ]
            bads = [f.result() for f in futs]
    bads = [tuple(b) for b in bads if b[0] >= 0]
    if bads:
        raise AntipodalRotation(pair=min(bads))
    return out


def paired_distances(manifold, X, Y, weights=MetricWeights(), radius=1.0):
    """Distances d(X[k], Y[k]) for stacked point arrays."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    w = weights
    if manifold == "plane":
        return np.sqrt(np.sum((X - Y) ** 2, axis=-1))
    if manifold == "s2":
        return radius * np.atleast_1d(sphere_angle(X / radius, Y / radius))
    if manifold == "se2":
        dt = wrap_angle(X[:, 0] - Y[:, 0])
        return np.sqrt(w.alpha * dt * dt + w.beta * np.sum((X[:, 1:] - Y[:, 1:]) ** 2, axis=-1))
    if manifold == "scaled_se2":
        dl = X[:, 0] - Y[:, 0]
        dt = wrap_angle(X[:, 1] - Y[:, 1])
        return np.sqrt(w.alpha * (dl * dl + dt * dt) + w.beta * np.sum((X[:, 2:] - Y[:, 2:]) ** 2, axis=-1))
    if manifold == "se3":
        m = np.swapaxes(X[:, :3, :3], 1, 2) @ Y[:, :3, :3]
        tr = np.trace(m, axis1=1, axis2=2)
        if np.any(tr <= -1.0 + 1e-6):
            raise AntipodalRotation()
        s = 0.5 * np.linalg.norm(np.stack([m[:, 2, 1] - m[:, 1, 2], m[:, 0, 2] - m[:, 2, 0],
                                           m[:, 1, 0] - m[:, 0, 1]], axis=-1), axis=-1)
        phi = np.arctan2(s, 0.5 * (tr - 1.0))
        dd = Y[:, :3, 3] - X[:, :3, 3]
        return np.sqrt(w.alpha * phi * phi + w.beta * np.sum(dd * dd, axis=-1))
    raise ValueError(f"unknown manifold {manifold!r}")


def find_duplicates(D, tol=DUPLICATE_TOL):
    iu = np.triu_indices(len(D), 1)
    hit = D[iu] <= tol
    return [(int(i), int(j)) for i, j in zip(iu[0][hit], iu[1][hit])]


def check_distinct(D, tol=DUPLICATE_TOL):
    dup = find_duplicates(D, tol)
    if dup:
        raise DuplicatePoints(f"duplicate samples: {dup[:5]}")


def geodesic_midpoint(manifold, x, y, weights=MetricWeights(), radius=1.0):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if manifold == "plane":
        return 0.5 * (x + y)
    if manifold == "s2":
        return radius * slerp(x / radius, y / radius, 0.5)
    if manifold == "se2":
        return np.array([x[0] + 0.5 * wrap_angle(y[0] - x[0]), *(0.5 * (x[1:] + y[1:]))])
    if manifold == "scaled_se2":
        return np.array([0.5 * (x[0] + y[0]), x[1] + 0.5 * wrap_angle(y[1] - x[1]), *(0.5 * (x[2:] + y[2:]))])
    if manifold == "se3":
        Rx = x[:3, :3]
        w0 = log_so3(relative_rotation(Rx, y[:3, :3]))
        m = np.eye(4)
        m[:3, :3] = Rx @ exp_so3(0.5 * w0)
        m[:3, 3] = 0.5 * (x[:3, 3] + y[:3, 3])
        return m
    raise ValueError(f"unknown manifold {manifold!r}")


def injectivity_radius(manifold, weights=MetricWeights(), radius=1.0):
    """Plane: unbounded (largest float).  Sphere: pi R.  Motion groups: the
    rotation factor's pi * sqrt(alpha), beyond which the rotation log leaves
    its principal branch."""
    if manifold == "plane":
        return EUCLIDEAN_INJECTIVITY
    if manifold == "s2":
        return sphere_injectivity_radius(radius)
    if manifold in ("se2", "se3", "scaled_se2"):
        return math.pi * math.sqrt(weights.alpha)
    raise ValueError(f"unknown manifold {manifold!r}")


def curvature_bound_plane(k_max: float) -> float:
    """Upper limit 1/k_max on the radius of any tubular neighbourhood."""
    if not k_max > 0:
        raise ValueError("k_max must be positive")
    return 1.0 / k_max


def epsilon_bound(feature_size_inf: float, injectivity_radius: float) -> float:
    if not (feature_size_inf > 0 and injectivity_radius > 0):
        raise ValueError("feature size and injectivity radius must be positive")
    return min(feature_size_inf, injectivity_radius)


@dataclass
class DensityReport:
    epsilon_used: float
    epsilon_bound: float
    is_dense: bool
    worst_gap: float
    violating_pairs: list
    closed: bool = False

    def to_dict(self):
        return {
            "epsilon_used": self.epsilon_used,
            "epsilon_bound": self.epsilon_bound,
            "is_dense": self.is_dense,
            "worst_gap": self.worst_gap,
            "violating_pairs": [list(p) for p in self.violating_pairs],
            "closed": self.closed,
        }


def _check_permutation(order, n):
    order = np.asarray(order, dtype=int)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError("order must be a permutation of the sample indices")
    return order


def consecutive_gaps(s: SampleSet, order, closed=False):
    order = _check_permutation(order, len(s))
    nxt = np.roll(order, -1) if closed else order[1:]
    cur = order if closed else order[:-1]
    return [(int(i), int(j), s.distance(i, j)) for i, j in zip(cur, nxt)]


def check_uniform_sample(s: SampleSet, ground_truth_order, epsilon=None, closed=False,
                         bound=math.inf) -> DensityReport:
    """Is ``s`` a uniform epsilon-sample, and is epsilon below ``bound``?

    With ``epsilon=None`` the tightest epsilon (the worst gap) is used.
    """
    if len(s) < 2:
        raise EmptySample("need at least two samples")
    gaps = consecutive_gaps(s, ground_truth_order, closed and len(s) > 2)
    worst = max(g for _, _, g in gaps)
    eps = worst if epsilon is None else float(epsilon)
    violating = [(i, j) for i, j, g in gaps if g > eps]
    dense = worst <= eps and eps < bound
    return DensityReport(eps, float(bound), bool(dense), float(worst), violating, bool(closed))


def flatness_witness(s: SampleSet, order, p_idx, q_idx, arc, closed=False, tol=1e-12) -> bool:
    """True iff every point of ``arc`` (dense points of the true curve between
    samples p and q) lies in the ball of radius d(p, q)/2 about the geodesic
    midpoint of p and q."""
    order = list(_check_permutation(order, len(s)))
    a, b = order.index(p_idx), order.index(q_idx)
    n = len(order)
    adjacent = abs(a - b) == 1 or (closed and abs(a - b) == n - 1)
    if not adjacent:
        raise ValueError("p and q must be consecutive in the order")
    p, q = s.points[p_idx], s.points[q_idx]
    c = geodesic_midpoint(s.manifold, p, q, s.weights, s.radius)
    r = 0.5 * s.distance(p_idx, q_idx)
    arc = np.asarray(arc, dtype=float)
    return all(point_distance(s.manifold, c, x, s.weights, s.radius) <= r + tol for x in arc)


def ellipse_max_curvature(a, b):
    """Largest curvature a/b^2 of the ellipse with semi-axes a >= b."""
    a, b = max(a, b), min(a, b)
    return a / (b * b)


def ellipse_feature_size(a, b, n=20000):
    """Smallest distance from the ellipse to its medial axis, by brute force.

    The inner medial axis is the major-axis segment between the evolute cusps
    (+-(a^2 - b^2)/a, 0); a convex curve has no outer medial axis.
    """
    a, b = max(a, b), min(a, b)
    t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    curve = np.stack([a * np.cos(t), b * np.sin(t)], axis=1)
    cusp = (a * a - b * b) / a
    xs = np.linspace(-cusp, cusp, n // 4)
    best = math.inf
    for chunk in np.array_split(curve, 20):
        d = np.hypot(chunk[:, None, 0] - xs[None, :], chunk[:, None, 1])
        best = min(best, float(d.min()))
    return best


def curve_reach(pos, vel, acc, geometry="euclidean", closed=True):
    """Brute-force smallest feature size of a densely sampled curve.

    The reach is the smaller of the focal distance (radius of curvature; on
    the unit sphere arccot of the geodesic curvature) and half the shortest
    double normal, i.e. pair of points whose connecting geodesic is normal to
    the curve at both ends.  ``geometry`` is 'euclidean' (any dimension) or
    'sphere' (unit sphere in R^3).
    """
    pos = np.asarray(pos, dtype=float)
    vel = np.asarray(vel, dtype=float)
    acc = np.asarray(acc, dtype=float)
    n = len(pos)
    speed = np.linalg.norm(vel, axis=1)
    if geometry == "euclidean":
        va = np.sum(vel * acc, axis=1)
        k = np.sqrt(np.maximum(speed**2 * np.sum(acc * acc, axis=1) - va**2, 0.0)) / speed**3
        focal = np.where(k > 0, 1.0 / np.maximum(k, 1e-300), math.inf)
        A = np.einsum("tk,sk->st", pos, vel) - np.sum(pos * vel, axis=1)[:, None]
        D = np.sqrt(np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=-1))
    elif geometry == "sphere":
        kg = np.abs(np.einsum("ij,ij->i", pos, np.cross(vel, acc))) / speed**3
        focal = np.arctan2(1.0, kg)
        A = np.einsum("tk,sk->st", pos, vel)
        D = sphere_angle(pos[:, None, :], pos[None, :, :])
    else:
        raise ValueError(f"unknown geometry {geometry!r}")
    # A[s, t] ~ derivative of d(s, t) in s (up to sign); double normals are
    # cells where both A and A^T change sign
    B = A.T
    idx = np.arange(n)
    nxt = (idx + 1) % n if closed else idx[1:]
    cur = idx if closed else idx[:-1]

    def changes(M):
        c = np.stack([M[np.ix_(cur, cur)], M[np.ix_(cur, nxt)], M[np.ix_(nxt, cur)], M[np.ix_(nxt, nxt)]])
        return (c.min(axis=0) <= 0) & (c.max(axis=0) >= 0)

    cell = changes(A) & changes(B)
    sep = np.abs(cur[:, None] - cur[None, :])
    if closed:
        sep = np.minimum(sep, n - sep)
    cell &= sep > 2
    dmin = np.minimum.reduce([D[np.ix_(cur, cur)], D[np.ix_(cur, nxt)], D[np.ix_(nxt, cur)], D[np.ix_(nxt, nxt)]])
    half_bottleneck = 0.5 * float(dmin[cell].min()) if cell.any() else math.inf
    return min(float(focal.min()), half_bottleneck)
