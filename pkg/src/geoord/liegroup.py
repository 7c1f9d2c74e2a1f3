"""Closed-form exp/log, distances and geodesics on SO(3), SE(3), SE(2) and
the scaled planar motion group.

Array functions (``exp_so3``, ``log_so3``, ``exp_se3_arrays`` ...) are
vectorised over leading axes; the value types below wrap them for scalar use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AntipodalRotation

SMALL_ANGLE = 1e-4
ANTIPODAL_TOL = 1e-6
ORTHO_TOL = 1e-9
TWO_PI = 2.0 * math.pi


def hat(w):
    """Skew matrix [w] with [w] @ x == cross(w, x)."""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., 0, 1] = -w[..., 2]
    out[..., 0, 2] = w[..., 1]
    out[..., 1, 0] = w[..., 2]
    out[..., 1, 2] = -w[..., 0]
    out[..., 2, 0] = -w[..., 1]
    out[..., 2, 1] = w[..., 0]
    return out


def vee(m):
    m = np.asarray(m, dtype=float)
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def _exp_coefficients(theta):
    """sin(t)/t, (1-cos t)/t^2 and (t-sin t)/t^3 with Taylor forms near 0."""
    theta = np.asarray(theta, dtype=float)
    small = theta < SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(t) / t)
    b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, (1.0 - np.cos(t)) / (t * t))
    c = np.where(small, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0, (t - np.sin(t)) / (t * t * t))
    return a, b, c


def exp_so3(w):
    """Rodrigues formula; ``w`` has shape (..., 3)."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w, axis=-1)
    a, b, _ = _exp_coefficients(theta)
    W = hat(w)
    return np.eye(3) + a[..., None, None] * W + b[..., None, None] * (W @ W)


def relative_rotation(r1, r2):
    """r1.T @ r2 summed in a fixed order, so swapping the arguments gives the
    exact transpose."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    return np.sum(r1[..., :, :, None] * r2[..., :, None, :], axis=-3)


def _angle_and_axis_part(m):
    tr = m[..., 0, 0] + m[..., 1, 1] + m[..., 2, 2]
    skew = np.stack(
        [m[..., 2, 1] - m[..., 1, 2], m[..., 0, 2] - m[..., 2, 0], m[..., 1, 0] - m[..., 0, 1]],
        axis=-1,
    )
    s = 0.5 * np.linalg.norm(skew, axis=-1)
    c = 0.5 * (tr - 1.0)
    return tr, np.arctan2(s, c), skew


def rotation_angle(r):
    """Rotation angle in [0, pi]; equals the norm of ``log_so3(r)``."""
    _, phi, _ = _angle_and_axis_part(np.asarray(r, dtype=float))
    return phi


def log_so3(r):
    """Inverse of ``exp_so3`` on rotations with trace > -1; shape (..., 3, 3) -> (..., 3)."""
    r = np.asarray(r, dtype=float)
    tr, phi, skew = _angle_and_axis_part(r)
    if np.any(tr <= -1.0 + ANTIPODAL_TOL):
        raise AntipodalRotation()
    small = phi < SMALL_ANGLE
    p2 = phi * phi
    safe = np.where(small, 1.0, phi)
    coef = np.where(small, 0.5 + p2 / 12.0 + 7.0 * p2 * p2 / 720.0, safe / (2.0 * np.sin(safe)))
    return coef[..., None] * skew


def exp_se3_arrays(w, v):
    """exp of twists (w, v) -> (rotations, translations)."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(w, axis=-1)
    a, b, c = _exp_coefficients(theta)
    W = hat(w)
    W2 = W @ W
    eye = np.eye(3)
    R = eye + a[..., None, None] * W + b[..., None, None] * W2
    A = eye + b[..., None, None] * W + c[..., None, None] * W2
    return R, np.einsum("...ij,...j->...i", A, v)


def _left_jacobian_inverse(w):
    theta = np.linalg.norm(w, axis=-1)
    small = theta < SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    t2 = theta * theta
    k = np.where(
        small,
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0,
        (2.0 * np.sin(t) - t * (1.0 + np.cos(t))) / (2.0 * t * t * np.sin(t)),
    )
    W = hat(w)
    return np.eye(3) - 0.5 * W + k[..., None, None] * (W @ W)


def log_se3_arrays(r, d):
    """Inverse of ``exp_se3_arrays``."""
    w = log_so3(r)
    Ainv = _left_jacobian_inverse(w)
    return w, np.einsum("...ij,...j->...i", Ainv, np.asarray(d, dtype=float))


def is_rotation(m, tol=ORTHO_TOL):
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return False
    ortho = np.linalg.norm(m.T @ m - np.eye(3))
    return bool(ortho <= tol and abs(np.linalg.det(m) - 1.0) <= tol)


def wrap_angle(x):
    """Representative of x in (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + math.pi, TWO_PI) - math.pi
    y = np.where(y <= -math.pi, math.pi, y)
    return float(y) if y.ndim == 0 else y


def _readonly(x, shape):
    a = np.array(x, dtype=float)
    if a.shape != shape:
        raise ValueError(f"expected shape {shape}, got {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MetricWeights:
    """Positive weights of the rotation (alpha) and translation (beta) terms.

    For SE(2) these are the ``a`` and ``b`` of the planar metric.
    """

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("metric weights must be positive")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("metric weights must be finite")


@dataclass(frozen=True, eq=False)
class Twist:
    w: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _readonly(self.w, (3,)))
        object.__setattr__(self, "v", _readonly(self.v, (3,)))

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[:3], x[3:])

    def as_vector(self):
        return np.concatenate([self.w, self.v])

    def __neg__(self):
        return Twist(-self.w, -self.v)

    def scaled(self, s):
        return Twist(s * self.w, s * self.v)


@dataclass(frozen=True, eq=False)
class RigidMotion3:
    """Element (R, d) of SE(3); acts on points as x -> R x + d."""

    r: np.ndarray
    d: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        r = _readonly(self.r, (3, 3))
        if not is_rotation(r):
            raise ValueError("rotation block is not in SO(3)")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "d", _readonly(self.d, (3,)))

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=float)
        return cls(m[:3, :3], m[:3, 3])

    def matrix(self):
        m = np.eye(4)
        m[:3, :3] = self.r
        m[:3, 3] = self.d
        return m

    def compose(self, other):
        """self * other = (R1 R2, R1 d2 + d1)."""
        return RigidMotion3(self.r @ other.r, self.r @ other.d + self.d)

    __matmul__ = compose

    def inverse(self):
        return RigidMotion3(self.r.T, -(self.r.T @ self.d))

    def allclose(self, other, atol=1e-9):
        return bool(np.allclose(self.r, other.r, atol=atol, rtol=0) and np.allclose(self.d, other.d, atol=atol, rtol=0))


@dataclass(frozen=True)
class PlanarMotion:
    """SE(2) configuration (theta, u, v); theta is kept in [0, 2 pi)."""

    theta: float
    u: float
    v: float

    def __post_init__(self):
        t = math.fmod(float(self.theta), TWO_PI)
        if t < 0:
            t += TWO_PI
        if t >= TWO_PI:
            t = 0.0
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))

    def act(self, other):
        """Left action used for the planar metric: componentwise addition."""
        return PlanarMotion(self.theta + other.theta, self.u + other.u, self.v + other.v)

    def matrix(self):
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s, self.u], [s, c, self.v], [0.0, 0.0, 1.0]])

    def as_array(self):
        return np.array([self.theta, self.u, self.v])


@dataclass(frozen=True)
class ScaledPlanarMotion:
    """Planar similarity: scale exp(lam), rotation theta, translation d."""

    lam: float
    theta: float
    d: tuple = (0.0, 0.0)

    def __post_init__(self):
        t = math.fmod(float(self.theta), TWO_PI)
        if t < 0:
            t += TWO_PI
        if t >= TWO_PI:
            t = 0.0
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "lam", float(self.lam))
        d = tuple(float(x) for x in self.d)
        if len(d) != 2:
            raise ValueError("translation must have 2 components")
        object.__setattr__(self, "d", d)

    def matrix(self):
        m = np.eye(3)
        m[:2, :2] = exp_scaled_rot(self.lam, self.theta)
        m[:2, 2] = self.d
        return m

    def as_array(self):
        return np.array([self.lam, self.theta, self.d[0], self.d[1]])


def exp_se3(t: Twist) -> RigidMotion3:
    R, d = exp_se3_arrays(t.w, t.v)
    return RigidMotion3(R, d)


def log_se3(g: RigidMotion3) -> Twist:
    w, v = log_se3_arrays(g.r, g.d)
    return Twist(w, v)


def dist_se3(a: RigidMotion3, b: RigidMotion3, w: MetricWeights = MetricWeights()) -> float:
    """Left-invariant distance sqrt(alpha |log(Ra^T Rb)|^2 + beta |db - da|^2)."""
    tr, phi, _ = _angle_and_axis_part(relative_rotation(a.r, b.r))
    if tr <= -1.0 + ANTIPODAL_TOL:
        raise AntipodalRotation()
    dd = b.d - a.d
    return math.sqrt(w.alpha * float(phi) ** 2 + w.beta * float(dd @ dd))


def dist_se2(a: PlanarMotion, b: PlanarMotion, w: MetricWeights = MetricWeights()) -> float:
    dt = wrap_angle(a.theta - b.theta)
    return math.sqrt(w.alpha * dt * dt + w.beta * ((a.u - b.u) ** 2 + (a.v - b.v) ** 2))


def dist_scaled_se2(a: ScaledPlanarMotion, b: ScaledPlanarMotion, w: MetricWeights = MetricWeights()) -> float:
    dt = wrap_angle(a.theta - b.theta)
    dl = a.lam - b.lam
    dx = a.d[0] - b.d[0]
    dy = a.d[1] - b.d[1]
    return math.sqrt(w.alpha * (dl * dl + dt * dt) + w.beta * (dx * dx + dy * dy))


def exp_scaled_rot(lam, theta):
    """exp(lam I + theta J) = e^lam R(theta); the two generators commute."""
    c, s = math.cos(theta), math.sin(theta)
    return math.exp(lam) * np.array([[c, -s], [s, c]])


def geodesic_se3_arrays(a: RigidMotion3, b: RigidMotion3, ts):
    """Geodesic R(t) = Ra exp(t w0), d(t) linear, evaluated at every t in ``ts``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    w0 = log_so3(relative_rotation(a.r, b.r))
    R = a.r @ exp_so3(ts[:, None] * w0)
    R[ts == 1.0] = b.r
    d = (1.0 - ts)[:, None] * a.d + ts[:, None] * b.d
    return R, d


def geodesic_se3(a: RigidMotion3, b: RigidMotion3, t: float) -> RigidMotion3:
    R, d = geodesic_se3_arrays(a, b, [t])
    return RigidMotion3(R[0], d[0])


def geodesic_body_velocity(a: RigidMotion3, b: RigidMotion3, t: float) -> Twist:
    """Body-frame velocity (R^T R', R^T d') of the geodesic from a to b at t."""
    w0 = log_so3(relative_rotation(a.r, b.r))
    g = geodesic_se3(a, b, t)
    return Twist(w0, g.r.T @ (b.d - a.d))


def riemannian_exp(g: RigidMotion3, xi: Twist) -> RigidMotion3:
    """Endpoint of the metric geodesic leaving g with body velocity xi."""
    return RigidMotion3(g.r @ exp_so3(xi.w), g.d + g.r @ xi.v)


def geodesic_se2(a: PlanarMotion, b: PlanarMotion, t: float) -> PlanarMotion:
    dt = wrap_angle(b.theta - a.theta)
    return PlanarMotion(a.theta + t * dt, (1.0 - t) * a.u + t * b.u, (1.0 - t) * a.v + t * b.v)
