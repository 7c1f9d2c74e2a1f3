"""Demo curves with known feature size, used by the CLI and the test harness.

Every curve is parameterized on t in [0, 1].  Samples are spaced evenly in
arclength (closed curves get a random phase) and then shuffled; the truth
order is kept separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .liegroup import MetricWeights, exp_so3
from .sampling import (
    SampleSet,
    curve_reach,
    epsilon_bound,
    injectivity_radius,
    paired_distances,
)

N_MIN, N_MAX = 30, 200
SAFETY = 0.8
_DENSE = 20001


@dataclass(frozen=True)
class DemoCurve:
    name: str
    manifold: str
    closed: bool
    evaluate: Callable
    feature: Callable  # () -> feature size, possibly expensive
    weights: MetricWeights = MetricWeights()
    radius: float = 1.0

    @property
    def feature_size(self):
        return _feature(self.name)

    @property
    def injectivity_radius(self):
        return injectivity_radius(self.manifold, self.weights, self.radius)

    @property
    def epsilon_bound(self):
        return epsilon_bound(self.feature_size, self.injectivity_radius)

    def length_table(self, m=_DENSE):
        return _length_table(self.name, m)

    @property
    def length(self):
        return float(self.length_table()[1][-1])

    def default_n(self, safety=SAFETY):
        """Fewest samples (at least N_MIN) whose arclength spacing is at most
        safety * epsilon_bound; chords never exceed arcs, so every gap is too."""
        segs = math.ceil(self.length / (safety * self.epsilon_bound))
        n = segs if self.closed else segs + 1
        n = max(N_MIN, n)
        if n > N_MAX:
            raise ValueError(f"{self.name} needs {n} samples, more than {N_MAX}")
        return n

    def params_at(self, n, rng):
        t_tab, s_tab = self.length_table()
        L = s_tab[-1]
        if self.closed:
            s = (np.arange(n) + rng.random()) * (L / n)
        else:
            s = np.linspace(0.0, L, n)
        return np.interp(s, s_tab, t_tab)

    def sample(self, n=None, seed=0):
        """Shuffled samples and the truth order (sample indices along the curve)."""
        n = self.default_n() if n is None else int(n)
        if n < 2:
            raise ValueError("n must be at least 2")
        rng = np.random.default_rng(seed)
        t = self.params_at(n, rng)
        pts = self.evaluate(t)
        perm = rng.permutation(n)
        s = SampleSet(self.manifold, pts[perm], self.weights, self.radius)
        return s, np.argsort(perm)

    def truth_record(self, order):
        return {
            "curve": self.name,
            "order": [int(i) for i in order],
            "closed": self.closed,
            "manifold": self.manifold,
            "feature_size": self.feature_size,
            "injectivity_radius": self.injectivity_radius,
            "epsilon_bound": self.epsilon_bound,
        }


def _ellipse(t, a=2.0, b=1.0):
    t = np.asarray(t, dtype=float)
    return np.column_stack([a * np.cos(2 * np.pi * t), b * np.sin(2 * np.pi * t)])


def _circle(t):
    return _ellipse(t, 1.0, 1.0)


_TILT = exp_so3(np.array([math.pi / 6, 0.0, 0.0]))


def _sphere_loop(t):
    t = np.asarray(t, dtype=float)
    c = np.column_stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t), np.zeros_like(t)])
    return c @ _TILT.T


def _sphere_wave(t):
    t = np.asarray(t, dtype=float)
    colat = np.pi / 2 + 0.3 * np.sin(6 * np.pi * t)
    lon = 2 * np.pi * t
    return np.column_stack([np.sin(colat) * np.cos(lon), np.sin(colat) * np.sin(lon), np.cos(colat)])


def _se2_circle(t):
    th = 2 * np.pi * np.asarray(t, dtype=float)
    return np.column_stack([th, np.cos(th), np.sin(th)])


SPAN = 1.5 * math.pi


def _se3_trajectory(t):
    s = SPAN * np.asarray(t, dtype=float)
    out = np.zeros((len(s), 4, 4))
    out[:, :3, :3] = exp_so3(np.outer(0.4 * s, [0.0, 0.0, 1.0]))
    out[:, :3, 3] = np.column_stack([2 * np.cos(s), 2 * np.sin(s), 0.5 * s])
    out[:, 3, 3] = 1.0
    return out


def _spiral(t):
    s = SPAN * np.asarray(t, dtype=float)
    r = np.exp(0.1 * s)
    return np.column_stack([0.15 * s, s, r * np.cos(s), r * np.sin(s)])


SPIRAL_WEIGHTS = MetricWeights(10.0, 1.0)


def _periodic_derivatives(x):
    """First and second derivatives in t of samples on a uniform periodic grid."""
    n = len(x)
    k = 2j * np.pi * np.fft.fftfreq(n, 1.0 / n)
    X = np.fft.fft(x, axis=0)
    d1 = np.real(np.fft.ifft(k[:, None] * X, axis=0))
    d2 = np.real(np.fft.ifft((k * k)[:, None] * X, axis=0))
    return d1, d2


def _sphere_wave_reach(m=1000):
    t = np.arange(m) / m
    p = _sphere_wave(t)
    v, a = _periodic_derivatives(p)
    return curve_reach(p, v, a, "sphere", closed=True)


def _spiral_reach(m=1500):
    # flat coordinates of the product metric: (sqrt(a) lam, sqrt(a) theta, sqrt(b) d)
    s = np.linspace(0.0, SPAN, m)
    r = np.exp(0.1 * s)
    ra, rb = math.sqrt(SPIRAL_WEIGHTS.alpha), math.sqrt(SPIRAL_WEIGHTS.beta)
    c, sn = np.cos(s), np.sin(s)
    pos = np.column_stack([ra * 0.15 * s, ra * s, rb * r * c, rb * r * sn])
    vel = np.column_stack([np.full(m, ra * 0.15), np.full(m, ra),
                           rb * r * (0.1 * c - sn), rb * r * (0.1 * sn + c)])
    acc = np.column_stack([np.zeros(m), np.zeros(m),
                           rb * r * (0.01 * c - 0.2 * sn - c), rb * r * (0.01 * sn + 0.2 * c - sn)])
    return curve_reach(pos, vel, acc, "euclidean", closed=False)


def _helix_focal(radius, rise_per_radian):
    return (radius * radius + rise_per_radian ** 2) / radius


CURVES = {
    c.name: c
    for c in [
        DemoCurve("plane-ellipse", "plane", True, _ellipse, lambda: 0.5),
        DemoCurve("sphere-loop", "s2", True, _sphere_loop, lambda: math.pi / 2),
        DemoCurve("sphere-wave", "s2", True, _sphere_wave, _sphere_wave_reach),
        # (sqrt(a) theta, sqrt(b) d) is a helix of radius 1 and rise 1 per radian
        DemoCurve("se2-circle", "se2", True, _se2_circle, lambda: _helix_focal(1.0, 1.0)),
        # flat coordinates (0.4 s, 2 cos s, 2 sin s, 0.5 s): radius 2, rise sqrt(0.41)
        DemoCurve("se3-trajectory", "se3", False, _se3_trajectory, lambda: _helix_focal(2.0, math.sqrt(0.41))),
        DemoCurve("scaled-se2-spiral", "scaled_se2", False, _spiral, _spiral_reach, SPIRAL_WEIGHTS),
    ]
}
DEMO_NAMES = tuple(CURVES)

# not a CLI demo; the unit circle in the plane for density-failure experiments
PLANE_CIRCLE = DemoCurve("plane-circle", "plane", True, _circle, lambda: 1.0)


def get_curve(name):
    if name == PLANE_CIRCLE.name:
        return PLANE_CIRCLE
    try:
        return CURVES[name]
    except KeyError:
        raise ValueError(f"unknown demo curve {name!r}; choose from {', '.join(DEMO_NAMES)}") from None


@lru_cache(maxsize=None)
def _feature(name):
    return float(get_curve(name).feature())


@lru_cache(maxsize=None)
def _length_table(name, m):
    c = get_curve(name)
    t = np.linspace(0.0, 1.0, m)
    p = c.evaluate(t)
    seg = paired_distances(c.manifold, p[:-1], p[1:], c.weights, c.radius)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    t.setflags(write=False)
    s.setflags(write=False)
    return t, s
