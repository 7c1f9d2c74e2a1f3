import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoord.errors import AntipodalRotation
from geoord.liegroup import (
    MetricWeights,
    PlanarMotion,
    RigidMotion3,
    ScaledPlanarMotion,
    Twist,
    dist_scaled_se2,
    dist_se2,
    dist_se3,
    exp_scaled_rot,
    exp_se3,
    exp_so3,
    geodesic_body_velocity,
    geodesic_se2,
    geodesic_se3,
    hat,
    log_se3,
    log_so3,
    riemannian_exp,
    rotation_angle,
    vee,
    wrap_angle,
)
from oracles import random_rotation, series_exp, twist_matrix

finite = st.floats(-10, 10, allow_nan=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)


def small_vec(limit):
    return vec3.filter(lambda w: np.linalg.norm(w) <= limit)


def motion(rng, scale=3.0):
    return RigidMotion3(random_rotation(rng), rng.normal(scale=scale, size=3))


@given(vec3, vec3)
def test_hat_is_cross_product(w, x):
    assert np.allclose(hat(w) @ x, np.cross(w, x), atol=1e-9)
    assert np.array_equal(vee(hat(w)), w)


def test_exp_identity_and_quarter_turn():
    assert np.array_equal(exp_so3(np.zeros(3)), np.eye(3))
    R = exp_so3(np.array([0.0, 0.0, math.pi / 2]))
    assert np.allclose(R, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)


def test_exp_matches_series_small_and_large():
    rng = np.random.default_rng(0)
    for scale in (1e-7, 1e-5, 1e-3, 0.5, 3.0):
        w = rng.normal(size=3)
        w *= scale / np.linalg.norm(w)
        v = rng.normal(size=3)
        R, d = exp_se3(Twist(w, v)).r, exp_se3(Twist(w, v)).d
        ref = series_exp(twist_matrix(w, v))
        assert np.abs(R - ref[:3, :3]).max() < 1e-12
        assert np.abs(d - ref[:3, 3]).max() < 1e-12


@settings(max_examples=200)
@given(small_vec(math.pi - 0.05), vec3)
def test_log_inverts_exp(w, v):
    t = log_se3(exp_se3(Twist(w, v)))
    assert np.abs(t.w - w).max() < 1e-8
    assert np.abs(t.v - v).max() < 1e-8


@given(small_vec(1e-4))
def test_log_small_angle_branch(w):
    assert np.allclose(log_so3(exp_so3(w)), w, atol=1e-15, rtol=1e-9)


def test_log_rejects_half_turn():
    R = exp_so3(np.array([math.pi, 0.0, 0.0]))
    with pytest.raises(AntipodalRotation):
        log_so3(R)
    with pytest.raises(AntipodalRotation):
        dist_se3(RigidMotion3.identity(), RigidMotion3(R))


def test_rotation_angle_near_pi_keeps_precision():
    R = exp_so3(np.array([0.0, math.pi - 1e-7, 0.0]))
    assert abs(rotation_angle(R) - (math.pi - 1e-7)) < 1e-9


def test_metric_weights_validation():
    for bad in [(0, 1), (1, -1), (math.inf, 1), (math.nan, 1)]:
        with pytest.raises(ValueError):
            MetricWeights(*bad)


def test_rigid_motion_validates_rotation():
    with pytest.raises(ValueError):
        RigidMotion3(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        RigidMotion3(2 * np.eye(3))


def test_compose_inverse_matrix():
    rng = np.random.default_rng(1)
    a, b = motion(rng), motion(rng)
    assert np.allclose((a @ b).matrix(), a.matrix() @ b.matrix(), atol=1e-12)
    assert (a @ a.inverse()).allclose(RigidMotion3.identity(), 1e-12)


def test_dist_se3_values():
    a = RigidMotion3.identity()
    b = RigidMotion3(exp_so3(np.array([0, 0, 0.5])), [3.0, 4.0, 0.0])
    assert dist_se3(a, b) == pytest.approx(math.sqrt(0.25 + 25))
    assert dist_se3(a, b, MetricWeights(4, 0.25)) == pytest.approx(math.sqrt(1 + 6.25))
    assert dist_se3(b, b) == 0.0


def test_dist_se3_exactly_symmetric():
    rng = np.random.default_rng(2)
    for _ in range(500):
        a, b = motion(rng), motion(rng)
        if rotation_angle(a.r.T @ b.r) > math.pi - 1e-2:
            continue
        assert dist_se3(a, b) == dist_se3(b, a)


@settings(max_examples=300)
@given(st.integers(0, 2**32 - 1))
def test_dist_se3_left_invariant(seed):
    rng = np.random.default_rng(seed)
    L, a, b = motion(rng), motion(rng), motion(rng)
    if rotation_angle(a.r.T @ b.r) > math.pi - 1e-2:
        return
    assert abs(dist_se3(L @ a, L @ b) - dist_se3(a, b)) < 1e-9


def test_dist_se3_not_right_invariant():
    rng = np.random.default_rng(3)
    a, b, Rm = motion(rng), motion(rng), motion(rng)
    assert abs(dist_se3(a @ Rm, b @ Rm) - dist_se3(a, b)) > 1e-3


def test_dist_se2_wraps_angle():
    a = PlanarMotion(0.1, 0, 0)
    b = PlanarMotion(2 * math.pi - 0.1, 0, 0)
    assert dist_se2(a, b) == pytest.approx(0.2)
    assert dist_se2(PlanarMotion(0, 0, 0), PlanarMotion(math.pi, 3, 4), MetricWeights(1, 1)) == \
        pytest.approx(math.sqrt(math.pi ** 2 + 25))


@given(st.floats(-20, 20), finite, finite, st.floats(-20, 20), finite, finite)
def test_dist_se2_invariant_under_planar_action(t0, u0, v0, t1, u1, v1):
    a, b = PlanarMotion(t0, u0, v0), PlanarMotion(t1, u1, v1)
    L = PlanarMotion(1.3, -2.0, 0.5)
    assert abs(dist_se2(L.act(a), L.act(b)) - dist_se2(a, b)) < 1e-9


def test_planar_motion_normalizes_theta():
    assert PlanarMotion(-0.5, 0, 0).theta == pytest.approx(2 * math.pi - 0.5)
    assert 0 <= PlanarMotion(7 * math.pi, 0, 0).theta < 2 * math.pi
    assert np.allclose(PlanarMotion(math.pi / 2, 1, 2).matrix()[:2, :2], [[0, -1], [1, 0]], atol=1e-15)


def test_wrap_angle_range():
    x = np.linspace(-20, 20, 2001)
    y = wrap_angle(x)
    assert np.all(y > -math.pi) and np.all(y <= math.pi)
    assert np.allclose(np.sin(y), np.sin(x)) and np.allclose(np.cos(y), np.cos(x))
    assert wrap_angle(-math.pi) == math.pi


def test_scaled_planar_metric_squared_form():
    a = ScaledPlanarMotion(0.0, 0.0, (0.0, 0.0))
    b = ScaledPlanarMotion(0.3, 0.4, (1.0, 2.0))
    assert dist_scaled_se2(a, b, MetricWeights(2, 3)) == pytest.approx(math.sqrt(2 * 0.25 + 3 * 5))


def test_exp_scaled_rot_matches_series():
    lam, th = 0.3, 1.1
    gen = np.array([[lam, -th], [th, lam]])
    assert np.allclose(exp_scaled_rot(lam, th), series_exp(gen), atol=1e-13)


def test_geodesic_endpoints_and_additivity():
    a = exp_se3(Twist([math.pi / 4, 0, 0], [-6, 0, 0]))
    b = exp_se3(Twist(math.pi / 2 * np.array([1.0, 1.0, 0.0]), [0, 6, 2]))
    assert geodesic_se3(a, b, 0.0).allclose(a, 0)
    assert geodesic_se3(a, b, 1.0).allclose(b, 0)
    w0 = np.linalg.norm(log_so3(a.r.T @ b.r))
    ts = np.linspace(0, 1, 11)
    for s in ts:
        for t in ts:
            gs, gt = geodesic_se3(a, b, s), geodesic_se3(a, b, t)
            assert abs(rotation_angle(gs.r.T @ gt.r) - abs(t - s) * w0) < 1e-9


def test_geodesic_midpoint_halves_distance():
    rng = np.random.default_rng(4)
    a, b = motion(rng), motion(rng)
    m = geodesic_se3(a, b, 0.5)
    assert dist_se3(a, m) == pytest.approx(dist_se3(m, b), abs=1e-9)
    assert dist_se3(a, m) == pytest.approx(0.5 * dist_se3(a, b), abs=1e-9)


def test_riemannian_exp_follows_geodesic():
    rng = np.random.default_rng(5)
    a, b = motion(rng), motion(rng)
    xi = geodesic_body_velocity(a, b, 0.0)
    assert riemannian_exp(a, xi).allclose(b, 1e-9)
    assert riemannian_exp(a, xi.scaled(0.3)).allclose(geodesic_se3(a, b, 0.3), 1e-9)


def test_geodesic_se2_takes_short_way():
    a = PlanarMotion(0.1, 0, 0)
    b = PlanarMotion(2 * math.pi - 0.1, 2, 0)
    m = geodesic_se2(a, b, 0.5)
    assert abs(wrap_angle(m.theta)) < 1e-12 and m.u == pytest.approx(1.0)
