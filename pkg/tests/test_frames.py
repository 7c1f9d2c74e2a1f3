import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoord.errors import AreaOutOfRange, DegeneratePolygon, MissingMask, StartRequired
from geoord.frames import (
    FrameRecord,
    Mask,
    clip_convex,
    closed_form_regime,
    estimate_rotation,
    estimate_rotation_from_area,
    estimate_translation,
    identifiable_angle,
    generate_frames,
    lattice_area,
    order_frames,
    overlap_area,
    polygon_area,
    rectangle,
)
from geoord.liegroup import MetricWeights, PlanarMotion
from oracles import convex_intersection_area, lattice_counts

W = MetricWeights(2500.0, 1.0)


def mask_frame(fid, a, b, theta, center):
    return FrameRecord(fid, None, Mask(a, b, rectangle(a, b, theta, center)))


def test_mask_validation():
    with pytest.raises(ValueError):
        Mask(3, 2, np.zeros((4, 2)))
    with pytest.raises(ValueError):
        Mask(1, 2, np.zeros((3, 2)))
    with pytest.raises(ValueError):
        FrameRecord("x")


def test_estimate_translation():
    f = mask_frame("a", 2, 5, 0.3, (10, 20))
    assert np.allclose(estimate_translation(f, f), [0, 0])
    g = mask_frame("b", 2, 5, 0.3, (15, 18))
    assert np.allclose(estimate_translation(f, g), [5, -2])
    h = mask_frame("c", 2, 5, 1.0, (10, 20))
    assert np.abs(estimate_translation(f, h)).max() < 0.5
    with pytest.raises(MissingMask):
        estimate_translation(f, FrameRecord("p", PlanarMotion(0, 0, 0)))


def test_overlap_area_anchors():
    assert overlap_area(1, 2, 0) == pytest.approx(2.0, abs=1e-12)
    assert overlap_area(2, 5, math.pi / 2) == pytest.approx(4.0, abs=1e-12)
    assert overlap_area(1, 2, 1.2) == pytest.approx(1 / math.sin(1.2), abs=1e-9)
    with pytest.raises(ValueError):
        overlap_area(2, 1, 0.1)
    with pytest.raises(ValueError):
        overlap_area(1, 2, 2.0)


@settings(max_examples=100)
@given(st.floats(0.2, 5), st.floats(1.0, 4.0), st.floats(0, math.pi / 2))
def test_overlap_area_against_hull_oracle(a, ratio, theta):
    b = a * ratio
    ref = convex_intersection_area(rectangle(a, b), rectangle(a, b, theta))
    assert overlap_area(a, b, theta) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_closed_form_regime_boundary():
    a, b = 1.0, 3.0
    th0 = closed_form_regime(a, b)
    for th in np.linspace(th0, math.pi / 2, 9):
        assert overlap_area(a, b, th) == pytest.approx(a * a / math.sin(th), rel=1e-12)
    # below the boundary the closed form overstates the overlap
    th = 0.5 * th0
    assert overlap_area(a, b, th) < a * a / math.sin(th) - 1e-3
    # the stated arctan(b/a) threshold lies above the boundary here, so the
    # closed form holds there too, but it also holds on [2 arctan(a/b), arctan(b/a)]
    assert th0 < math.atan(b / a)


@pytest.mark.parametrize("a,b", [(0.5, 1), (1, 1), (1, 2), (2, 5), (1, 10)])
def test_overlap_monotone_on_identifiable_range(a, b):
    th = np.linspace(0, identifiable_angle(a, b), 200)
    areas = [overlap_area(a, b, t) for t in th]
    assert all(x >= y - 1e-12 for x, y in zip(areas, areas[1:]))


def test_near_square_overlap_dips_and_recovers():
    assert identifiable_angle(1, 1) == pytest.approx(math.pi / 4, abs=1e-7)
    assert identifiable_angle(1, 1.1) < math.pi / 2
    assert identifiable_angle(1, 2) == math.pi / 2
    top = identifiable_angle(1, 1.1)
    # mirror angles beyond the dip share an area with angles before it
    assert overlap_area(1, 1.1, math.pi / 2) > overlap_area(1, 1.1, top)
    with pytest.raises(AreaOutOfRange):
        estimate_rotation_from_area(1, 1, 0.8)
    for t in (0.1, 0.4, 0.7):
        assert estimate_rotation_from_area(1, 1, overlap_area(1, 1, t)) == pytest.approx(t, abs=1e-6)


@pytest.mark.parametrize("theta", [0.2, 0.7, 1.3])
def test_rotation_roundtrip(theta):
    assert estimate_rotation_from_area(1, 3, overlap_area(1, 3, theta)) == pytest.approx(theta, abs=1e-6)


def test_rotation_endpoints_and_range():
    assert estimate_rotation_from_area(2, 5, 10.0) == 0.0
    assert estimate_rotation_from_area(2, 5, 4.0) == pytest.approx(math.pi / 2)
    with pytest.raises(AreaOutOfRange):
        estimate_rotation_from_area(2, 5, 3.0)
    with pytest.raises(AreaOutOfRange):
        estimate_rotation_from_area(2, 5, 11.0)


def test_estimate_rotation_from_masks_is_unsigned():
    f = mask_frame("a", 40, 100, 0.2, (0, 0))
    for dth in (0.05, -0.05, 0.6, -0.6):
        g = mask_frame("b", 40, 100, 0.2 + dth, (30, 7))
        assert estimate_rotation(f, g) == pytest.approx(abs(dth), abs=1e-7)


def test_clip_disjoint_and_contained():
    sq = rectangle(1, 1)
    assert len(clip_convex(sq, rectangle(1, 1, 0, (5, 5)))) == 0
    assert abs(polygon_area(clip_convex(rectangle(0.5, 0.5), sq))) == pytest.approx(0.25)


def test_lattice_area_squares():
    assert lattice_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == 1.0
    assert lattice_area([(0, 0), (10, 0), (10, 10), (0, 10)]) == 100.0
    with pytest.raises(DegeneratePolygon):
        lattice_area([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(DegeneratePolygon):
        lattice_area([(0, 0), (1, 1)])


def test_lattice_area_counts_against_scan():
    poly = rectangle(7.3, 11.1, 0.4, (3.2, -1.7))
    i, b = lattice_counts(poly)
    assert lattice_area(poly) == i + b / 2 - 1


def test_lattice_area_converges_under_scaling():
    base = rectangle(1.0, 2.3, 0.35)
    errs = []
    for s in (5, 50, 500):
        exact = abs(polygon_area(base * s))
        errs.append(abs(lattice_area(base * s) - exact) / exact)
        assert abs(lattice_area(base * s) - exact) <= 2 * (2 * (1.0 + 2.3) * s) / 2 + 1
    assert errs[2] < errs[1] < errs[0]


def test_order_frames_recovers_sequence():
    fr = generate_frames()
    ids = [f.id for f in fr]
    rng = np.random.default_rng(0)
    for _ in range(10):
        sh = [fr[i] for i in rng.permutation(len(fr))]
        r = order_frames(sh, W)
        assert r.order == ids and not r.closed
        assert order_frames(sh, W, "nn", start=ids[0]).order == ids
        assert order_frames(sh, W, source="mask").order == ids
        assert order_frames(sh, W, "nncrust").order == ids


def test_order_frames_small_and_errors():
    fr = generate_frames(2)
    assert order_frames(fr, W).order == [f.id for f in fr]
    with pytest.raises(StartRequired):
        order_frames(generate_frames(), W, "nn")
    with pytest.raises(ValueError):
        order_frames(fr[:1], W)
    with pytest.raises(ValueError):
        order_frames([fr[0], fr[0]], W)
    masks_only = [FrameRecord(f.id, None, f.mask) for f in generate_frames(5)]
    with pytest.raises(ValueError):
        order_frames(masks_only, W, "nncrust")


def test_order_frames_shuffle_invariant():
    fr = generate_frames()
    rng = np.random.default_rng(1)
    orders = {tuple(order_frames([fr[i] for i in rng.permutation(16)], W).order) for _ in range(20)}
    assert len(orders) == 1


def test_mask_matrix_matches_pose_matrix():
    fr = generate_frames()
    a = order_frames(fr, W, source="pose").pairwise_report
    b = order_frames(fr, W, source="mask").pairwise_report
    assert np.allclose(a, b, atol=1e-6)
