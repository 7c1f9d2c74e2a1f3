import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoord.curves import CURVES, PLANE_CIRCLE
from geoord.errors import BranchingTree, DuplicatePoints, EmptySample, NonManifoldOutput
from geoord.liegroup import MetricWeights
from geoord.reconstruct import (
    OrderedPath,
    SpanningTree,
    WeightedCompleteGraph,
    build_graph,
    canonical_order,
    close_loop,
    extract_path,
    mst,
    order_mst,
    order_nn,
    order_nncrust_r3,
    same_curve_order,
    unwrap_angles,
)
from geoord.sampling import SampleSet
from oracles import exhaustive_mst_weight, kruskal_strict, shortest_hamiltonian_cycle


def plane(pts):
    return SampleSet("plane", np.asarray(pts, dtype=float))


def test_build_graph_small_cases():
    g = build_graph(plane([[0, 0], [3, 4]]))
    assert g.n == 2 and g[0, 1] == 5.0
    g = build_graph(plane([[0, 0], [1, 0], [3, 0]]))
    assert (g[0, 1], g[0, 2], g[1, 2]) == (1.0, 3.0, 2.0)


def test_build_graph_errors():
    with pytest.raises(EmptySample):
        build_graph(plane([[0, 0]]))
    with pytest.raises(DuplicatePoints):
        build_graph(plane([[0, 0], [1, 1], [0, 0]]))


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedCompleteGraph([[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        WeightedCompleteGraph([[1, 1], [1, 0]])
    with pytest.raises(ValueError):
        WeightedCompleteGraph([[0, np.inf], [np.inf, 0]])


def test_mst_picks_short_edges():
    W = np.array([[0, 1, 5], [1, 0, 2], [5, 2, 0.0]])
    t = mst(WeightedCompleteGraph(W))
    assert sorted((i, j) for i, j, _ in t.edges) == [(0, 1), (1, 2)]
    assert t.total_weight() == 3.0


def test_mst_equal_weight_square_tie_rule():
    # square corners 0..3 in cyclic order: four sides of 1, diagonals of 2
    W = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0.0]])
    t = mst(WeightedCompleteGraph(W))
    assert sorted((i, j) for i, j, _ in t.edges) == [(0, 1), (0, 3), (1, 2)]
    assert sorted((i, j) for i, j, _ in t.edges) == kruskal_strict(W)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1), st.booleans())
def test_mst_matches_exhaustive_and_strict_kruskal(n, seed, integer):
    rng = np.random.default_rng(seed)
    W = rng.integers(1, 4, size=(n, n)).astype(float) if integer else rng.random((n, n))
    W = np.triu(W, 1)
    W = W + W.T
    t = mst(WeightedCompleteGraph(W))
    assert t.total_weight() == exhaustive_mst_weight(W)
    assert sorted((i, j) for i, j, _ in t.edges) == kruskal_strict(W)


def test_mst_is_deterministic():
    rng = np.random.default_rng(5)
    W = np.triu(rng.integers(1, 3, size=(30, 30)).astype(float), 1)
    g = WeightedCompleteGraph(W + W.T)
    assert mst(g).edges == mst(g).edges


def test_extract_path_and_branching():
    t = SpanningTree(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)))
    assert extract_path(t).order == (0, 1, 2, 3)
    t = SpanningTree(4, ((1, 3, 1.0), (0, 3, 1.0), (2, 0, 1.0)))
    assert extract_path(t).order == (1, 3, 0, 2)
    star = SpanningTree(4, ((0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)))
    with pytest.raises(BranchingTree) as info:
        extract_path(star)
    assert info.value.vertices == [0] and info.value.max_degree == 3


def test_canonical_order():
    assert canonical_order([3, 2, 1, 0], False) == (0, 1, 2, 3)
    assert canonical_order([2, 3, 0, 1], True) == (0, 1, 2, 3)
    assert canonical_order([2, 1, 0, 3], True) == (0, 1, 2, 3)
    assert canonical_order([5], True) == (5,)


@given(st.permutations(range(7)), st.booleans())
def test_same_curve_order_ignores_direction_and_rotation(perm, closed):
    perm = list(perm)
    assert same_curve_order(perm[::-1], perm, closed)
    if closed:
        assert same_curve_order(perm[3:] + perm[:3], perm, True)


def test_se2_unit_circle_of_eight_matches_brute_force_cycle():
    rng = np.random.default_rng(0)
    th = 2 * np.pi * np.arange(8) / 8
    pts = np.column_stack([th, np.cos(th), np.sin(th)])
    perm = rng.permutation(8)
    s = SampleSet("se2", pts[perm])
    p = order_mst(s)
    truth = np.argsort(perm)
    assert p.closed and same_curve_order(p.order, truth, True)
    assert same_curve_order(shortest_hamiltonian_cycle(s.distance_matrix()), truth, True)


def test_close_loop_cases():
    circle = CURVES["plane-ellipse"]
    s, _ = circle.sample(60, 3)
    assert order_mst(s).closed
    t = np.linspace(0, np.pi, 40)
    half = plane(np.column_stack([np.cos(t), np.sin(t)]))
    assert not order_mst(half).closed
    p = OrderedPath((0, 1))
    assert not close_loop(p, build_graph(plane([[0, 0], [1, 0]]))).closed
    three = plane([[0, 0], [1, 0], [0.5, 0.8]])
    assert not order_mst(three).closed


def test_close_loop_slack_controls_decision():
    t = np.linspace(0, 2 * np.pi * 0.9, 30)
    s = plane(np.column_stack([np.cos(t), np.sin(t)]))
    g = build_graph(s)
    p = extract_path(mst(g))
    assert not close_loop(p, g, 0.25).closed
    assert close_loop(p, g, 5.0).closed
    with pytest.raises(ValueError):
        close_loop(p, g, -0.1)


def test_order_nn_collinear_and_start():
    s = plane([[3, 0], [0, 0], [2, 0], [1, 0]])
    assert order_nn(s, 1).order == (1, 3, 2, 0)
    with pytest.raises(IndexError):
        order_nn(s, 7)


def test_order_nn_on_spiral_with_known_start():
    c = CURVES["scaled-se2-spiral"]
    s, truth = c.sample(80, 4)
    p = order_nn(s, int(truth[0]))
    assert list(p.order) == list(truth)


def test_greedy_from_mid_curve_can_differ_from_mst():
    t = np.linspace(0, 1, 11)
    s = plane(np.column_stack([t, np.zeros_like(t)]))
    mst_order = order_mst(s).order
    greedy = order_nn(s, 5).order
    assert mst_order == tuple(range(11))
    assert not same_curve_order(greedy, mst_order, False)


def test_unwrap_angles_follows_tree():
    th = np.mod(np.linspace(0, 4 * np.pi, 40), 2 * np.pi)
    pts = np.column_stack([th, np.linspace(0, 1, 40), np.zeros(40)])
    s = SampleSet("se2", pts)
    un = unwrap_angles(th, s.distance_matrix())
    assert np.allclose(np.diff(un), 4 * np.pi / 39)


def test_nncrust_circle_agrees_with_mst():
    c = CURVES["se2-circle"]
    for seed in range(5):
        s, truth = c.sample(40, seed)
        a, b = order_nncrust_r3(s), order_mst(s)
        assert a.closed and b.closed
        assert a.order == b.order
        assert same_curve_order(a.order, truth, True)


def test_nncrust_open_arc():
    th = np.linspace(0, 2.5, 30)
    pts = np.column_stack([th, 3 * np.cos(th), 3 * np.sin(th)])
    perm = np.random.default_rng(1).permutation(30)
    p = order_nncrust_r3(SampleSet("se2", pts[perm]))
    assert not p.closed and same_curve_order(p.order, np.argsort(perm), False)


def test_nncrust_three_points_and_errors():
    s = SampleSet("se2", [[0, 0, 0], [0, 2, 0], [0, 1, 0]])
    assert order_nncrust_r3(s).order == (0, 2, 1)
    rng = np.random.default_rng(2)
    cloud = SampleSet("se2", np.column_stack([rng.uniform(0, 6, 40), rng.normal(size=(40, 2))]))
    with pytest.raises(NonManifoldOutput):
        order_nncrust_r3(cloud)
    with pytest.raises(ValueError):
        order_nncrust_r3(plane([[0, 0], [1, 1], [2, 2], [3, 3]]))


def test_nncrust_weights_override():
    c = CURVES["se2-circle"]
    s, truth = c.sample(40, 0)
    p = order_nncrust_r3(s, MetricWeights(2.0, 1.0))
    assert same_curve_order(p.order, truth, True)


@pytest.mark.parametrize("name", sorted(CURVES) + [PLANE_CIRCLE.name])
def test_demo_curves_reordered(name):
    c = CURVES.get(name, PLANE_CIRCLE)
    for seed in range(10):
        s, truth = c.sample(seed=seed)
        p = order_mst(s)
        assert p.closed == c.closed
        assert same_curve_order(p.order, truth, c.closed)


def test_sparse_thin_ellipse_fails_visibly():
    # chords across the width (0.6) are shorter than the gaps along it
    t = 2 * np.pi * np.arange(20) / 20
    pts = np.column_stack([5 * np.cos(t), 0.3 * np.sin(t)])
    try:
        p = order_mst(plane(pts))
    except BranchingTree:
        return
    assert not (p.closed and same_curve_order(p.order, range(20), True))


def test_random_scatter_raises_branching():
    rng = np.random.default_rng(9)
    with pytest.raises(BranchingTree) as info:
        order_mst(plane(rng.random((50, 2))))
    assert info.value.max_degree >= 3 and info.value.vertices
