"""Recover the order of unordered curve samples.

The main route is: complete distance graph -> minimum spanning tree -> read the
tree off as a path (it is one when the sample is dense) -> decide whether the
curve closes.  A greedy nearest-neighbour chain (needs a start) and NN-CRUST
on a Euclidean embedding of SE(2) are the alternatives.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BranchingTree, EmptySample, NonManifoldOutput
from .liegroup import MetricWeights, wrap_angle
from .sampling import SampleSet, check_distinct

DEFAULT_SLACK = 0.25


@dataclass(frozen=True, eq=False)
class WeightedCompleteGraph:
    weights: np.ndarray

    def __post_init__(self):
        W = np.array(self.weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("weights must be a square matrix")
        if not np.all(np.isfinite(W)):
            raise ValueError("weights must be finite")
        if np.any(W < 0) or np.any(np.diag(W) != 0) or not np.array_equal(W, W.T):
            raise ValueError("weights must be symmetric, nonnegative, zero on the diagonal")
        W.setflags(write=False)
        object.__setattr__(self, "weights", W)

    @property
    def n(self):
        return self.weights.shape[0]

    def __getitem__(self, ij):
        return float(self.weights[ij])


@dataclass(frozen=True)
class SpanningTree:
    n: int
    edges: tuple  # ((i, j, w), ...) with i < j, in insertion order

    def adjacency(self):
        adj = [[] for _ in range(self.n)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def degrees(self):
        deg = np.zeros(self.n, dtype=int)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def total_weight(self):
        return math.fsum(w for _, _, w in self.edges)

    def max_edge(self):
        return max((w for _, _, w in self.edges), default=0.0)


@dataclass(frozen=True)
class OrderedPath:
    order: tuple
    closed: bool = False
    max_degree: int = 0
    branch_vertices: tuple = field(default_factory=tuple)
    algorithm: str = "mst"

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError("order must be a permutation of 0..n-1")
        object.__setattr__(self, "order", order)

    def to_dict(self):
        return {
            "order": list(self.order),
            "closed": self.closed,
            "algorithm": self.algorithm,
            "max_degree": self.max_degree,
        }

    def with_(self, **kw):
        d = dict(order=self.order, closed=self.closed, max_degree=self.max_degree,
                 branch_vertices=self.branch_vertices, algorithm=self.algorithm)
        d.update(kw)
        return OrderedPath(**d)


def build_graph(s: SampleSet, workers=None) -> WeightedCompleteGraph:
    """All pairwise distances under the sample set's metric."""
    if len(s) < 2:
        raise EmptySample("need at least two samples")
    D = s.distance_matrix(workers)
    check_distinct(D)
    return WeightedCompleteGraph(D)


def mst(g: WeightedCompleteGraph) -> SpanningTree:
    """Dense Prim from vertex 0.  Among equal weights the edge with the
    lexicographically smaller (min index, max index) pair wins, which makes the
    tree unique."""
    if g.n < 2:
        raise EmptySample("need at least two vertices")
    W = np.ascontiguousarray(g.weights)
    E = kernels.prim_mst(W)
    return SpanningTree(g.n, tuple((int(i), int(j), float(W[i, j])) for i, j in E))


def canonical_order(order, closed):
    """Open paths start at the lower-indexed end; cycles start at vertex 0 and
    head toward its smaller-indexed neighbour."""
    order = [int(i) for i in order]
    if len(order) < 2:
        return tuple(order)
    if not closed:
        return tuple(order if order[0] < order[-1] else order[::-1])
    k = order.index(0)
    order = order[k:] + order[:k]
    if len(order) > 2 and order[-1] < order[1]:
        order = [order[0]] + order[:0:-1]
    return tuple(order)


def extract_path(t: SpanningTree, algorithm="mst") -> OrderedPath:
    deg = t.degrees()
    max_deg = int(deg.max()) if t.n > 1 else 0
    branch = tuple(int(i) for i in np.flatnonzero(deg >= 3))
    if branch:
        raise BranchingTree(branch, max_deg)
    if t.n == 1:
        return OrderedPath((0,), False, 0, (), algorithm)
    adj = t.adjacency()
    start = min(int(i) for i in np.flatnonzero(deg == 1))
    order = [start]
    prev, cur = -1, start
    while len(order) < t.n:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        order.append(nxt)
        prev, cur = cur, nxt
    return OrderedPath(canonical_order(order, False), False, max_deg, (), algorithm)


def _path_edges(order, closed):
    order = list(order)
    pairs = list(zip(order[:-1], order[1:]))
    if closed:
        pairs.append((order[-1], order[0]))
    return pairs


def close_loop(p: OrderedPath, g: WeightedCompleteGraph, slack: float = DEFAULT_SLACK) -> OrderedPath:
    """Mark the path closed when the edge joining its two ends is no longer
    than (1 + slack) times its longest edge.  Never closes fewer than 4 points.
    The order is left as is; see ``canonical_order``."""
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    n = len(p.order)
    if n < 4:
        return p.with_(closed=False)
    longest = max(g[i, j] for i, j in _path_edges(p.order, False))
    joining = g[p.order[0], p.order[-1]]
    return p.with_(closed=bool(joining <= (1.0 + slack) * longest))


def order_mst(s: SampleSet, slack: float = DEFAULT_SLACK, workers=None, graph=None) -> OrderedPath:
    """MST route: build_graph, mst, extract_path, close_loop, canonical order."""
    g = graph if graph is not None else build_graph(s, workers)
    if g.n == 1:
        return OrderedPath((0,))
    p = close_loop(extract_path(mst(g)), g, slack)
    return p.with_(order=canonical_order(p.order, p.closed))


def order_nn(s: SampleSet, start: int, slack: float = DEFAULT_SLACK, workers=None, graph=None) -> OrderedPath:
    """Greedy chain from ``start``; the order keeps ``start`` first."""
    g = graph if graph is not None else build_graph(s, workers)
    if not 0 <= start < g.n:
        raise IndexError(f"start {start} out of range for {g.n} samples")
    order = kernels.nn_chain(np.ascontiguousarray(g.weights), int(start))
    p = OrderedPath(order, False, 2 if g.n > 2 else 1, (), "nn")
    return close_loop(p, g, slack)


def unwrap_angles(theta, W):
    """Unwrap angles along the minimum spanning tree of ``W`` (breadth first
    from vertex 0), so that neighbours on the curve get nearby values."""
    theta = np.asarray(theta, dtype=float)
    n = len(theta)
    out = theta.copy()
    if n < 2:
        return out
    t = mst(WeightedCompleteGraph(W))
    adj = t.adjacency()
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in sorted(adj[a]):
            if not seen[b]:
                seen[b] = True
                out[b] = out[a] + wrap_angle(theta[b] - theta[a])
                queue.append(b)
    return out


def se2_embedding(s: SampleSet, W=None):
    """(sqrt(alpha) theta, sqrt(beta) u, sqrt(beta) v) with theta unwrapped."""
    if s.manifold != "se2":
        raise ValueError("the R^3 embedding is defined for se2 samples")
    if W is None:
        W = s.distance_matrix()
    w = s.weights
    th = unwrap_angles(s.points[:, 0], W)
    return np.column_stack([math.sqrt(w.alpha) * th, math.sqrt(w.beta) * s.points[:, 1:]])


def nncrust_edges(X):
    """NN-CRUST edge set of points in R^d.

    Each point contributes the edge to its nearest neighbour q and the edge to
    its nearest point in the half-space opposite q.  Returns (edges, kinds)
    with edges as sorted pairs and kind 0 for nearest-neighbour edges, 1 for
    half-space edges (0 wins when an edge is both).
    """
    X = np.asarray(X, dtype=float)
    n = len(X)
    diff = X[:, None, :] - X[None, :, :]
    D = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(D, np.inf)
    kinds = {}
    for p in range(n):
        q = int(np.argmin(D[p]))
        kinds[(min(p, q), max(p, q))] = 0
    for p in range(n):
        q = int(np.argmin(D[p]))
        side = (X - X[p]) @ (X[q] - X[p])
        cand = np.where(side < 0, D[p], np.inf)
        if np.isfinite(cand).any():
            r = int(np.argmin(cand))
            kinds.setdefault((min(p, r), max(p, r)), 1)
    return kinds, D


def order_nncrust_r3(s: SampleSet, w: MetricWeights | None = None, slack: float = DEFAULT_SLACK,
                     workers=None) -> OrderedPath:
    """NN-CRUST on the R^3 embedding of SE(2) samples.

    Where a vertex gets more than two edges, the longest half-space edges at
    such vertices are dropped first (an open curve's ends otherwise reach
    across).  What remains must be one path or one cycle, or NonManifoldOutput
    is raised.  A cycle is cut at its longest metric edge and closure is then
    decided by ``close_loop`` in the SE(2) metric, since unwrapping opens a
    closed curve whose angle winds once.
    """
    if w is not None and w != s.weights:
        s = SampleSet(s.manifold, s.points, w, s.radius)
    g = build_graph(s, workers)
    n = g.n
    if n <= 3:
        order = tuple(range(n))
        if n == 3:
            # the middle vertex is the one opposite the longest side
            a, b, c = (0, 1, 2)
            sides = {c: g[a, b], a: g[b, c], b: g[a, c]}
            mid = min(sides, key=lambda k: (-sides[k], k))
            ends = sorted(set(range(3)) - {mid})
            order = (ends[0], mid, ends[1])
        return OrderedPath(order, False, min(n - 1, 2), (), "nncrust")
    X = se2_embedding(s, np.array(g.weights))
    kinds, D = nncrust_edges(X)
    deg = np.zeros(n, dtype=int)
    for i, j in kinds:
        deg[i] += 1
        deg[j] += 1
    raw_max = int(deg.max())
    half = sorted((e for e, k in kinds.items() if k == 1), key=lambda e: (-D[e], e))
    for e in half:
        if deg[e[0]] > 2 or deg[e[1]] > 2:
            del kinds[e]
            deg[e[0]] -= 1
            deg[e[1]] -= 1
    if deg.max() > 2 or deg.min() == 0:
        bad = np.flatnonzero((deg > 2) | (deg == 0))
        raise NonManifoldOutput(f"NN-CRUST degrees not in {{1, 2}} at vertices {list(map(int, bad))[:10]}")
    adj = [[] for _ in range(n)]
    for i, j in kinds:
        adj[i].append(j)
        adj[j].append(i)
    ends = [int(i) for i in np.flatnonzero(deg == 1)]
    if len(ends) not in (0, 2):
        raise NonManifoldOutput(f"NN-CRUST output has {len(ends) // 2} components")
    start = ends[0] if ends else 0
    order = [start]
    prev, cur = -1, start
    while True:
        nxt = [v for v in adj[cur] if v != prev]
        if not nxt or nxt[0] == start:
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    if len(order) != n:
        raise NonManifoldOutput("NN-CRUST output is not a single curve")
    if not ends:
        pairs = _path_edges(order, True)
        k = max(range(n), key=lambda m: (g[pairs[m]], -m))
        order = order[k + 1:] + order[:k + 1]
    p = OrderedPath(canonical_order(order, False), False, raw_max, (), "nncrust")
    p = close_loop(p, g, slack)
    return p.with_(order=canonical_order(p.order, p.closed))


def same_curve_order(found, truth, closed):
    """True if ``found`` equals ``truth`` up to reversal (and, for closed
    curves, cyclic rotation)."""
    found = [int(i) for i in found]
    truth = [int(i) for i in truth]
    if len(found) != len(truth):
        return False
    return canonical_order(found, closed) == canonical_order(truth, closed)
