"""Numpy implementations of the compiled kernels in ``_kernels.pyx``."""
import numpy as np

ANTIPODAL_TOL = 1e-6
_ROW_BLOCK = 64


def se3_distance_rows(T, alpha, beta, start, stop, out):
    n = T.shape[0]
    R = T[:, :3, :3]
    d = T[:, :3, 3]
    bad = (-1, -1)
    for b0 in range(start, stop, _ROW_BLOCK):
        b1 = min(b0 + _ROW_BLOCK, stop)
        Ri = R[b0:b1]
        # m[c, j] = Ri[c]^T R[j], summed over k in order
        m = np.sum(Ri[:, None, :, :, None] * R[None, :, :, None, :], axis=2)
        tr = m[..., 0, 0] + m[..., 1, 1] + m[..., 2, 2]
        sx = m[..., 2, 1] - m[..., 1, 2]
        sy = m[..., 0, 2] - m[..., 2, 0]
        sz = m[..., 1, 0] - m[..., 0, 1]
        s = 0.5 * np.sqrt(sx * sx + sy * sy + sz * sz)
        phi = np.arctan2(s, 0.5 * (tr - 1.0))
        dd = d[None, :, :] - d[b0:b1, None, :]
        dist = np.sqrt(alpha * phi * phi + beta * np.sum(dd * dd, axis=-1))
        rows = np.arange(b0, b1)
        upper = np.arange(n)[None, :] > rows[:, None]
        anti = (tr <= -1.0 + ANTIPODAL_TOL) & upper
        if bad[0] < 0 and anti.any():
            ci, cj = np.argwhere(anti)[0]
            bad = (int(rows[ci]), int(cj))
        dist[anti] = np.nan
        for c, i in enumerate(rows):
            out[i, i] = 0.0
            out[i, i + 1:] = dist[c, i + 1:]
            out[i + 1:, i] = dist[c, i + 1:]
    return bad


def _pair_key(a, b):
    return np.minimum(a, b), np.maximum(a, b)


def prim_mst(W):
    n = W.shape[0]
    edges = np.empty((max(n - 1, 0), 2), dtype=np.intp)
    if n < 2:
        return edges
    idx = np.arange(n)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    key = W[0].astype(float).copy()
    parent = np.zeros(n, dtype=np.intp)
    for step in range(n - 1):
        cand = np.flatnonzero(~in_tree)
        kmin = key[cand].min()
        tied = cand[key[cand] == kmin]
        lo, hi = _pair_key(parent[tied], tied)
        best = int(tied[np.lexsort((hi, lo))[0]])
        in_tree[best] = True
        p = int(parent[best])
        edges[step] = (min(p, best), max(p, best))
        w = W[best]
        new_lo, new_hi = _pair_key(np.full(n, best), idx)
        old_lo, old_hi = _pair_key(parent, idx)
        tie_better = (w == key) & ((new_lo < old_lo) | ((new_lo == old_lo) & (new_hi < old_hi)))
        upd = ~in_tree & ((w < key) | tie_better)
        key[upd] = w[upd]
        parent[upd] = best
    return edges


def nn_chain(W, start):
    n = W.shape[0]
    order = np.empty(n, dtype=np.intp)
    visited = np.zeros(n, dtype=bool)
    cur = int(start)
    visited[cur] = True
    order[0] = cur
    for step in range(1, n):
        row = np.where(visited, np.inf, W[cur])
        cur = int(np.argmin(row))
        visited[cur] = True
        order[step] = cur
    return order
