# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: SE(3) distance rows, dense Prim, greedy chaining.

Contracts match geoord._kernels_py exactly.
"""
import numpy as np

from libc.math cimport atan2, sqrt, NAN

cdef double ANTIPODAL_TOL = 1e-6


def se3_distance_rows(const double[:, :, ::1] T, double alpha, double beta,
                      Py_ssize_t start, Py_ssize_t stop, double[:, ::1] out):
    """Fill out[i, j] and out[j, i] for start <= i < stop, j > i.

    Returns the first (i, j) whose relative rotation is antipodal, or (-1, -1).
    """
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double m00, m01, m02, m10, m11, m12, m20, m21, m22
    cdef double tr, sx, sy, sz, s, c, phi, dx, dy, dz, dist
    cdef Py_ssize_t bad_i = -1, bad_j = -1
    with nogil:
        for i in range(start, stop):
            out[i, i] = 0.0
            for j in range(i + 1, n):
                # m = Ri^T Rj, summed over k in a fixed order
                m00 = 0.0; m01 = 0.0; m02 = 0.0
                m10 = 0.0; m11 = 0.0; m12 = 0.0
                m20 = 0.0; m21 = 0.0; m22 = 0.0
                for k in range(3):
                    m00 = m00 + T[i, k, 0] * T[j, k, 0]
                    m01 = m01 + T[i, k, 0] * T[j, k, 1]
                    m02 = m02 + T[i, k, 0] * T[j, k, 2]
                    m10 = m10 + T[i, k, 1] * T[j, k, 0]
                    m11 = m11 + T[i, k, 1] * T[j, k, 1]
                    m12 = m12 + T[i, k, 1] * T[j, k, 2]
                    m20 = m20 + T[i, k, 2] * T[j, k, 0]
                    m21 = m21 + T[i, k, 2] * T[j, k, 1]
                    m22 = m22 + T[i, k, 2] * T[j, k, 2]
                tr = m00 + m11 + m22
                if tr <= -1.0 + ANTIPODAL_TOL:
                    if bad_i < 0:
                        bad_i = i
                        bad_j = j
                    out[i, j] = NAN
                    out[j, i] = NAN
                    continue
                sx = m21 - m12
                sy = m02 - m20
                sz = m10 - m01
                s = 0.5 * sqrt(sx * sx + sy * sy + sz * sz)
                c = 0.5 * (tr - 1.0)
                phi = atan2(s, c)
                dx = T[j, 0, 3] - T[i, 0, 3]
                dy = T[j, 1, 3] - T[i, 1, 3]
                dz = T[j, 2, 3] - T[i, 2, 3]
                dist = sqrt(alpha * phi * phi + beta * (dx * dx + dy * dy + dz * dz))
                out[i, j] = dist
                out[j, i] = dist
    return bad_i, bad_j


cdef inline bint _pair_less(Py_ssize_t a, Py_ssize_t b, Py_ssize_t c, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t lo1 = a if a < b else b
    cdef Py_ssize_t hi1 = b if a < b else a
    cdef Py_ssize_t lo2 = c if c < d else d
    cdef Py_ssize_t hi2 = d if c < d else c
    if lo1 != lo2:
        return lo1 < lo2
    return hi1 < hi2


def prim_mst(const double[:, ::1] W):
    """Dense Prim from vertex 0; ties broken by the smaller (min, max) index pair.

    Returns an (n-1, 2) intp array of edges (i < j) in the order they were added.
    """
    cdef Py_ssize_t n = W.shape[0]
    cdef Py_ssize_t step, v, best, p
    cdef double w
    edges_arr = np.empty((max(n - 1, 0), 2), dtype=np.intp)
    cdef Py_ssize_t[:, ::1] edges = edges_arr
    if n < 2:
        return edges_arr
    key_arr = np.empty(n, dtype=np.float64)
    parent_arr = np.zeros(n, dtype=np.intp)
    in_tree_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] key = key_arr
    cdef Py_ssize_t[::1] parent = parent_arr
    cdef unsigned char[::1] in_tree = in_tree_arr
    with nogil:
        in_tree[0] = 1
        for v in range(n):
            key[v] = W[0, v]
            parent[v] = 0
        for step in range(n - 1):
            best = -1
            for v in range(n):
                if in_tree[v]:
                    continue
                if best < 0 or key[v] < key[best] or (
                        key[v] == key[best] and _pair_less(parent[v], v, parent[best], best)):
                    best = v
            in_tree[best] = 1
            p = parent[best]
            if p < best:
                edges[step, 0] = p
                edges[step, 1] = best
            else:
                edges[step, 0] = best
                edges[step, 1] = p
            for v in range(n):
                if in_tree[v]:
                    continue
                w = W[best, v]
                if w < key[v] or (w == key[v] and _pair_less(best, v, parent[v], v)):
                    key[v] = w
                    parent[v] = best
    return edges_arr


def nn_chain(const double[:, ::1] W, Py_ssize_t start):
    """Greedy chain from ``start`` to the nearest unvisited vertex (lowest index on ties)."""
    cdef Py_ssize_t n = W.shape[0]
    cdef Py_ssize_t step, v, cur, best
    order_arr = np.empty(n, dtype=np.intp)
    visited_arr = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t[::1] order = order_arr
    cdef unsigned char[::1] visited = visited_arr
    with nogil:
        cur = start
        visited[cur] = 1
        order[0] = cur
        for step in range(1, n):
            best = -1
            for v in range(n):
                if visited[v]:
                    continue
                if best < 0 or W[cur, v] < W[cur, best]:
                    best = v
            visited[best] = 1
            order[step] = best
            cur = best
    return order_arr
