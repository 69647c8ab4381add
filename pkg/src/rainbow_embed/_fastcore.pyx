# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the inner greedy loops.

Semantics must match _purecore exactly (scan order, tie-breaking,
outputs); the test suite and the benchmark subcommand both rely on that.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "fast"

cdef int _EXPLICIT = 0, _ND = 1, _ZSUM = 2, _Z2K = 3, _RR = 4, _RRM = 5


cdef inline long _colour(int kind, long a, long b,
                         long[::1] lut, long[:, ::1] table,
                         long u, long v) nogil:
    cdef long d, c
    if kind == _EXPLICIT:
        return table[u, v]
    if kind == _ND:
        d = (v - u) % a
        if d < 0:
            d += a
        if a - d < d:
            d = a - d
        return d - 1
    if kind == _ZSUM:
        return (u + v) % a
    if kind == _Z2K:
        return (u ^ v) - 1
    # round robin, optionally merged through lut; diagonal slots are not
    # edges and are pinned to 0 so lut indexing stays in bounds
    if u == v:
        c = 0
    elif v == a - 1:
        c = u
    elif u == a - 1:
        c = v
    else:
        c = (u + v) * b % (a - 1)
    if kind == _RRM:
        c = lut[c]
    return c


def colour_block(kind, a, b, lut, table, v, xs):
    """Colours of the edges {v, x} for x in xs."""
    cdef cnp.ndarray[long, ndim=1] xs_ = np.ascontiguousarray(xs, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] out = np.empty(xs_.shape[0], dtype=np.int64)
    cdef long[::1] lut_ = lut if lut is not None else np.empty(0, dtype=np.int64)
    cdef long[:, ::1] table_ = table if table is not None else np.empty((0, 0), dtype=np.int64)
    cdef int kind_ = kind
    cdef long a_ = a, b_ = b, v_ = v
    cdef Py_ssize_t i
    for i in range(xs_.shape[0]):
        out[i] = _colour(kind_, a_, b_, lut_, table_, v_, xs_[i])
    return out


def greedy_matching(kind, a, b, lut, table, A, X, colour_free, vertex_free):
    """Maximal greedy rainbow matching from A into X.

    Scans A in the given order; for each a takes the first x in X (in
    order) whose vertex and edge colour are both still free.  Mutates the
    colour_free / vertex_free masks in place and returns parallel arrays
    (matched_a, matched_x, matched_colour).
    """
    cdef cnp.ndarray[long, ndim=1] A_ = np.ascontiguousarray(A, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] X_ = np.ascontiguousarray(X, dtype=np.int64)
    cdef cnp.uint8_t[::1] cfree = colour_free.view(np.uint8)
    cdef cnp.uint8_t[::1] vfree = vertex_free.view(np.uint8)
    cdef long[::1] lut_ = lut if lut is not None else np.empty(0, dtype=np.int64)
    cdef long[:, ::1] table_ = table if table is not None else np.empty((0, 0), dtype=np.int64)
    cdef int kind_ = kind
    cdef long a_ = a, b_ = b
    cdef cnp.ndarray[long, ndim=1] out_a = np.empty(A_.shape[0], dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] out_x = np.empty(A_.shape[0], dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] out_c = np.empty(A_.shape[0], dtype=np.int64)
    cdef Py_ssize_t i, j, m = 0
    cdef long av, xv, cv
    for i in range(A_.shape[0]):
        av = A_[i]
        for j in range(X_.shape[0]):
            xv = X_[j]
            if not vfree[xv]:
                continue
            cv = _colour(kind_, a_, b_, lut_, table_, av, xv)
            if not cfree[cv]:
                continue
            vfree[xv] = 0
            cfree[cv] = 0
            out_a[m] = av
            out_x[m] = xv
            out_c[m] = cv
            m += 1
            break
    return out_a[:m].copy(), out_x[:m].copy(), out_c[:m].copy()


def star_fill(kind, a, b, lut, table, roots, demands, candidates, colour_free, vertex_free):
    """Greedy fill of stars with prescribed roots and leaf demands.

    For each root in order, scans `candidates` in order and claims free
    vertices whose edge colour is free, until the demand is met or the
    candidates run out.  Returns (root_index, leaf, colour) arrays.
    """
    cdef cnp.ndarray[long, ndim=1] roots_ = np.ascontiguousarray(roots, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] dem_ = np.ascontiguousarray(demands, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] cand_ = np.ascontiguousarray(candidates, dtype=np.int64)
    cdef cnp.uint8_t[::1] cfree = colour_free.view(np.uint8)
    cdef cnp.uint8_t[::1] vfree = vertex_free.view(np.uint8)
    cdef long[::1] lut_ = lut if lut is not None else np.empty(0, dtype=np.int64)
    cdef long[:, ::1] table_ = table if table is not None else np.empty((0, 0), dtype=np.int64)
    cdef int kind_ = kind
    cdef long a_ = a, b_ = b
    cdef long total = 0
    cdef Py_ssize_t i
    for i in range(dem_.shape[0]):
        total += dem_[i]
    cdef cnp.ndarray[long, ndim=1] out_r = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] out_leaf = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] out_c = np.empty(total, dtype=np.int64)
    cdef Py_ssize_t j, m = 0
    cdef long root, need, taken, xv, cv
    for i in range(roots_.shape[0]):
        root = roots_[i]
        need = dem_[i]
        if need <= 0:
            continue
        taken = 0
        for j in range(cand_.shape[0]):
            xv = cand_[j]
            if not vfree[xv]:
                continue
            cv = _colour(kind_, a_, b_, lut_, table_, root, xv)
            if not cfree[cv]:
                continue
            vfree[xv] = 0
            cfree[cv] = 0
            out_r[m] = i
            out_leaf[m] = xv
            out_c[m] = cv
            m += 1
            taken += 1
            if taken == need:
                break
    return out_r[:m].copy(), out_leaf[:m].copy(), out_c[:m].copy()
