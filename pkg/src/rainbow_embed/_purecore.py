"""Pure numpy fallback for the compiled kernels.

Must stay observationally identical to ``_fastcore``: same scan order,
same tie-breaking, same outputs.  The benchmark subcommand compares the
two backends on identical workloads.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

# kind codes mirror colouring.py
_EXPLICIT, _ND, _ZSUM, _Z2K, _RR, _RRM = range(6)


def colour_block(kind, a, b, lut, table, v, xs):
    """Colours of the edges {v, x} for x in xs."""
    xs = np.asarray(xs, dtype=np.int64)
    if kind == _EXPLICIT:
        return table[v, xs].astype(np.int64)
    if kind == _ND:
        d = (xs - v) % a
        return np.minimum(d, a - d) - 1
    if kind == _ZSUM:
        return (xs + v) % a
    if kind == _Z2K:
        return (xs ^ v) - 1
    out = np.where(xs == a - 1, v, np.where(v == a - 1, xs, (xs + v) * b % (a - 1)))
    # diagonal slots are not edges; pin them to 0 so lut indexing is safe
    out = np.where(xs == v, 0, out).astype(np.int64)
    if kind == _RRM:
        out = lut[out]
    return out


def greedy_matching(kind, a, b, lut, table, A, X, colour_free, vertex_free):
    """Maximal greedy rainbow matching from A into X.

    Scans A in the given order; for each a takes the first x in X (in
    order) whose vertex and edge colour are both still free.  Mutates the
    colour_free / vertex_free masks in place and returns parallel arrays
    (matched_a, matched_x, matched_colour).
    """
    A = np.asarray(A, dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)
    out_a, out_x, out_c = [], [], []
    for av in A:
        cols = colour_block(kind, a, b, lut, table, int(av), X)
        ok = vertex_free[X] & colour_free[cols]
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            continue
        i = int(hits[0])
        xv, cv = int(X[i]), int(cols[i])
        vertex_free[xv] = False
        colour_free[cv] = False
        out_a.append(int(av))
        out_x.append(xv)
        out_c.append(cv)
    return (
        np.asarray(out_a, dtype=np.int64),
        np.asarray(out_x, dtype=np.int64),
        np.asarray(out_c, dtype=np.int64),
    )


def star_fill(kind, a, b, lut, table, roots, demands, candidates, colour_free, vertex_free):
    """Greedy fill of stars with prescribed roots and leaf demands.

    Proper-colouring fast path (one edge of each colour per family): for
    each root in order, scans `candidates` ascending and claims free
    vertices whose edge colour is free, until the demand is met or the
    candidates run out.  Returns (root_index, leaf, colour) arrays.
    """
    roots = np.asarray(roots, dtype=np.int64)
    candidates = np.asarray(candidates, dtype=np.int64)
    out_r, out_leaf, out_c = [], [], []
    for ri, root in enumerate(roots):
        need = int(demands[ri])
        if need <= 0:
            continue
        cols = colour_block(kind, a, b, lut, table, int(root), candidates)
        ok = vertex_free[candidates] & colour_free[cols]
        hits = np.flatnonzero(ok)
        taken = 0
        for i in hits:
            xv, cv = int(candidates[i]), int(cols[i])
            # mask may have gone stale for colours claimed in this loop
            if not colour_free[cv] or not vertex_free[xv]:
                continue
            vertex_free[xv] = False
            colour_free[cv] = False
            out_r.append(ri)
            out_leaf.append(xv)
            out_c.append(cv)
            taken += 1
            if taken == need:
                break
    return (
        np.asarray(out_r, dtype=np.int64),
        np.asarray(out_leaf, dtype=np.int64),
        np.asarray(out_c, dtype=np.int64),
    )
