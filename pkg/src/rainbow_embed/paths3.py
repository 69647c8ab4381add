"""Length-3 rainbow path systems between prescribed endpoint pairs.

Paths u-x-y-v have both interior vertices in a reserve set Y and all
three edge colours drawn from a colour set C, distinct within the path
and across the whole system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ParameterError


@dataclass(frozen=True)
class PathRequest:
    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise ParameterError("path endpoints must be distinct")


@dataclass
class RainbowPathSystem:
    paths: list  # [u, x, y, v] per connected request
    unconnected: list = field(default_factory=list)  # (u, v) pairs left over

    @property
    def colour_count(self):
        return 3 * len(self.paths)

    def validate(self, colouring, Y=None, C=None):
        interiors, colours = set(), set()
        for u, x, y, v in self.paths:
            cs = [colouring.colour_of(u, x), colouring.colour_of(x, y), colouring.colour_of(y, v)]
            for w in (x, y):
                if w in interiors:
                    raise ParameterError(f"interior vertex {w} reused")
                interiors.add(w)
                if Y is not None and w not in Y:
                    raise ParameterError(f"interior vertex {w} outside the reserve")
            for c in cs:
                if c in colours:
                    raise ParameterError(f"colour {c} reused in path system")
                colours.add(c)
                if C is not None and c not in C:
                    raise ParameterError(f"colour {c} outside the allowed set")
        return True


def _path_candidates(colouring, u, v, Y_arr, cmask, vfree, cused):
    """Yield (x, y, c1, c2, c3) in lexicographic (x, y) order over free
    interiors with all three colours allowed, unused, and distinct."""
    spec = colouring.kernel_spec()
    row_u = kernels.colour_block(*spec, u, Y_arr)
    row_v = kernels.colour_block(*spec, v, Y_arr)
    ok_u = cmask[row_u] & ~cused[row_u]
    ok_v = cmask[row_v] & ~cused[row_v]
    for ix in range(len(Y_arr)):
        x = int(Y_arr[ix])
        if not vfree[ix] or not ok_u[ix] or x == v:
            continue
        c1 = int(row_u[ix])
        row_x = kernels.colour_block(*spec, x, Y_arr)
        mask = (
            vfree
            & ok_v
            & cmask[row_x]
            & ~cused[row_x]
            & (row_x != c1)
            & (row_v != c1)
            & (row_x != row_v)
            & (Y_arr != u)
        )
        mask[ix] = False
        for iy in np.flatnonzero(mask):
            iy = int(iy)
            yield x, int(Y_arr[iy]), ix, iy, c1, int(row_x[iy]), int(row_v[iy])


def enumerate_rainbow_3paths(colouring, u, v, Y, C, limit):
    """Up to `limit` internally vertex-disjoint rainbow u-v paths with
    interiors in Y and colours in C, greedily extracted in index order."""
    Y_arr = np.asarray(sorted(set(int(w) for w in Y) - {int(u), int(v)}), dtype=np.int64)
    cmask = colouring.colour_mask(C)
    cused = np.zeros(colouring.n_colours, dtype=bool)
    vfree = np.ones(len(Y_arr), dtype=bool)
    out = []
    while len(out) < limit:
        # candidates are recomputed after every accepted path so interior
        # and colour freshness stay current
        found = next(_path_candidates(colouring, u, v, Y_arr, cmask, vfree, cused), None)
        if found is None:
            break
        x, y, ix, iy, c1, c2, c3 = found
        out.append([int(u), x, y, int(v)])
        vfree[ix] = vfree[iy] = False
        cused[[c1, c2, c3]] = True
    return out


def connect_pairs_disjointly(colouring, requests, Y, C, budget=100000):
    """One collectively-rainbow length-3 path per request, interiors in Y.

    Greedy in request order; when a request cannot be connected, the most
    recently placed path is retracted and that request advances past its
    previous choice (bounded backtracking).
    """
    requests = [r if isinstance(r, PathRequest) else PathRequest(*r) for r in requests]
    ends = [e for r in requests for e in (r.u, r.v)]
    if len(set(ends)) != len(ends):
        raise ParameterError("request endpoints must be pairwise distinct")
    Y_arr = np.asarray(sorted(set(int(w) for w in Y) - set(ends)), dtype=np.int64)
    cmask = colouring.colour_mask(C)
    cused = np.zeros(colouring.n_colours, dtype=bool)
    vfree = np.ones(len(Y_arr), dtype=bool)
    backtracks_left = 2 * len(requests)

    chosen = []  # (x, y, ix, iy, c1, c2, c3) per connected request
    skip = [0] * len(requests)  # candidates to skip past after a retraction
    i = 0
    steps = budget
    while i < len(requests) and steps > 0:
        r = requests[i]
        found = None
        for t, cand in enumerate(
            _path_candidates(colouring, r.u, r.v, Y_arr, cmask, vfree, cused)
        ):
            steps -= 1
            if t >= skip[i]:
                found = cand
                break
            if steps <= 0:
                break
        if found is not None:
            x, y, ix, iy, c1, c2, c3 = found
            chosen.append(found)
            vfree[ix] = vfree[iy] = False
            cused[[c1, c2, c3]] = True
            i += 1
        else:
            if not chosen or backtracks_left <= 0:
                break
            backtracks_left -= 1
            x, y, ix, iy, c1, c2, c3 = chosen.pop()
            i -= 1
            vfree[ix] = vfree[iy] = True
            cused[[c1, c2, c3]] = False
            skip[i] += 1
            for t in range(i + 1, len(requests)):
                skip[t] = 0
    paths = [
        [requests[t].u, cand[0], cand[1], requests[t].v] for t, cand in enumerate(chosen)
    ]
    return RainbowPathSystem(paths, unconnected=[(r.u, r.v) for r in requests[len(chosen) :]])
