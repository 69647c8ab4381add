"""Rainbow matchings from a vertex set A into a disjoint target set X.

A rainbow matching uses pairwise disjoint vertices and pairwise distinct
edge colours drawn from an allowed colour set C.  The workhorse is a
greedy seed followed by switching: to place a still-unused colour c, take
any colour-c edge (a, x), evict the matching edges covering a and x, and
recursively re-place the evicted colours on fresh same-colour edges.
Each successful chain grows the matching by exactly one edge and never
changes the colour of a relocated edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CompletionError, ParameterError, SizeError

BRUTE_FORCE_A_CUTOFF = 10
BRUTE_FORCE_X_CUTOFF = 16


@dataclass
class SwitchingParams:
    max_layers: int = 6
    disjoint_edge_threshold: int = 4
    node_budget: int = 10**6

    def __post_init__(self):
        if self.max_layers < 1 or self.disjoint_edge_threshold < 1 or self.node_budget < 1:
            raise ParameterError("switching parameters must be positive")


@dataclass
class RainbowMatching:
    edges: list  # (a, x) pairs, a on the A side
    colours: list  # colour of each edge, parallel to `edges`
    budget_exhausted: bool = False
    trace: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.edges)

    def covered_a(self):
        return {a for a, _ in self.edges}

    def covered_x(self):
        return {x for _, x in self.edges}

    def validate(self, colouring, A=None, X=None, C=None):
        """Raise ParameterError on any violated matching invariant."""
        seen_v, seen_c = set(), set()
        for (a, x), c in zip(self.edges, self.colours):
            if colouring.colour_of(a, x) != c:
                raise ParameterError(f"edge ({a},{x}) does not have colour {c}")
            if a in seen_v or x in seen_v:
                raise ParameterError(f"vertex reused by edge ({a},{x})")
            seen_v.update((a, x))
            if c in seen_c:
                raise ParameterError(f"colour {c} used twice")
            seen_c.add(c)
            if A is not None and a not in A:
                raise ParameterError(f"vertex {a} outside A")
            if X is not None and x not in X:
                raise ParameterError(f"vertex {x} outside X")
            if C is not None and c not in C:
                raise ParameterError(f"colour {c} outside C")
        return True


def _as_sorted_array(vs):
    return np.asarray(sorted(int(v) for v in vs), dtype=np.int64)


def _check_disjoint(A, X):
    if set(A) & set(X):
        raise ParameterError("A and X must be disjoint")


def greedy_rainbow_matching(colouring, A, X, C):
    """Maximal rainbow matching by first-fit scan of A and X in index order."""
    _check_disjoint(A, X)
    A_arr, X_arr = _as_sorted_array(A), _as_sorted_array(X)
    colour_free = colouring.colour_mask(C)
    vertex_free = np.zeros(colouring.n, dtype=bool)
    if len(X_arr):
        vertex_free[X_arr] = True
    kind, a, b, lut, table = colouring.kernel_spec()
    out_a, out_x, out_c = kernels.greedy_matching(
        kind, a, b, lut, table, A_arr, X_arr, colour_free, vertex_free
    )
    return RainbowMatching(list(zip(out_a.tolist(), out_x.tolist())), out_c.tolist())


class _Switcher:
    """Recursive colour-placement search over a live matching state."""

    def __init__(self, colouring, A, X, C, params):
        self.col = colouring
        self.A = _as_sorted_array(A)
        self.X = _as_sorted_array(X)
        self.Cmask = colouring.colour_mask(C)
        self.params = params
        self.budget = params.node_budget
        self.cover_a = {}  # a -> (x, c)
        self.cover_x = {}  # x -> (a, c)
        self.used = {}  # colour -> (a, x)
        self.log = []  # journal of (op, c, a, x) for rollback
        spec = colouring.kernel_spec()
        # per-a colour rows over X, cached (A and X are modest by contract)
        self.rows = {
            int(av): kernels.colour_block(*spec, int(av), self.X) for av in self.A
        }

    def seed(self, matching):
        for (a, x), c in zip(matching.edges, matching.colours):
            self.cover_a[a] = (x, c)
            self.cover_x[x] = (a, c)
            self.used[c] = (a, x)

    def _add(self, c, a, x):
        self.cover_a[a] = (x, c)
        self.cover_x[x] = (a, c)
        self.used[c] = (a, x)
        self.log.append(("add", c, a, x))

    def _del(self, c, a, x):
        del self.cover_a[a]
        del self.cover_x[x]
        del self.used[c]
        self.log.append(("del", c, a, x))

    def _rollback(self, mark):
        while len(self.log) > mark:
            op, c, a, x = self.log.pop()
            if op == "add":
                del self.cover_a[a]
                del self.cover_x[x]
                del self.used[c]
            else:
                self.cover_a[a] = (x, c)
                self.cover_x[x] = (a, c)
                self.used[c] = (a, x)

    def _place(self, c, forbidden, depth):
        """Try to put colour c on some A-X edge avoiding `forbidden`.

        Evicted edges are re-placed recursively with their own colours;
        returns True with the state mutated, or False with it restored
        (cascaded changes are journaled and rolled back together).
        """
        if depth < 0:
            return False
        for av in self.A:
            a = int(av)
            if a in forbidden:
                continue
            self.budget -= 1
            if self.budget < 0:
                return False
            row = self.rows[a]
            for i in np.flatnonzero(row == c):
                self.budget -= 1
                if self.budget < 0:
                    return False
                x = int(self.X[i])
                if x in forbidden:
                    continue
                e1 = self.cover_a.get(a)
                e2 = self.cover_x.get(x)
                evicted = []
                if e1 is not None:
                    evicted.append((a, e1[0], e1[1]))
                # when (a, x) is already a matching edge, e1 and e2 are the
                # same edge; evict it once
                if e2 is not None and (e1 is None or e1[0] != x):
                    evicted.append((e2[0], x, e2[1]))
                mark = len(self.log)
                for ea, ex, ec in evicted:
                    self._del(ec, ea, ex)
                self._add(c, a, x)
                sub = forbidden | {a, x}
                if all(self._place(ec, sub, depth - 1) for _, _, ec in evicted):
                    return True
                self._rollback(mark)
        return False

    def run(self):
        improved = True
        while improved and self.budget > 0:
            improved = False
            unused = sorted(
                c for c in np.flatnonzero(self.Cmask).tolist() if c not in self.used
            )
            for c in unused:
                before = len(self.used)
                if self._place(c, frozenset(), self.params.max_layers):
                    assert len(self.used) == before + 1
                    self.log.clear()
                    improved = True
                    break
                if self.budget <= 0:
                    break
        edges, colours = [], []
        for c in sorted(self.used):
            a, x = self.used[c]
            edges.append((a, x))
            colours.append(c)
        return RainbowMatching(edges, colours, budget_exhausted=self.budget <= 0)


def switching_rainbow_matching(colouring, A, X, C, params=None):
    """Greedy seed plus switching augmentation; size never below greedy."""
    _check_disjoint(A, X)
    params = params or SwitchingParams()
    seed = greedy_rainbow_matching(colouring, A, X, C)
    sw = _Switcher(colouring, A, X, C, params)
    sw.seed(seed)
    out = sw.run()
    assert out.size >= seed.size
    out.trace["greedy_size"] = seed.size
    return out


def brute_force_rainbow_matching(colouring, A, X, C):
    """Maximum rainbow matching by exhaustive branch and bound (oracle)."""
    _check_disjoint(A, X)
    A_list = sorted(set(int(v) for v in A))
    X_list = sorted(set(int(v) for v in X))
    if len(A_list) > BRUTE_FORCE_A_CUTOFF or len(X_list) > BRUTE_FORCE_X_CUTOFF:
        raise SizeError(
            f"brute force bounded at |A| <= {BRUTE_FORCE_A_CUTOFF}, |X| <= {BRUTE_FORCE_X_CUTOFF}"
        )
    Cset = set(int(c) for c in np.flatnonzero(colouring.colour_mask(C)).tolist())
    best = {"edges": [], "colours": []}

    def rec(i, used_x, used_c, cur):
        if len(cur) > len(best["edges"]):
            best["edges"] = [e for e, _ in cur]
            best["colours"] = [c for _, c in cur]
        if i == len(A_list) or len(cur) + (len(A_list) - i) <= len(best["edges"]):
            return
        a = A_list[i]
        for x in X_list:
            if x in used_x:
                continue
            c = colouring.colour_of(a, x)
            if c not in Cset or c in used_c:
                continue
            cur.append(((a, x), c))
            rec(i + 1, used_x | {x}, used_c | {c}, cur)
            cur.pop()
        rec(i + 1, used_x, used_c, cur)

    rec(0, frozenset(), frozenset(), [])
    return RainbowMatching(best["edges"], best["colours"])


def complete_matching_greedy(colouring, partial, A_uncovered, Z, C_reserve):
    """Cover every vertex of A_uncovered using fresh vertices from the
    reserve Z and fresh colours from C_reserve.

    Raises CompletionError naming the first vertex with no usable edge.
    """
    A_unc = sorted(set(int(v) for v in A_uncovered))
    if not A_unc:
        return partial
    used_v = partial.covered_a() | partial.covered_x()
    used_c = set(partial.colours)
    cmask = colouring.colour_mask(C_reserve)
    Z_arr = _as_sorted_array(set(Z) - used_v - set(A_unc))
    spec = colouring.kernel_spec()
    edges = list(partial.edges)
    colours = list(partial.colours)
    zfree = np.ones(len(Z_arr), dtype=bool)
    for a in A_unc:
        if a in used_v:
            raise ParameterError(f"vertex {a} already covered")
        row = kernels.colour_block(*spec, a, Z_arr) if len(Z_arr) else np.empty(0, np.int64)
        hit = None
        for i in np.flatnonzero(zfree & cmask[row] if len(Z_arr) else []):
            c = int(row[i])
            if c in used_c:
                continue
            hit = (int(Z_arr[i]), c, int(i))
            break
        if hit is None:
            raise CompletionError(a)
        z, c, i = hit
        zfree[i] = False
        used_c.add(c)
        used_v.update((a, z))
        edges.append((a, z))
        colours.append(c)
    return RainbowMatching(edges, colours, trace=dict(partial.trace))
