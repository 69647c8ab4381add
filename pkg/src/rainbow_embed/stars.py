"""Vertex-disjoint star families with bounded colour multiplicity.

A family of stars at prescribed roots is k-bounded when at most k of its
edges share any colour, and rainbow when at most one does.  Rainbow
families are produced in two steps: fill stars greedily under the k
multiplicity cap (with an eviction chase when a star is starved), then
select one leaf per colour through a generalized bipartite matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ParameterError, RainbowError

EXHAUSTIVE_CUTOFF = 40


@dataclass(frozen=True)
class StarRequest:
    root: int
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise ParameterError("star degree must be >= 1")


@dataclass
class StarFamily:
    stars: list  # (root, [leaves]) per request, in request order
    colours: list  # per star, colour of each root-leaf edge
    deficiency: dict = field(default_factory=dict)  # star index -> missing leaves
    trace: dict = field(default_factory=dict)

    @property
    def total_leaves(self):
        return sum(len(ls) for _, ls in self.stars)

    def colour_multiset(self):
        out = {}
        for cs in self.colours:
            for c in cs:
                out[c] = out.get(c, 0) + 1
        return out

    def validate(self, colouring, max_multiplicity):
        roots = [r for r, _ in self.stars]
        if len(set(roots)) != len(roots):
            raise ParameterError("duplicate star roots")
        seen = set(roots)
        for (root, leaves), cs in zip(self.stars, self.colours):
            if len(leaves) != len(cs):
                raise ParameterError("leaf/colour length mismatch")
            for leaf, c in zip(leaves, cs):
                if leaf in seen:
                    raise ParameterError(f"vertex {leaf} reused in star family")
                seen.add(leaf)
                if colouring.colour_of(root, leaf) != c:
                    raise ParameterError(f"edge ({root},{leaf}) is not colour {c}")
        for c, cnt in self.colour_multiset().items():
            if cnt > max_multiplicity:
                raise ParameterError(f"colour {c} used {cnt} > {max_multiplicity} times")
        return True


class _StarState:
    def __init__(self, colouring, requests, forbidden_vertices, forbidden_colours, cap):
        self.col = colouring
        self.requests = requests
        self.cap = np.full(colouring.n_colours, cap, dtype=np.int64)
        fc = colouring.colour_mask(forbidden_colours)
        self.cap[fc] = 0
        self.free = np.ones(colouring.n, dtype=bool)
        for v in forbidden_vertices:
            self.free[int(v)] = False
        for r in requests:
            self.free[r.root] = False
        self.leaves = [[] for _ in requests]  # leaf lists per star
        self.holder = {}  # colour -> list of (star index, leaf)
        self.spec = colouring.kernel_spec()
        self.rows = {}

    def row(self, root):
        if root not in self.rows:
            self.rows[root] = kernels.colour_block(
                *self.spec, root, np.arange(self.col.n, dtype=np.int64)
            )
        return self.rows[root]

    def take(self, i, leaf, c):
        self.free[leaf] = False
        self.cap[c] -= 1
        self.leaves[i].append(leaf)
        self.holder.setdefault(c, []).append((i, leaf))

    def drop(self, i, leaf, c):
        self.free[leaf] = True
        self.cap[c] += 1
        self.leaves[i].remove(leaf)
        self.holder[c].remove((i, leaf))

    def greedy_fill(self, i):
        """Claim leaves for star i while its demand and colour caps allow."""
        need = self.requests[i].degree - len(self.leaves[i])
        if need <= 0:
            return
        row = self.row(self.requests[i].root)
        ok = self.free & (self.cap[row] > 0)
        for leaf in np.flatnonzero(ok):
            leaf = int(leaf)
            c = int(row[leaf])
            if self.cap[c] <= 0 or not self.free[leaf]:
                continue
            self.take(i, leaf, c)
            need -= 1
            if need == 0:
                return

    def chase(self, i, forbidden, depth, budget):
        """Find one extra leaf for star i, evicting along saturated colours.

        Evicting a leaf of colour c from another star forces that star to
        find a replacement, recursively.  Total leaf count grows by one
        per successful top-level call.
        """
        if depth < 0 or budget[0] <= 0:
            return False
        root = self.requests[i].root
        row = self.row(root)
        ok = self.free.copy()
        for v in forbidden:
            if v < len(ok):
                ok[v] = False
        cands = np.flatnonzero(ok)
        cs = row[cands]
        # pass 1: an unsaturated colour finishes the chase
        hit = np.flatnonzero(self.cap[cs] > 0)
        if len(hit):
            t = int(hit[0])
            self.take(i, int(cands[t]), int(cs[t]))
            return True
        # pass 2: evict a holder of a saturated colour and let it refill
        for t in np.flatnonzero(self.cap[cs] == 0):
            leaf = int(cands[t])
            c = int(cs[t])
            if not self.free[leaf] or self.cap[c] != 0:
                continue  # state moved under us during recursion
            for i2, leaf2 in list(self.holder.get(c, [])):
                if i2 == i or leaf2 in forbidden:
                    continue
                budget[0] -= 1
                if budget[0] <= 0:
                    return False
                self.drop(i2, leaf2, c)
                self.take(i, leaf, c)
                if self.chase(i2, forbidden | {leaf, leaf2, root}, depth - 1, budget):
                    return True
                self.drop(i, leaf, c)
                self.take(i2, leaf2, c)
        return False

    def family(self):
        stars, colours, deficiency = [], [], {}
        for i, req in enumerate(self.requests):
            ls = sorted(self.leaves[i])
            row = self.row(req.root)
            stars.append((req.root, ls))
            colours.append([int(row[leaf]) for leaf in ls])
            if len(ls) < req.degree:
                deficiency[i] = req.degree - len(ls)
        return StarFamily(stars, colours, deficiency)


def find_k_bounded_stars(colouring, requests, forbidden_vertices, forbidden_colours, budget=200000):
    """Disjoint stars at the requested roots and degrees with at most k
    edges of any colour across the family; deficiencies are reported in
    the result rather than raised."""
    requests = [r if isinstance(r, StarRequest) else StarRequest(*r) for r in requests]
    roots = [r.root for r in requests]
    if len(set(roots)) != len(roots):
        raise ParameterError("star roots must be distinct")
    st = _StarState(colouring, requests, forbidden_vertices, forbidden_colours, colouring.k)
    for i in range(len(requests)):
        st.greedy_fill(i)
    bud = [budget]
    for i in range(len(requests)):
        while len(st.leaves[i]) < requests[i].degree and bud[0] > 0:
            before = sum(len(ls) for ls in st.leaves)
            if not st.chase(i, frozenset(), 6, bud):
                break
            assert sum(len(ls) for ls in st.leaves) == before + 1
    fam = st.family()
    fam.trace["budget_left"] = bud[0]
    return fam


def hall_select_rainbow_substars(family, targets):
    """From a k-bounded family with k*d_i leaves per star, select d_i
    leaves per star so the whole family is rainbow.

    Realized as a generalized bipartite matching between star indices and
    colours (colour capacity one, star i demanding d_i units).
    """
    ncs = len(family.stars)
    if len(targets) != ncs:
        raise ParameterError("targets length mismatch")
    by_star = []  # star -> {colour: [leaves]}
    for (root, leaves), cs in zip(family.stars, family.colours):
        d = {}
        for leaf, c in zip(leaves, cs):
            d.setdefault(c, []).append(leaf)
        by_star.append(d)
    owner = {}  # colour -> star index
    order = [sorted(d) for d in by_star]

    # greedy pre-assignment covers almost all demand; alternating paths
    # only have to repair the leftovers
    remaining = list(targets)
    for i, cs in enumerate(order):
        for c in cs:
            if remaining[i] == 0:
                break
            if c not in owner:
                owner[c] = i
                remaining[i] -= 1

    def augment(i0):
        # iterative alternating-path search (star demands can reach the
        # thousands, far past the recursion limit)
        seen = set()
        stack = [(i0, iter(order[i0]), None)]
        while stack:
            i, it, _ = stack[-1]
            for c in it:
                if c in seen or owner.get(c) == i:
                    continue
                seen.add(c)
                if c not in owner:
                    owner[c] = i
                    for t in range(len(stack) - 1, 0, -1):
                        owner[stack[t][2]] = stack[t - 1][0]
                    return True
                stack.append((owner[c], iter(order[owner[c]]), c))
                break
            else:
                stack.pop()
        return False

    for i, d_i in enumerate(remaining):
        for _ in range(d_i):
            if not augment(i):
                raise RainbowError(
                    f"internal inconsistency: colour selection infeasible at star {i}"
                )

    assigned = [[] for _ in range(ncs)]
    for c, i in sorted(owner.items()):
        assigned[i].append(c)
    stars, colours = [], []
    for i, (root, _) in enumerate(family.stars):
        cs = sorted(assigned[i])
        ls = [min(by_star[i][c]) for c in cs]
        order = np.argsort(ls)
        stars.append((root, [ls[t] for t in order]))
        colours.append([cs[t] for t in order])
    return StarFamily(stars, colours)


def _exhaustive_rainbow_stars(colouring, requests, forbidden_vertices, forbidden_colours):
    """Backtracking search over leaf assignments; tiny hosts only."""
    n = colouring.n
    free = [
        v
        for v in range(n)
        if v not in set(map(int, forbidden_vertices)) and v not in {r.root for r in requests}
    ]
    banned = colouring.colour_mask(forbidden_colours)
    sol = [[] for _ in requests]

    def rec(i, used_v, used_c):
        if i == len(requests):
            return True
        root, need = requests[i].root, requests[i].degree

        def pick(t, start, taken):
            if t == need:
                sol[i] = list(taken)
                if rec(i + 1, used_v, used_c):
                    return True
                for leaf in taken:
                    used_v.discard(leaf)
                    used_c.discard(colouring.colour_of(root, leaf))
                return False
            for s in range(start, len(free)):
                leaf = free[s]
                if leaf in used_v:
                    continue
                c = colouring.colour_of(root, leaf)
                if banned[c] or c in used_c:
                    continue
                used_v.add(leaf)
                used_c.add(c)
                if pick(t + 1, s + 1, taken + [leaf]):
                    return True
                used_v.discard(leaf)
                used_c.discard(c)
            return False

        return pick(0, 0, [])

    if rec(0, set(), set()):
        stars = [(r.root, sorted(ls)) for r, ls in zip(requests, sol)]
        colours = [[colouring.colour_of(root, leaf) for leaf in ls] for root, ls in stars]
        return StarFamily(stars, colours)
    return None


def find_disjoint_rainbow_stars(
    colouring, requests, forbidden_vertices, forbidden_colours, epsilon=0.1, budget=200000
):
    """Disjoint collectively-rainbow stars with the requested degrees:
    a k-bounded family at k-fold degrees, thinned by colour selection.
    Falls back to exhaustive search on tiny hosts."""
    requests = [r if isinstance(r, StarRequest) else StarRequest(*r) for r in requests]
    if not requests:
        return StarFamily([], [])
    k = colouring.k
    inflated = [StarRequest(r.root, k * r.degree) for r in requests]
    fam = find_k_bounded_stars(colouring, inflated, forbidden_vertices, forbidden_colours, budget)
    if not fam.deficiency:
        return hall_select_rainbow_substars(fam, [r.degree for r in requests])
    if colouring.n <= EXHAUSTIVE_CUTOFF:
        exact = _exhaustive_rainbow_stars(
            colouring, requests, forbidden_vertices, forbidden_colours
        )
        if exact is not None:
            return exact
    # report the deficiency at the requested (not inflated) degrees
    out = StarFamily([], [])
    targets = []
    for i, r in enumerate(requests):
        have = len(fam.stars[i][1]) // k
        targets.append(min(r.degree, have))
        if targets[-1] < r.degree:
            out.deficiency[i] = r.degree - targets[-1]
    thin = hall_select_rainbow_substars(fam, targets)
    out.stars, out.colours = thin.stars, thin.colours
    return out
