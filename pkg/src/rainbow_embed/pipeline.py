"""End-to-end rainbow tree embedding.

Stages: split the tree into layers; sample a vertex/colour reserve
(X0, C0); embed the base forest greedily inside the reserve; find a
collectively rainbow reservoir star around each high-degree root; sample
a coupled partition of the remaining vertices and colours into one class
per layer; attach star leaves from class 1; realize each leaf layer by a
rainbow matching into its class (topped up from the reserve); realize
the single short-path layer inside the reserve; validate and account for
reserve consumption.  Any stage failure triggers a retry with a fresh
seed.  Tiny instances go to an exact backtracking search instead, and
moderate hosts to a direct greedy embedding with restarts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ParameterError, RainbowError, SizeError
from .matching import (
    SwitchingParams,
    greedy_rainbow_matching,
    switching_rainbow_matching,
)
from .paths3 import connect_pairs_disjointly
from .stars import StarRequest, find_disjoint_rainbow_stars
from .trees import KIND_LEAVES, KIND_PATHS3, Tree, split_tree

BRUTE_FORCE_T_CUTOFF = 10
BRUTE_FORCE_N_CUTOFF = 20


class StageFailure(RainbowError):
    """A pipeline stage missed its target for the current sample."""

    def __init__(self, stage, detail=""):
        self.stage = stage
        super().__init__(f"stage {stage} failed" + (f": {detail}" if detail else ""))


@dataclass
class PipelineConfig:
    epsilon: float = 0.2
    mu: float = 0.02
    D: int = None  # default: min(ceil(log^2 n), 10)
    p0: float = None  # default: chosen per instance from a feasibility scan
    retries: int = 10
    seed: int = 0
    fallback_cutoff: int = 20  # at most this many host vertices -> exact search
    midsize_cutoff: int = 600  # below this, direct greedy embedding with restarts
    switching: SwitchingParams = field(default_factory=SwitchingParams)

    def __post_init__(self):
        if not (0 < self.mu < self.epsilon < 1):
            raise ParameterError("need 0 < mu < epsilon < 1")
        if self.p0 is not None and not (0 < self.p0 < 1):
            raise ParameterError("p0 must be in (0,1)")
        if self.retries < 1:
            raise ParameterError("retries must be >= 1")


@dataclass
class RainbowEmbedding:
    vertex_map: list  # host vertex per tree vertex
    colours: list  # colour per tree edge, parallel to Tree.edges

    def validate(self, colouring, T):
        if len(self.vertex_map) != T.n:
            raise ParameterError("vertex map has wrong length")
        if len(set(self.vertex_map)) != T.n:
            raise ParameterError("vertex map is not injective")
        seen = set()
        for (u, v), c in zip(T.edges, self.colours):
            real = colouring.colour_of(self.vertex_map[u], self.vertex_map[v])
            if real != c:
                raise ParameterError(f"edge ({u},{v}) colour mismatch: {real} != {c}")
            if c in seen:
                raise ParameterError(f"colour {c} repeated: embedding is not rainbow")
            seen.add(c)
        return True


@dataclass
class EmbedOutcome:
    success: bool
    embedding: RainbowEmbedding = None
    proven_absent: bool = False
    trace: dict = field(default_factory=dict)


def embedding_from_map(colouring, T, vmap):
    colours = [colouring.colour_of(vmap[u], vmap[v]) for u, v in T.edges]
    return RainbowEmbedding(list(vmap), colours)


# -- probabilities and partitions ---------------------------------------


def layer_probabilities(layer_sizes, n, k, epsilon, p0):
    """p_i = (1+eps/4) k m_i / n + eps/(4 ell) for i < ell; the last layer
    takes the complement so that p0 + sum = 1 exactly."""
    ell = len(layer_sizes)
    if ell < 1:
        raise ParameterError("need at least one layer")
    if min(layer_sizes) < 0 or not (0 < p0 < 1):
        raise ParameterError("bad layer sizes or p0")
    ps = [(1 + epsilon / 4) * k * m / n + epsilon / (4 * ell) for m in layer_sizes[:-1]]
    last = 1.0 - p0 - sum(ps)
    if last <= 0:
        raise ParameterError("infeasible parameters: tree too large for this epsilon")
    ps.append(last)
    assert all(p > 0 for p in ps)
    assert abs(p0 + sum(ps) - 1.0) < 1e-12
    return ps


@dataclass
class PartitionPlan:
    probabilities: list  # p0 .. p_ell
    vertex_class: np.ndarray
    colour_class: np.ndarray
    pairing: dict  # vertex -> colour (injective both ways)

    def vertices_in(self, i):
        return np.flatnonzero(self.vertex_class == i)

    def colours_in(self, i):
        return np.flatnonzero(self.colour_class == i)

    def check_coupling(self):
        for x, c in self.pairing.items():
            if (self.vertex_class[x] == 1) != (self.colour_class[c] == 1):
                raise ParameterError(f"coupling violated for pair ({x},{c})")
        return True


def sample_partitions(colouring, probabilities, pairing, seed, X0=None, C0=None):
    """Partition vertices and colours into classes 0..ell with the given
    marginals.  Paired colours follow their partner vertex into or out of
    class 1; everything else is independent.  X0/C0 masks, when given,
    freeze class 0."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = np.asarray(probabilities, dtype=float)
    if abs(float(probs.sum()) - 1.0) > 1e-9 or (probs <= 0).any():
        raise ParameterError("probabilities must be positive and sum to 1")
    ell = len(probs) - 1
    n, nc = colouring.n, colouring.n_colours
    for x, c in pairing.items():
        if X0 is not None and X0[x]:
            raise ParameterError("paired vertex inside X0")
        if C0 is not None and C0[c]:
            raise ParameterError("paired colour inside C0")

    if X0 is None:
        vclass = rng.choice(ell + 1, size=n, p=probs)
    else:
        vclass = np.zeros(n, dtype=np.int64)
        rest = np.flatnonzero(~X0)
        cond = probs[1:] / (1.0 - probs[0])
        vclass[rest] = rng.choice(np.arange(1, ell + 1), size=len(rest), p=cond)

    cclass = np.zeros(nc, dtype=np.int64)
    paired_c = np.zeros(nc, dtype=bool)
    for x, c in pairing.items():
        paired_c[c] = True
    if C0 is None:
        free_c = np.flatnonzero(~paired_c)
        cclass[free_c] = rng.choice(ell + 1, size=len(free_c), p=probs)
    else:
        free_c = np.flatnonzero(~paired_c & ~C0)
        cond = probs[1:] / (1.0 - probs[0])
        cclass[free_c] = rng.choice(np.arange(1, ell + 1), size=len(free_c), p=cond)
    # paired colours: follow the partner into class 1, else resample among
    # the remaining classes with the conditional marginals
    others = [i for i in range(ell + 1) if i != 1 and not (i == 0 and X0 is not None)]
    q = probs[others] / probs[others].sum()
    for x, c in sorted(pairing.items()):
        if vclass[x] == 1:
            cclass[c] = 1
        else:
            cclass[c] = others[int(rng.choice(len(others), p=q))]
    plan = PartitionPlan(list(probs), vclass, cclass, dict(pairing))
    plan.check_coupling()
    return plan


# -- greedy and exact embedders ----------------------------------------


def _components(vertices, adj):
    vs = sorted(vertices)
    vset = set(vs)
    seen, comps = set(), []
    for v in vs:
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            w = stack.pop()
            comp.append(w)
            for z in adj[w]:
                if z in vset and z not in seen:
                    seen.add(z)
                    stack.append(z)
        comps.append(sorted(comp))
    return comps


def _greedy_embed_forest(colouring, vertices, adj, host_pool, cmask, rng=None, node_budget=100000):
    """Rainbow-embed a forest into the host pool using allowed colours.

    BFS-order extension with backtracking per component; returns a dict
    tree vertex -> host, or None on failure.
    """
    spec = colouring.kernel_spec()
    hosts = np.asarray(sorted(host_pool), dtype=np.int64)
    free = np.ones(len(hosts), dtype=bool)
    cfree = cmask.copy()
    mapping = {}
    budget = [node_budget]
    comps = _components(vertices, adj)
    comps.sort(key=len, reverse=True)  # hardest first
    for comp in comps:
        cset = set(comp)
        root = comp[0]
        order, parent = [root], {root: None}
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for w in adj[v]:
                if w in cset and w not in parent:
                    parent[w] = v
                    order.append(w)

        def place(t):
            if t == len(order):
                return True
            budget[0] -= 1
            if budget[0] < 0:
                return False
            v = order[t]
            if parent[v] is None:
                cand = np.flatnonzero(free)
                if rng is not None and len(cand):
                    cand = cand[rng.permutation(len(cand))]
                for hi in cand[: max(1, min(len(cand), 8))]:
                    hi = int(hi)
                    free[hi] = False
                    mapping[v] = int(hosts[hi])
                    if place(t + 1):
                        return True
                    free[hi] = True
                    del mapping[v]
                return False
            hp = mapping[parent[v]]
            row = kernels.colour_block(*spec, hp, hosts)
            cand = np.flatnonzero(free & cfree[row] & (hosts != hp))
            if rng is not None and len(cand):
                cand = cand[rng.permutation(len(cand))]
            for hi in cand:
                hi = int(hi)
                c = int(row[hi])
                if not cfree[c]:
                    continue
                free[hi] = False
                cfree[c] = False
                mapping[v] = int(hosts[hi])
                if place(t + 1):
                    return True
                free[hi] = True
                cfree[c] = True
                del mapping[v]
            return False

        if not place(0):
            return None
    return mapping


def greedy_embed_small(colouring, T0, X0, C0, rng=None):
    """Rainbow copy of the forest/tree T0 inside X0 using colours C0 only."""
    if isinstance(T0, Tree):
        vertices, adj = range(T0.n), T0.adj
    else:
        vertices, adj = T0
    cmask = colouring.colour_mask(C0)
    mapping = _greedy_embed_forest(colouring, vertices, adj, X0, cmask, rng=rng)
    if mapping is None:
        raise StageFailure("T0", "greedy base embedding blocked")
    return mapping


def brute_force_embed(colouring, T):
    """Exhaustive backtracking embed; returns an EmbedOutcome whose
    `proven_absent` flag is set when the search space is exhausted."""
    if T.n > BRUTE_FORCE_T_CUTOFF or colouring.n > BRUTE_FORCE_N_CUTOFF:
        raise SizeError(
            f"brute force bounded at |T| <= {BRUTE_FORCE_T_CUTOFF}, n <= {BRUTE_FORCE_N_CUTOFF}"
        )
    order, parent = T.bfs_order(0)
    n = colouring.n
    vmap = {}
    used_v = [False] * n
    used_c = set()

    def rec(t):
        if t == T.n:
            return True
        v = order[t]
        if parent[v] == -1:
            hosts = range(n)
        else:
            hosts = range(n)
        hp = vmap.get(parent[v])
        for h in hosts:
            if used_v[h]:
                continue
            if hp is not None:
                c = colouring.colour_of(hp, h)
                if c in used_c:
                    continue
                used_c.add(c)
            used_v[h] = True
            vmap[v] = h
            if rec(t + 1):
                return True
            used_v[h] = False
            del vmap[v]
            if hp is not None:
                used_c.discard(colouring.colour_of(hp, h))
        return False

    if rec(0):
        emb = embedding_from_map(colouring, T, [vmap[v] for v in range(T.n)])
        emb.validate(colouring, T)
        return EmbedOutcome(True, emb, trace={"method": "brute_force"})
    return EmbedOutcome(
        False, None, proven_absent=True, trace={"method": "brute_force", "exhausted": True}
    )


# -- the full pipeline --------------------------------------------------


def _star_plan(n, k, p0, ps, degrees, epsilon, ell, m_last):
    """Choose the class-1 boost and reservoir sizes for the star stage.

    Returns (feasible, boost, n_alloc).  The reservoir for star i must be
    large enough that a p1-rate sample of it exceeds d_i with margin, and
    all reservoirs together must fit in the vertices outside the reserve
    with colours outside the reserve.
    """
    if not degrees:
        return True, 0.0, []
    margins = [d + 3.0 * math.sqrt(d) + 3.0 for d in degrees]
    cap = int(0.96 * (1.0 - p0) * (1.0 - p0) * n / k)
    q_req = sum(margins) / cap
    p1_eff = max(ps[0], q_req * (1.0 - p0))
    boost = p1_eff - ps[0]
    pl_min = (1 + epsilon / 4) * k * m_last / n + epsilon / (4 * ell) + 0.002
    if m_last == 0:
        # an empty last layer needs nothing; nearly all of its probability
        # can be moved to the star class
        pl_min = 0.001
    slack = ps[-1] - pl_min
    feasible = boost <= slack and p1_eff < 1.0 - p0
    boost = min(boost, max(slack, 0.0))
    q = (ps[0] + boost) / (1.0 - p0)
    total = sum(margins)
    n_alloc = [min(int(cap * m / total), int(math.ceil(m / q)) + int(0.9 * (cap - total / q) * m / total)) for m in margins]
    n_alloc = [max(a, min(int(math.ceil(m / q)), int(cap * m / total))) for a, m in zip(n_alloc, margins)]
    return feasible, boost, n_alloc


def _reserve_demand(n, k, ps, decomp):
    """Estimate the buffer the completion pools must supply up front.

    A leaf layer first matches inside its own random class; the expected
    per-parent candidate count there is (p_i n)^2/(n k), so thin layers
    defect almost entirely and fat layers lose an O(sqrt n) tail as the
    class drains.  Since every finished class recycles at least its own
    deficiency back into the pools, the reserve only has to buffer the
    base forest, the path interiors, and the worst single layer.
    """
    layers = decomp.layers
    base = len(layers[0].vertices)
    paths = len(layers[decomp.j].paths) if decomp.j else 0
    est = {}
    for idx in range(2, decomp.ell + 1):
        la = layers[idx]
        if la.kind == KIND_PATHS3:
            continue
        m = len(la.pairs)
        p_i = ps[idx - 1]
        cand = (p_i * n) ** 2 / (n * k)
        tail = 0.45 * math.sqrt(n * k) * math.exp(-max(0.0, p_i * n / k - m) ** 2 / n)
        est[idx] = min(float(m), m * math.exp(-cand / 2.0) + tail)
    peak = max(est.values(), default=0.0)
    dv = base + 2 * paths + peak + 40.0
    dc = base + 3 * paths + peak + 40.0
    return dv, dc, est


_P0_GRID = [0.05, 0.07, 0.09, 0.12, 0.16, 0.20, 0.25, 0.30]


def _stage_rng(config, attempt, stage):
    return np.random.default_rng([config.seed & 0x7FFFFFFF, attempt, stage])


def _attempt(colouring, T, decomp, p0, ps, boost, n_alloc, bounds, config, attempt, trace):
    n, k = colouring.n, colouring.k
    eps, mu = config.epsilon, config.mu
    layers = decomp.layers
    ell = decomp.ell
    ps_adj = list(ps)
    ps_adj[0] += boost
    ps_adj[-1] -= boost

    # reserve sampling
    rng0 = _stage_rng(config, attempt, 0)
    X0 = rng0.random(n) < p0
    C0 = rng0.random(colouring.n_colours) < p0

    base = layers[0].vertices
    base_adj = {v: [w for w in T.adj[v] if w in set(base)] for v in base}
    # cheap sanity check on the reserve before doing real work: base
    # components with edges need colour-C0 edges inside X0 to exist at all
    if any(base_adj[v] for v in base):
        probe = np.flatnonzero(X0)[:12]
        spec = colouring.kernel_spec()
        x0_arr = np.flatnonzero(X0)
        c0m = C0
        for v in probe:
            row = kernels.colour_block(*spec, int(v), x0_arr)
            if int(np.count_nonzero(c0m[row])) < 2:
                raise StageFailure("R1", f"vertex {v} has too few reserve edges")

    mapping = greedy_embed_small(
        colouring, (base, base_adj), np.flatnonzero(X0), C0, rng=_stage_rng(config, attempt, 1)
    )
    used_c = {colouring.colour_of(mapping[v], mapping[w]) for v in base for w in base_adj[v] if v < w}

    # reservoir stars and the vertex-colour pairing
    star_list = layers[1].stars
    degrees = [len(ls) for _, ls in star_list]
    pairing = {}
    reservoirs = []
    if star_list:
        requests = [StarRequest(mapping[root], na) for (root, _), na in zip(star_list, n_alloc)]
        fam = find_disjoint_rainbow_stars(
            colouring, requests, np.flatnonzero(X0), C0, epsilon=eps / 8
        )
        q = ps_adj[0] / (1.0 - p0)
        for i, ((host, leaves), cs, d) in enumerate(zip(fam.stars, fam.colours, degrees)):
            if len(leaves) < math.ceil((d + 2.0 * math.sqrt(d) + 2.0) / q):
                raise StageFailure("stars", f"reservoir {i} too small: {len(leaves)}")
            reservoirs.append((host, leaves))
            for y, c in zip(leaves, cs):
                pairing[y] = c

    plan = sample_partitions(
        colouring, [p0] + ps_adj, pairing, _stage_rng(config, attempt, 2), X0=X0, C0=C0
    )
    plan.check_coupling()

    used_v = set(mapping.values())
    x1 = plan.vertex_class == 1
    for i, ((root, leaf_vs), (host, leaves)) in enumerate(zip(star_list, reservoirs)):
        d = len(leaf_vs)
        picked = [y for y in leaves if x1[y]]
        if len(picked) < d:
            raise StageFailure("Q0", f"star {i}: {len(picked)} < {d}")
        for tv, y in zip(sorted(leaf_vs), picked[:d]):
            mapping[tv] = y
            c = colouring.colour_of(host, y)
            assert plan.colour_class[c] == 1  # the pairing coupling at work
            used_c.add(c)
            used_v.add(y)

    # completion pools: the X0/C0 reserve plus recycled surplus from
    # classes whose layer is already finished.  A finished class never
    # supplies anything again, so its unused vertices and colours are free
    # game; they are preferred over the reserve to spare it.
    x0_free = X0.copy()
    rec_v = np.zeros(n, dtype=bool)
    c0_free = C0.copy()
    rec_c = np.zeros(colouring.n_colours, dtype=bool)
    for v in used_v:
        x0_free[v] = False
    for c in used_c:
        c0_free[c] = False
    spec = colouring.kernel_spec()

    def recycle(idx):
        for v in plan.vertices_in(idx).tolist():
            if v not in used_v:
                rec_v[v] = True
        for c in plan.colours_in(idx).tolist():
            if c not in used_c:
                rec_c[c] = True

    def claim(x, c):
        used_v.add(x)
        used_c.add(c)
        x0_free[x] = rec_v[x] = False
        c0_free[c] = rec_c[c] = False

    def complete_one(a):
        for vmask, cmask in (
            (rec_v, rec_c), (rec_v, c0_free), (x0_free, rec_c), (x0_free, c0_free)
        ):
            arr = np.flatnonzero(vmask)
            if not len(arr):
                continue
            row = kernels.colour_block(*spec, a, arr)
            hit = np.flatnonzero(cmask[row] & (arr != a))
            if len(hit):
                i = int(hit[0])
                return int(arr[i]), int(row[i])
        return None

    recycle(1)  # class-1 surplus beyond the star attachments

    for idx in range(2, ell + 1):
        la = layers[idx]
        p_i = ps_adj[idx - 1]
        if la.kind == KIND_LEAVES:
            pairs = sorted(la.pairs, key=lambda pv: mapping[pv[0]])
            A_hosts = [mapping[p] for p, _ in pairs]
            X_i = [v for v in plan.vertices_in(idx).tolist() if v not in used_v]
            C_i = {c for c in plan.colours_in(idx).tolist() if c not in used_c}
            m = greedy_rainbow_matching(colouring, A_hosts, X_i, C_i)
            deficiency = len(A_hosts) - m.size
            if 0 < deficiency <= 48 and deficiency > max(2, int(mu * p_i * n)):
                m = switching_rainbow_matching(
                    colouring, A_hosts, X_i, C_i,
                    SwitchingParams(max_layers=4, node_budget=min(config.switching.node_budget, 200000)),
                )
                deficiency = len(A_hosts) - m.size
            host_of = {a: (x, c) for (a, x), c in zip(m.edges, m.colours)}
            completed = 0
            for a in A_hosts:
                if a in host_of:
                    continue
                got = complete_one(a)
                if got is None:
                    raise StageFailure(f"layer-{idx}", f"completion stuck at host {a}")
                host_of[a] = got
                claim(*got)
                completed += 1
            for p, leaf in pairs:
                x, c = host_of[mapping[p]]
                mapping[leaf] = x
                used_v.add(x)
                used_c.add(c)
            trace.setdefault("layers", []).append(
                {"layer": idx, "kind": "leaves", "m": len(pairs),
                 "deficiency": deficiency, "completed": completed}
            )
        elif la.kind == KIND_PATHS3:
            if la.paths:
                reqs = [(mapping[a], mapping[b]) for a, _, _, b in la.paths]
                sysm = connect_pairs_disjointly(
                    colouring, reqs, np.flatnonzero(x0_free | rec_v), c0_free | rec_c
                )
                if sysm.unconnected:
                    raise StageFailure("paths", f"{len(sysm.unconnected)} pairs unconnected")
                for (a, xx, yy, b), path in zip(la.paths, sysm.paths):
                    _, hx, hy, _ = path
                    mapping[xx], mapping[yy] = hx, hy
                    cs = (
                        colouring.colour_of(path[0], hx),
                        colouring.colour_of(hx, hy),
                        colouring.colour_of(hy, path[3]),
                    )
                    claim(hx, cs[0])
                    claim(hy, cs[1])
                    used_c.add(cs[2])
                    c0_free[cs[2]] = rec_c[cs[2]] = False
                trace.setdefault("layers", []).append(
                    {"layer": idx, "kind": "paths3", "paths": len(la.paths)}
                )
        else:
            raise RainbowError(f"unexpected layer kind {la.kind} at index {idx}")
        recycle(idx)

    emb = embedding_from_map(colouring, T, [mapping[v] for v in range(T.n)])
    emb.validate(colouring, T)

    # reserve accounting against the pre-registered plan bounds
    hosts = np.asarray(emb.vertex_map, dtype=np.int64)
    x0_used = int(np.count_nonzero(X0[hosts]))
    c0_used = int(np.count_nonzero(C0[np.asarray(emb.colours, dtype=np.int64)]))
    x0_bound, c0_bound = bounds
    trace["reserve"] = {
        "x0_used": x0_used,
        "x0_bound": x0_bound,
        "c0_used": c0_used,
        "c0_bound": c0_bound,
    }
    if x0_used > x0_bound or c0_used > c0_bound:
        raise StageFailure("reserve", f"X0 {x0_used}/{x0_bound:.1f}, C0 {c0_used}/{c0_bound:.1f}")
    return emb


def embed_tree(colouring, T, config=None, strict=True):
    """Find a validated rainbow copy of T in the coloured host, choosing
    between exact search, direct greedy, and the layered pipeline by
    instance size.

    With strict=True the guaranteed regime |T| <= (1-eps)n/k is enforced;
    strict=False lets callers probe tight hosts (e.g. exact decompositions)
    where success is possible but not promised.
    """
    config = config or PipelineConfig()
    n, k = colouring.n, colouring.k
    if T.n > n:
        raise ParameterError(f"|T| = {T.n} exceeds host order {n}")
    if strict and T.n > (1 - config.epsilon) * n / k:
        raise ParameterError(
            f"|T| = {T.n} exceeds (1-eps)n/k = {(1 - config.epsilon) * n / k:.1f}"
        )
    if n <= config.fallback_cutoff and T.n <= BRUTE_FORCE_T_CUTOFF and n <= BRUTE_FORCE_N_CUTOFF:
        return brute_force_embed(colouring, T)
    if n <= config.midsize_cutoff:
        return _midsize_embed(colouring, T, config)
    return _pipeline_embed(colouring, T, config)


def _midsize_embed(colouring, T, config):
    cmask = np.ones(colouring.n_colours, dtype=bool)
    failures = []
    for attempt in range(config.retries):
        rng = _stage_rng(config, attempt, 9)
        mapping = _greedy_embed_forest(
            colouring, range(T.n), T.adj, range(colouring.n), cmask,
            rng=rng if attempt else None, node_budget=200000 * (1 + attempt),
        )
        if mapping is not None:
            emb = embedding_from_map(colouring, T, [mapping[v] for v in range(T.n)])
            emb.validate(colouring, T)
            return EmbedOutcome(
                True, emb, trace={"method": "greedy", "retries_used": attempt}
            )
        failures.append((attempt, "greedy", "backtracking budget exhausted"))
    return EmbedOutcome(False, None, trace={"method": "greedy", "stage_failures": failures})


def _pipeline_embed(colouring, T, config):
    n, k = colouring.n, colouring.k
    eps, mu = config.epsilon, config.mu
    D = config.D if config.D is not None else min(int(math.ceil(math.log(n) ** 2)), 10)
    decomp = split_tree(T, D, mu, n)
    m_sizes = [len(la.vertices) for la in decomp.layers[1:]]
    degrees = [len(ls) for _, ls in decomp.layers[1].stars]

    chosen, best = None, None
    grid = [config.p0] if config.p0 is not None else _P0_GRID
    for p0 in grid:
        try:
            ps = layer_probabilities(m_sizes, n, k, eps, p0)
        except ParameterError:
            continue
        star_ok, boost, n_alloc = _star_plan(
            n, k, p0, ps, degrees, eps, decomp.ell, m_sizes[-1]
        )
        pl_min = (1 + eps / 4) * k * m_sizes[-1] / n + eps / (4 * decomp.ell)
        if m_sizes[-1] == 0:
            pl_min = 0.001
        pl_ok = ps[-1] - boost >= pl_min - 1e-12
        dv, dc, est = _reserve_demand(n, k, ps, decomp)
        margin = 0.72 * p0 * n - max(dv, dc)
        # plans with an unviable last class or starved star reservoirs rank
        # strictly below any plan without that defect
        if not pl_ok:
            margin -= n
        if not star_ok:
            margin -= n
        cand = (p0, ps, boost, n_alloc, dv, dc)
        if best is None or margin > best[0]:
            best = (margin, cand, star_ok)
        if star_ok and pl_ok and margin >= 0:
            chosen = cand
            break
    if chosen is None:
        if best is None:
            raise ParameterError("no feasible reserve probability p0 for this instance")
        chosen = best[1]  # least-bad plan; retries may still land it
    p0, ps, boost, n_alloc, demand_v, demand_c = chosen
    x0_bound = min(0.92 * p0 * n, 1.35 * demand_v + 3 * mu * n)
    c0_bound = min(0.92 * p0 * n, 1.35 * demand_c + 4 * mu * n)

    trace = {
        "method": "pipeline",
        "p0": p0,
        "boost": boost,
        "demand_estimate": [round(demand_v, 1), round(demand_c, 1)],
        "ell": decomp.ell,
        "j": decomp.j,
        "layer_sizes": m_sizes,
        "star_degrees": degrees,
        "D": D,
        "stage_failures": [],
    }
    for attempt in range(config.retries):
        attempt_trace = {}
        try:
            emb = _attempt(
                colouring, T, decomp, p0, ps, boost, n_alloc,
                (x0_bound, c0_bound), config, attempt, attempt_trace,
            )
        except StageFailure as f:
            trace["stage_failures"].append({"attempt": attempt, "stage": f.stage, "detail": str(f)})
            continue
        trace.update(attempt_trace)
        trace["retries_used"] = attempt
        return EmbedOutcome(True, emb, trace=trace)
    return EmbedOutcome(False, None, trace=trace)
