"""Exact validators for embeddings, packings, double covers, labellings.

Every check is deterministic and sample-free; on failure the result
carries a concrete witness (the first violating pair found in a fixed
scan order) so failures are reproducible and debuggable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParameterError


@dataclass
class CheckResult:
    ok: bool
    witness: dict = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "witness": self.witness, "detail": self.detail}


def _fail(detail, **witness):
    return CheckResult(False, witness=witness, detail=detail)


def check_rainbow_embedding(embedding, colouring, T):
    """Injective vertex map, correct tree edges, pairwise distinct colours."""
    vmap = list(embedding.vertex_map)
    if len(vmap) != T.n:
        return _fail("vertex map length mismatch", expected=T.n, got=len(vmap))
    seen = {}
    for v, h in enumerate(vmap):
        if not (0 <= h < colouring.n):
            return _fail("host vertex out of range", vertex=v, host=h)
        if h in seen:
            return _fail("vertex map not injective", vertices=[seen[h], v], host=h)
        seen[h] = v
    by_colour = {}
    for (u, v), c in zip(T.edges, embedding.colours):
        real = colouring.colour_of(vmap[u], vmap[v])
        if real != c:
            return _fail("recorded colour mismatch", edge=[u, v], recorded=c, actual=real)
        if c in by_colour:
            return _fail("colour repeated", colour=c, edges=[by_colour[c], [u, v]])
        by_colour[c] = [u, v]
    return CheckResult(True)


def _copy_edges(tree, vmap):
    if len(set(vmap)) != len(vmap):
        raise ParameterError("copy vertex map not injective")
    return [frozenset((vmap[u], vmap[v])) for u, v in tree.edges]


def check_packing(packing, require_perfect=False):
    """Every copy is an isomorphic embedding of the tree into K_N and the
    copies' edge sets are pairwise disjoint; optionally a perfect
    decomposition (every K_N edge covered exactly once)."""
    N = packing.N
    owner = {}
    for i, vmap in enumerate(packing.copies):
        if len(vmap) != packing.tree.n:
            return _fail("copy has wrong vertex count", copy=i)
        if any(not (0 <= h < N) for h in vmap):
            return _fail("copy leaves the host", copy=i)
        try:
            edges = _copy_edges(packing.tree, vmap)
        except ParameterError:
            return _fail("copy vertex map not injective", copy=i)
        for e in edges:
            if e in owner:
                return _fail(
                    "edge used by two copies", edge=sorted(e), copies=[owner[e], i]
                )
            owner[e] = i
    if require_perfect:
        want = N * (N - 1) // 2
        if len(owner) != want:
            return _fail(
                "not a perfect decomposition", covered=len(owner), expected=want
            )
    return CheckResult(True)


def check_odc(cover):
    """Every host edge lies in at most two copies and any two copies share
    at most one edge."""
    n = 1 << cover.k
    edge_copies = {}
    for i, vmap in enumerate(cover.copies):
        if any(not (0 <= h < n) for h in vmap):
            return _fail("copy leaves the host", copy=i)
        try:
            edges = _copy_edges(cover.tree, vmap)
        except ParameterError:
            return _fail("copy vertex map not injective", copy=i)
        for e in edges:
            edge_copies.setdefault(e, []).append(i)
    pair_shared = {}
    for e, cs in edge_copies.items():
        if len(cs) > 2:
            return _fail("edge in more than two copies", edge=sorted(e), copies=cs)
        if len(cs) == 2:
            key = tuple(sorted(cs))
            if key in pair_shared:
                return _fail(
                    "copies share two edges",
                    copies=list(key),
                    edges=[sorted(pair_shared[key]), sorted(e)],
                )
            pair_shared[key] = e
    return CheckResult(True)


def check_harmonious(labelling, T=None):
    """Labels injective and edge sums pairwise distinct in the group."""
    T = T if T is not None else labelling.tree
    group = labelling.group
    labels = list(labelling.labels)
    if len(labels) != T.n:
        return _fail("label count mismatch", expected=T.n, got=len(labels))
    seen = {}
    for v, g in enumerate(labels):
        if not (0 <= g < group.order):
            return _fail("label outside the group", vertex=v, label=g)
        if g in seen:
            return _fail("labels not injective", vertices=[seen[g], v], label=g)
        seen[g] = v
    sums = {}
    for u, v in T.edges:
        s = group.add(labels[u], labels[v])
        if s in sums:
            return _fail("edge sums collide", sum=s, edges=[sums[s], [u, v]])
        sums[s] = [u, v]
    return CheckResult(True)
