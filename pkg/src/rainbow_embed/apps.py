"""Constructions derived from rainbow tree embeddings.

A rainbow copy of a tree in a translation-invariant colouring yields,
under the group translations, a family of copies that pairwise share no
edge: two translates meeting in an edge would force two tree edges of
the same colour.  This single fact drives all three constructions here:
cyclic tree packings, harmonious labellings, and orthogonal double
covers by xor translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .checks import check_harmonious, check_odc, check_packing, check_rainbow_embedding
from .colouring import GroupSpec, group_sum_colouring, nd_colouring
from .errors import EmbedFailure, ParameterError, SizeError
from .pipeline import PipelineConfig, embed_tree
from .trees import Tree


@dataclass
class TreePacking:
    tree: Tree
    N: int  # host K_N
    copies: list  # vertex map per copy
    perfect: bool = False
    trace: dict = field(default_factory=dict)


@dataclass
class HarmoniousLabelling:
    tree: Tree
    group: GroupSpec
    labels: list  # group element per tree vertex


@dataclass
class DoubleCover:
    tree: Tree
    k: int  # host K_{2^k}
    copies: list


def translate_copy(vertex_map, shift, modulus_or_group):
    """Translate a copy pointwise by a group element (or residue)."""
    vmap = list(getattr(vertex_map, "vertex_map", vertex_map))
    if isinstance(modulus_or_group, GroupSpec):
        g = modulus_or_group
        return [g.add(int(shift), int(v)) for v in vmap]
    m = int(modulus_or_group)
    return [(int(v) + int(shift)) % m for v in vmap]


def _embed_or_raise(colouring, T, config, what):
    out = embed_tree(colouring, T, config, strict=False)
    if not out.success:
        raise EmbedFailure({"construction": what, **out.trace})
    return out.embedding


def ringel_pack(T: Tree, epsilon=0.2, config=None, exact=False):
    """Pack 2l+1 translated copies of T into K_{2l+1}.

    Exact regime: l = t-1, a perfect decomposition when the embedding
    succeeds.  Asymptotic regime: the smallest l with 2l+1 >= (2+eps)(t-1)+1,
    where success is guaranteed for large t.
    """
    t = T.n
    if t < 2:
        raise ParameterError("packing needs a tree with at least one edge")
    ell = t - 1 if exact else max(t - 1, int(math.ceil((2 + epsilon) * (t - 1) / 2)))
    config = config or PipelineConfig(epsilon=epsilon)
    col = nd_colouring(ell)
    emb = _embed_or_raise(col, T, config, "ringel_pack")
    N = 2 * ell + 1
    if ell <= 50:
        # translation invariance of the host colouring, checked directly
        for u, v in T.edges:
            hu, hv = emb.vertex_map[u], emb.vertex_map[v]
            assert col.colour_of((hu + 1) % N, (hv + 1) % N) == col.colour_of(hu, hv)
    copies = [translate_copy(emb.vertex_map, s, N) for s in range(N)]
    perfect = exact and ell == t - 1
    packing = TreePacking(T, N, copies, perfect=perfect, trace={"ell": ell, "exact": exact})
    res = check_packing(packing, require_perfect=perfect)
    if not res:
        raise ParameterError(f"packing validation failed: {res.detail} {res.witness}")
    return packing


def harmonious_label(T: Tree, group: GroupSpec, config=None):
    """Injective labelling of T by group elements with pairwise distinct
    edge sums, read off a rainbow copy in the group-sum colouring."""
    if group.order < T.n:
        raise SizeError(f"group of order {group.order} cannot label {T.n} vertices")
    if group.order < 3:
        # K_2 host: only the single edge fits and any injection works
        labelling = HarmoniousLabelling(T, group, list(range(T.n)))
    else:
        col = group_sum_colouring(group)
        emb = _embed_or_raise(col, T, config or PipelineConfig(), "harmonious_label")
        labelling = HarmoniousLabelling(T, group, list(emb.vertex_map))
        # edge-sum injectivity is exactly rainbowness of the copy
        assert bool(check_rainbow_embedding(emb, col, T)) == bool(
            check_harmonious(labelling, T)
        )
    res = check_harmonious(labelling, T)
    if not res:
        raise ParameterError(f"labelling validation failed: {res.detail} {res.witness}")
    return labelling


def harmonious_label_smallest(T: Tree, config=None, cap=None):
    """Smallest cyclic group found to label T, scanning orders from |T|
    up to the cap (default ceil(1.25 |T|))."""
    cap = cap if cap is not None else int(math.ceil(1.25 * T.n))
    last = None
    for m in range(max(T.n, 2), cap + 1):
        if m < 3:
            if T.n <= m:
                return harmonious_label(T, GroupSpec("cyclic", m), config)
            continue
        try:
            return harmonious_label(T, GroupSpec("cyclic", m), config)
        except EmbedFailure as exc:
            last = exc
    raise last if last is not None else EmbedFailure({"construction": "harmonious_label"})


def odc_construct(T: Tree, k: int, config=None):
    """All 2^k xor-translates of a rainbow copy of T in the xor-sum
    colouring of K_{2^k}: an orthogonal double cover candidate."""
    n = 1 << k
    if T.n > n:
        raise SizeError(f"tree on {T.n} vertices does not fit in K_{n}")
    if k < 2:
        if T.n != 2:
            raise SizeError("k=1 host only fits the single edge")
        cover = DoubleCover(T, 1, [[0, 1], [1, 0]])
    else:
        group = GroupSpec("elementary_two", k)
        col = group_sum_colouring(group)
        emb = _embed_or_raise(col, T, config or PipelineConfig(), "odc_construct")
        copies = [translate_copy(emb.vertex_map, x, group) for x in range(n)]
        cover = DoubleCover(T, k, copies)
        _assert_shared_edge_shift(cover)
    res = check_odc(cover)
    if not res:
        raise ParameterError(f"double cover validation failed: {res.detail} {res.witness}")
    return cover


def _assert_shared_edge_shift(cover):
    """If copies x and y share an edge {a,b} then x xor y = a xor b."""
    edge_copies = {}
    for i, vmap in enumerate(cover.copies):
        for u, v in cover.tree.edges:
            edge_copies.setdefault(frozenset((vmap[u], vmap[v])), []).append(i)
    for e, cs in edge_copies.items():
        if len(cs) == 2:
            a, b = sorted(e)
            assert cs[0] ^ cs[1] == a ^ b
