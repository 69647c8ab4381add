"""Acceptance suite: one test (and one printed verdict line) per criterion.

Criterion 4's strict form is unattainable: one 7-vertex tree class has no
rainbow copy in the xor-sum colouring of K_8 (certified by exhaustive
search), so the translate construction cannot cover it.  The main test
accepts that certificate; the strict variant is an expected failure.
"""

import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest

from conftest import cyclic_latin_colouring, parity_square_colouring, rng_instances
from rainbow_embed.apps import harmonious_label_smallest, odc_construct, ringel_pack
from rainbow_embed.checks import check_harmonious, check_odc, check_packing
from rainbow_embed.colouring import (
    GroupSpec,
    colouring_from_spec,
    group_sum_colouring,
    nd_colouring,
)
from rainbow_embed.errors import EmbedFailure
from rainbow_embed.matching import (
    brute_force_rainbow_matching,
    greedy_rainbow_matching,
    switching_rainbow_matching,
)
from rainbow_embed.pipeline import PipelineConfig, brute_force_embed, embed_tree
from rainbow_embed.stats import (
    stat_colour_diversity,
    stat_colour_neighbourhood,
    stat_edge_density,
)
from rainbow_embed.trees import Tree, enumerate_trees, extract_bare_subpaths, random_tree, split_tree


def verdict(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line, file=sys.stderr)
    return ok


def test_criterion_1_exhaustive_small_tree_embedding(nd8):
    t0 = time.time()
    total = wins = 0
    for n in range(1, 10):
        for T in enumerate_trees(n):
            total += 1
            out = embed_tree(nd8, T, PipelineConfig(seed=0), strict=False)
            if out.success:
                out.embedding.validate(nd8, T)
                wins += 1
    elapsed = time.time() - t0
    assert verdict(1, wins == total == 95 and elapsed < 120,
                   f"{wins}/{total} tree classes embedded in nd(8)/K17, {elapsed:.1f}s")


def test_criterion_2_exact_ringel_decompositions():
    t0 = time.time()
    total = wins = 0
    for n in range(2, 9):
        for T in enumerate_trees(n):
            total += 1
            packing = ringel_pack(T, exact=True)
            if packing.perfect and check_packing(packing, require_perfect=True).ok:
                wins += 1
    elapsed = time.time() - t0
    assert verdict(2, wins == total == 47 and elapsed < 300,
                   f"{wins}/{total} perfect decompositions of K_(2t-1), {elapsed:.1f}s")


def test_criterion_3_harmonious_labellings():
    t0 = time.time()
    total = wins = 0
    for n in range(1, 9):
        for T in enumerate_trees(n):
            total += 1
            lab = harmonious_label_smallest(T)
            if lab.group.order <= math.ceil(1.25 * T.n) and check_harmonious(lab, T).ok:
                wins += 1
    elapsed = time.time() - t0
    assert verdict(3, wins == total == 48 and elapsed < 120,
                   f"{wins}/{total} trees labelled within ceil(1.25 n), {elapsed:.1f}s")


def _odc_sweep():
    covered = certified_absent = total = 0
    for k in (2, 3):
        for n in range(1, 2**k):
            for T in enumerate_trees(n):
                total += 1
                try:
                    cover = odc_construct(T, k)
                except EmbedFailure:
                    # accept only a proof of absence, not a mere timeout
                    col = group_sum_colouring(GroupSpec("elementary_two", k))
                    out = brute_force_embed(col, T)
                    assert out.proven_absent
                    certified_absent += 1
                    continue
                assert check_odc(cover).ok
                covered += 1
    return covered, certified_absent, total


def test_criterion_4_odc_construction():
    t0 = time.time()
    covered, absent, total = _odc_sweep()
    elapsed = time.time() - t0
    ok = covered + absent == total and absent <= 1 and elapsed < 120
    assert verdict(
        4, ok,
        f"{covered}/{total} double covers validated, {absent} class certified "
        f"rainbow-free in the xor host by exhaustive search, {elapsed:.1f}s",
    )


@pytest.mark.xfail(
    reason="one 7-vertex tree admits no rainbow copy in z2k(3); the "
    "translate construction cannot reach 100% there",
    strict=True,
)
def test_criterion_4_odc_construction_strict():
    covered, absent, total = _odc_sweep()
    assert absent == 0 and covered == total


def test_criterion_5_matching_engine():
    t0 = time.time()
    gaps = []
    for col, A, X, C in rng_instances(200, seed=42):
        g = greedy_rainbow_matching(col, A, X, C)
        s = switching_rainbow_matching(col, A, X, C)
        s.validate(col, A=set(A), X=set(X), C=set(C))
        assert s.size >= g.size  # hard floor
        opt = brute_force_rainbow_matching(col, A, X, C)
        gaps.append(opt.size - s.size)
    within1 = sum(1 for g in gaps if g <= 1) / len(gaps)
    mean_gap = sum(gaps) / len(gaps)
    parity = brute_force_rainbow_matching(parity_square_colouring(), [0, 1], [2, 3], range(4))
    latin = brute_force_rainbow_matching(
        cyclic_latin_colouring(4), [0, 1, 2, 3], [4, 5, 6, 7], range(4)
    )
    elapsed = time.time() - t0
    ok = within1 >= 0.95 and mean_gap <= 0.3 and parity.size == 1 and latin.size == 3 and elapsed < 60
    assert verdict(
        5, ok,
        f"200 instances sound, within-1-of-optimum rate {within1:.2f}, mean gap "
        f"{mean_gap:.2f}, parity K22 -> {parity.size}, cyclic Latin 4x4 -> {latin.size}, {elapsed:.1f}s",
    )


def test_criterion_6_pseudorandomness_harness():
    t0 = time.time()
    z1000 = colouring_from_spec("zsum:1000")
    a = stat_edge_density(z1000, 0.3, 100, 100, trials=50, seed=0, epsilon=0.15)
    b = stat_colour_neighbourhood(z1000, 0.3, 0.3, trials=30, seed=1)
    c = stat_colour_diversity(colouring_from_spec("zsum:2000"), 0.3, 300, trials=30, seed=2)
    elapsed = time.time() - t0
    ok = a.pass_rate >= 0.95 and b.pass_rate >= 0.95 and c.pass_rate >= 0.95 and elapsed < 300
    assert verdict(
        6, ok,
        f"pass rates: edge density {a.pass_rate:.2f}, colour neighbourhood "
        f"{b.pass_rate:.2f}, colour diversity {c.pass_rate:.2f}, {elapsed:.1f}s",
    )


# -- criterion 7 --------------------------------------------------------


def _spider(legs, leglen):
    edges, nxt = [], 1
    for _ in range(legs):
        prev = 0
        for _ in range(leglen):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return Tree(nxt, edges)


def _double_star(a, b):
    edges, nxt = [(0, 1)], 2
    for root, cnt in ((0, a), (1, b)):
        for _ in range(cnt):
            edges.append((root, nxt))
            nxt += 1
    return Tree(nxt, edges)


def _caterpillar_hub():
    spine = 300
    edges = [(i, i + 1) for i in range(spine - 1)]
    nxt = spine
    for _ in range(1000):  # one degree-1000 hub on the spine
        edges.append((150, nxt))
        nxt += 1
    i = 0
    while nxt < 4000:
        edges.append((i % spine, nxt))
        nxt += 1
        i += 1
    return Tree(nxt, edges)


def _broom():
    spine = 200
    edges = [(i, i + 1) for i in range(spine - 1)]
    nxt = spine
    while nxt < 4000:
        edges.append((spine - 1, nxt))
        nxt += 1
    return Tree(nxt, edges)


def _scale_cases():
    cases = [(f"random{s}", random_tree(4000, s)) for s in range(15)]
    cases += [
        ("spider", _spider(1333, 3)),
        ("double_star", _double_star(1999, 1999)),
        ("caterpillar_hub", _caterpillar_hub()),
        ("broom", _broom()),
        ("adversarial_random", random_tree(4000, 999)),
    ]
    return cases


def _run_scale_case(case):
    name, T = case
    col = colouring_from_spec("zsum:5000")
    out = embed_tree(col, T, PipelineConfig(seed=11))
    reserve_ok = True
    if out.success:
        out.embedding.validate(col, T)
        r = out.trace["reserve"]
        reserve_ok = r["x0_used"] <= r["x0_bound"] and r["c0_used"] <= r["c0_bound"]
    return name, out.success, reserve_ok


def test_criterion_7_pipeline_at_scale():
    t0 = time.time()
    cases = _scale_cases()
    with ProcessPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(_run_scale_case, cases))
    elapsed = time.time() - t0
    wins = sum(ok for _, ok, _ in results)
    assert all(racc for _, ok, racc in results if ok)
    rate = wins / len(results)
    assert verdict(
        7, rate >= 0.9 and elapsed < 600,
        f"{wins}/{len(results)} trees on 4000 vertices embedded in zsum:5000 "
        f"(reserve accounting held on every success), {elapsed:.1f}s with 4 workers",
    )


def test_criterion_8_structural_invariants():
    t0 = time.time()
    # split_tree validator on all small trees and 100 random trees
    for n in range(2, 11):
        for T in enumerate_trees(n):
            dec = split_tree(T, 3, 0.5, T.n)
            dec.validate(T, 3, 0.5, T.n)
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(20, 501))
        T = random_tree(n, int(rng.integers(0, 10**6)))
        dec = split_tree(T, 5, 0.05, n)
        dec.validate(T, 5, 0.05, n)
    # leftover bound after removing packed length-m bare subpaths
    for n in range(2, 11):
        for T in enumerate_trees(n):
            leaves = len(T.leaves())
            for m in (2, 3, 4):
                removed = sum(len(p) - 2 for p in extract_bare_subpaths(T, m))
                assert T.n - removed <= 6 * m * leaves + 2 * T.n / (m + 1)
    # translation invariance of the cyclic and xor hosts
    rng = np.random.default_rng(1)
    for m in range(1, 51):
        col = nd_colouring(m)
        n = col.n
        for _ in range(8):
            u, v, s = (int(x) for x in rng.integers(0, n, size=3))
            if u != v:
                assert col.colour_of(u, v) == col.colour_of((u + s) % n, (v + s) % n)
    for k in range(2, 7):
        col = group_sum_colouring(GroupSpec("elementary_two", k))
        n = col.n
        for _ in range(8):
            u, v, s = (int(x) for x in rng.integers(0, n, size=3))
            if u != v:
                assert col.colour_of(u, v) == col.colour_of(u ^ s, v ^ s)
    elapsed = time.time() - t0
    assert verdict(8, elapsed < 60,
                   f"splitting, leftover bound and translation invariants all hold, {elapsed:.1f}s")
