"""Colouring generators: boundedness, formulas, serialization."""

import numpy as np
import pytest

from rainbow_embed.colouring import (
    GroupSpec,
    colouring_from_json,
    colouring_from_spec,
    explicit_colouring,
    group_sum_colouring,
    nd_colouring,
    random_locally_k_bounded,
    round_robin_proper,
)
from rainbow_embed.errors import InvalidEdgeError, ParameterError


def test_nd_colouring_formula_and_bound():
    m = 6
    col = nd_colouring(m)
    n = 2 * m + 1
    assert col.n == n and col.k == 2 and col.n_colours == m
    for u in range(n):
        for v in range(u + 1, n):
            d = (v - u) % n
            assert col.colour_of(u, v) == min(d, n - d) - 1
    assert col.max_local_multiplicity() == 2


def test_group_sum_cyclic_is_proper():
    col = group_sum_colouring(GroupSpec("cyclic", 11))
    assert col.k == 1
    for u in range(11):
        for v in range(u + 1, 11):
            assert col.colour_of(u, v) == (u + v) % 11
    assert col.max_local_multiplicity() == 1


def test_group_sum_xor_is_proper():
    col = group_sum_colouring(GroupSpec("elementary_two", 4))
    assert col.n == 16 and col.k == 1
    for u in range(16):
        for v in range(u + 1, 16):
            assert col.colour_of(u, v) == (u ^ v) - 1
    assert col.max_local_multiplicity() == 1


def test_round_robin_proper():
    col = round_robin_proper(12)
    assert col.k == 1
    assert col.max_local_multiplicity() == 1


def test_random_locally_k_bounded():
    for k in (1, 2, 3):
        col = random_locally_k_bounded(20, k, seed=3)
        assert col.max_local_multiplicity() <= k
        again = random_locally_k_bounded(20, k, seed=3)
        assert np.array_equal(col.colour_row(0), again.colour_row(0))


def test_colour_of_is_symmetric():
    for col in (nd_colouring(5), colouring_from_spec("zsum:9"),
                random_locally_k_bounded(12, 2, 0)):
        for u in range(col.n):
            for v in range(u + 1, col.n):
                assert col.colour_of(u, v) == col.colour_of(v, u)


def test_loops_rejected_and_diagonal_marked():
    col = nd_colouring(4)
    with pytest.raises(InvalidEdgeError):
        col.colour_of(2, 2)
    assert col.colour_row(3)[3] == -1


def test_explicit_roundtrip():
    col = random_locally_k_bounded(10, 2, 1)
    back = colouring_from_json(col.to_json())
    for v in range(10):
        assert np.array_equal(col.colour_row(v), back.colour_row(v))


def test_explicit_requires_total_symmetric_input():
    with pytest.raises(ParameterError):
        explicit_colouring(3, 1, [(0, 1, 0)])  # missing edges


def test_spec_parsing():
    assert colouring_from_spec("nd:8").n == 17
    assert colouring_from_spec("zsum:101").n == 101
    assert colouring_from_spec("z2k:4").n == 16
    rr = colouring_from_spec("rr:10")
    assert rr.k == 1
    rnd = colouring_from_spec("rand:30:2:5")
    assert rnd.n == 30 and rnd.k == 2
    with pytest.raises(ParameterError):
        colouring_from_spec("bogus:3")


def test_nd_translation_preserves_colours():
    # cyclic shifts are colour automorphisms of the near-distance host
    for m in (2, 7, 25, 50):
        col = nd_colouring(m)
        n = col.n
        rng = np.random.default_rng(m)
        for _ in range(40):
            u, v, s = rng.integers(0, n, size=3)
            if u == v:
                continue
            assert col.colour_of(int(u), int(v)) == col.colour_of(
                (int(u) + int(s)) % n, (int(v) + int(s)) % n
            )


def test_xor_translation_preserves_colours():
    for k in (2, 3, 4, 5, 6):
        col = group_sum_colouring(GroupSpec("elementary_two", k))
        n = col.n
        rng = np.random.default_rng(k)
        for _ in range(40):
            u, v, s = rng.integers(0, n, size=3)
            if u == v:
                continue
            assert col.colour_of(int(u), int(v)) == col.colour_of(int(u) ^ int(s), int(v) ^ int(s))
