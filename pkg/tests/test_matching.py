"""Rainbow matchings: greedy, switching, brute-force oracle, completion."""

import numpy as np
import pytest

from conftest import cyclic_latin_colouring, parity_square_colouring, rng_instances
from rainbow_embed.colouring import random_locally_k_bounded
from rainbow_embed.errors import CompletionError, ParameterError, SizeError
from rainbow_embed.matching import (
    RainbowMatching,
    SwitchingParams,
    brute_force_rainbow_matching,
    complete_matching_greedy,
    greedy_rainbow_matching,
    switching_rainbow_matching,
)


def test_greedy_is_valid_and_maximal():
    for col, A, X, C in rng_instances(20, seed=11):
        m = greedy_rainbow_matching(col, A, X, C)
        m.validate(col, A=set(A), X=set(X), C=set(C))
        # maximality: no uncovered a has an edge to a free x in a free colour
        free_x = set(X) - m.covered_x()
        free_c = set(C) - set(m.colours)
        for a in set(A) - m.covered_a():
            for x in free_x:
                assert col.colour_of(a, x) not in free_c


def test_switching_never_below_greedy_and_valid():
    for col, A, X, C in rng_instances(30, seed=12):
        g = greedy_rainbow_matching(col, A, X, C)
        s = switching_rainbow_matching(col, A, X, C)
        s.validate(col, A=set(A), X=set(X), C=set(C))
        assert s.size >= g.size


def test_switching_against_brute_force_oracle():
    gaps = []
    for col, A, X, C in rng_instances(40, seed=13):
        s = switching_rainbow_matching(col, A, X, C)
        opt = brute_force_rainbow_matching(col, A, X, C)
        assert s.size <= opt.size
        gaps.append(opt.size - s.size)
    assert max(gaps) <= 1
    assert sum(gaps) / len(gaps) <= 0.3


def test_parity_square_max_matching_is_one():
    col = parity_square_colouring()
    A, X = [0, 1], [2, 3]
    C = range(col.n_colours)
    opt = brute_force_rainbow_matching(col, A, X, C)
    assert opt.size == 1
    s = switching_rainbow_matching(col, A, X, C)
    assert s.size == 1


def test_cyclic_latin_square_transversal_is_three():
    # the cyclic Latin square of order 4 has no transversal; the maximum
    # partial transversal (= rainbow matching) has size 3
    col = cyclic_latin_colouring(4)
    A, X = [0, 1, 2, 3], [4, 5, 6, 7]
    C = range(4)  # the Latin symbols only
    opt = brute_force_rainbow_matching(col, A, X, C)
    assert opt.size == 3
    s = switching_rainbow_matching(col, A, X, C)
    assert s.size == 3


def test_brute_force_size_limits():
    col = random_locally_k_bounded(40, 2, 0)
    with pytest.raises(SizeError):
        brute_force_rainbow_matching(col, range(12), range(12, 30), range(col.n_colours))


def test_overlapping_sides_rejected():
    col = random_locally_k_bounded(10, 2, 0)
    with pytest.raises(ParameterError):
        greedy_rainbow_matching(col, [0, 1], [1, 2], range(col.n_colours))


def test_validate_catches_bad_colour():
    col = random_locally_k_bounded(10, 1, 0)
    c = col.colour_of(0, 5)
    bad = RainbowMatching([(0, 5)], [(c + 1) % col.n_colours])
    with pytest.raises(ParameterError):
        bad.validate(col)


def test_completion_uses_fresh_resources():
    col = random_locally_k_bounded(20, 2, 3)
    A, X, C = [0, 1, 2], [10, 11, 12], range(col.n_colours)
    part = greedy_rainbow_matching(col, A, X, C)
    uncovered = sorted(set(A) - part.covered_a())
    Z = range(13, 20)
    C_res = set(range(col.n_colours)) - set(part.colours)
    done = complete_matching_greedy(col, part, uncovered, Z, C_res)
    done.validate(col)
    assert done.covered_a() >= set(A)


def test_completion_error_names_vertex():
    col = random_locally_k_bounded(10, 1, 0)
    part = RainbowMatching([], [])
    with pytest.raises(CompletionError) as err:
        complete_matching_greedy(col, part, [0], [], range(col.n_colours))
    assert "0" in str(err.value)


def test_switching_deterministic():
    col, A, X, C = rng_instances(1, seed=21)[0]
    a = switching_rainbow_matching(col, A, X, C)
    b = switching_rainbow_matching(col, A, X, C)
    assert a.edges == b.edges and a.colours == b.colours
