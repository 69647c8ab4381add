"""Shared helpers for the test suite."""

import numpy as np
import pytest

from rainbow_embed.colouring import (
    colouring_from_spec,
    explicit_colouring,
    nd_colouring,
)


@pytest.fixture(scope="session")
def nd8():
    return nd_colouring(8)


@pytest.fixture(scope="session")
def zsum1000():
    return colouring_from_spec("zsum:1000")


def parity_square_colouring():
    """K_4 split as A={0,1}, X={2,3}; the cross edges form the 2x2 parity
    Latin square (two colours, each twice), whose max transversal is 1.
    Inside-pair edges get private colours so the whole thing stays a
    locally 2-bounded total colouring."""
    edges = [
        (0, 1, 2),
        (2, 3, 3),
        (0, 2, 0),
        (1, 3, 0),
        (0, 3, 1),
        (1, 2, 1),
    ]
    return explicit_colouring(4, 2, edges)


def cyclic_latin_colouring(m=4):
    """K_{2m} split as A=rows 0..m-1, X=columns m..2m-1; cross edge
    {i, m+j} gets colour (i+j) mod m, realizing the cyclic Latin square
    of order m.  Non-cross edges get fresh private colours."""
    edges = []
    for i in range(m):
        for j in range(m):
            edges.append((i, m + j, (i + j) % m))
    nxt = m
    for u in range(2 * m):
        for v in range(u + 1, 2 * m):
            if (u < m) == (v < m):
                edges.append((u, v, nxt))
                nxt += 1
    return explicit_colouring(2 * m, m, edges)


def assert_valid_matching(matching, colouring, A=None, X=None, C=None):
    matching.validate(colouring, A=A, X=X, C=C)


def rng_instances(count, seed):
    """Seeded random locally-2-bounded matching instances (col, A, X, C)."""
    from rainbow_embed.colouring import random_locally_k_bounded

    master = np.random.default_rng(seed)
    out = []
    for t in range(count):
        n = int(master.integers(14, 21))
        col = random_locally_k_bounded(n, 2, int(master.integers(0, 2**31)))
        perm = master.permutation(n)
        a_size = int(master.integers(4, 9))
        x_size = int(master.integers(6, 13))
        A = sorted(int(v) for v in perm[:a_size])
        X = sorted(int(v) for v in perm[a_size : a_size + x_size])
        C = sorted(
            int(c)
            for c in master.choice(
                col.n_colours, size=max(4, col.n_colours * 3 // 4), replace=False
            )
        )
        out.append((col, A, X, C))
    return out
