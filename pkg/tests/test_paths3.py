"""Collectively rainbow length-3 path systems."""

import pytest

from rainbow_embed.colouring import colouring_from_spec, nd_colouring
from rainbow_embed.errors import ParameterError
from rainbow_embed.paths3 import (
    PathRequest,
    connect_pairs_disjointly,
    enumerate_rainbow_3paths,
)


def test_single_pair_connected():
    col = colouring_from_spec("zsum:51")
    sysm = connect_pairs_disjointly(col, [(0, 1)], range(10, 40), range(col.n_colours))
    assert not sysm.unconnected
    sysm.validate(col, Y=set(range(10, 40)), C=set(range(col.n_colours)))
    u, x, y, v = sysm.paths[0]
    assert (u, v) == (0, 1) and x != y


def test_many_pairs_disjoint_and_rainbow():
    col = nd_colouring(40)
    reqs = [(i, i + 10) for i in range(6)]
    Y = range(30, 70)
    sysm = connect_pairs_disjointly(col, reqs, Y, range(col.n_colours))
    assert not sysm.unconnected
    sysm.validate(col, Y=set(Y), C=set(range(col.n_colours)))
    assert sysm.colour_count == 18


def test_unconnected_reported_when_reserve_too_small():
    col = colouring_from_spec("zsum:21")
    sysm = connect_pairs_disjointly(col, [(0, 1), (2, 3)], [10, 11], range(col.n_colours))
    assert len(sysm.paths) + len(sysm.unconnected) == 2
    assert sysm.unconnected  # two interiors cannot serve two paths


def test_duplicate_endpoints_rejected():
    col = nd_colouring(10)
    with pytest.raises(ParameterError):
        connect_pairs_disjointly(col, [(0, 1), (1, 2)], range(5, 9), range(col.n_colours))
    with pytest.raises(ParameterError):
        PathRequest(3, 3)


def test_enumerate_paths_limit_and_disjointness():
    col = colouring_from_spec("zsum:41")
    paths = enumerate_rainbow_3paths(col, 0, 1, range(5, 30), range(col.n_colours), limit=4)
    assert len(paths) == 4
    interiors = [w for p in paths for w in p[1:3]]
    assert len(set(interiors)) == len(interiors)
