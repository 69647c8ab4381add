"""Monte-Carlo statistics: trivial cases, determinism, parameter guards."""

import pytest

from rainbow_embed.colouring import colouring_from_spec, nd_colouring
from rainbow_embed.errors import ParameterError
from rainbow_embed.stats import (
    stat_colour_diversity,
    stat_colour_multiplicity,
    stat_colour_neighbourhood,
    stat_edge_density,
)


def test_edge_density_p_one_exact():
    col = colouring_from_spec("zsum:400")
    s = stat_edge_density(col, 1.0, 40, 40, trials=5, seed=0)
    assert s.pass_rate == 1.0
    for r in s.reports:
        assert r.measured == 40 * 40


def test_edge_density_p_zero():
    col = colouring_from_spec("zsum:400")
    s = stat_edge_density(col, 0.0, 40, 40, trials=5, seed=0)
    assert s.pass_rate == 1.0
    for r in s.reports:
        assert r.measured == 0


def test_edge_density_size_floor():
    col = colouring_from_spec("zsum:400")
    with pytest.raises(ParameterError):
        stat_edge_density(col, 0.3, 5, 40, trials=1, seed=0)


def test_multiplicity_saturating_threshold_never_exceptional():
    # with (1+eps) p k |A| >= k |A| the threshold cannot be exceeded
    col = nd_colouring(100)  # k = 2
    s = stat_colour_multiplicity(col, 0.8, 10, trials=5, seed=1, epsilon=0.3)
    assert s.pass_rate == 1.0
    for r in s.reports:
        assert r.measured == 0.0


def test_multiplicity_single_vertex_a():
    col = nd_colouring(100)
    s = stat_colour_multiplicity(col, 0.9, 1, trials=5, seed=1, epsilon=0.3)
    for r in s.reports:
        assert r.measured == 0.0  # each colour appears <= k times at one vertex


def test_diversity_requires_regular_a():
    col = colouring_from_spec("zsum:900")
    with pytest.raises(ParameterError):
        stat_colour_diversity(col, 0.3, 4, trials=1, seed=0)


def test_diversity_proper_host():
    col = colouring_from_spec("zsum:900")
    s = stat_colour_diversity(col, 0.3, 100, trials=10, seed=2)
    assert s.pass_rate >= 0.9


def test_neighbourhood_extremes():
    col = colouring_from_spec("zsum:200")
    z = stat_colour_neighbourhood(col, 0.0, 0.5, trials=3, seed=0)
    assert all(r.measured == 0 and r.passed for r in z.reports)
    full = stat_colour_neighbourhood(col, 1.0, 1.0, trials=2, seed=0)
    assert all(r.measured == col.n - 1 for r in full.reports)


def test_summaries_deterministic():
    col = colouring_from_spec("zsum:500")
    a = stat_edge_density(col, 0.3, 50, 50, trials=8, seed=9)
    b = stat_edge_density(col, 0.3, 50, 50, trials=8, seed=9)
    assert [r.measured for r in a.reports] == [r.measured for r in b.reports]
    assert a.quantiles == b.quantiles
    c = stat_edge_density(col, 0.3, 50, 50, trials=8, seed=10)
    assert [r.measured for r in a.reports] != [r.measured for r in c.reports]


def test_quantiles_present_and_ordered():
    col = colouring_from_spec("zsum:500")
    s = stat_edge_density(col, 0.3, 50, 50, trials=12, seed=3)
    q = s.quantiles
    assert q["q10"] <= q["q50"] <= q["q90"]
