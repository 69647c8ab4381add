"""Monte-Carlo checks of the pseudorandomness facts the pipeline relies on.

Each operation samples random vertex/colour subsets, measures one graph
statistic against its analytic target, and aggregates per-trial reports.
All sampling is deterministic given (seed, trials): trial t draws from
an independent substream keyed by (seed, t), so summaries are identical
on rerun and order-independent under parallel execution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import kernels
from .errors import ParameterError


@dataclass
class TrialReport:
    lemma: str
    params: dict
    measured: float
    target: float
    tolerance: float
    passed: bool
    seed: int

    def to_json(self):
        return asdict(self)


@dataclass
class StatSummary:
    lemma: str
    trials: int
    pass_rate: float
    quantiles: dict  # of the normalized deviation (measured-target)/target
    reports: list = field(default_factory=list)

    def to_json(self):
        return {
            "lemma": self.lemma,
            "trials": self.trials,
            "pass_rate": self.pass_rate,
            "quantiles": self.quantiles,
            "reports": [r.to_json() for r in self.reports],
        }


def _summarize(lemma, reports):
    devs = np.array(
        [(r.measured - r.target) / r.target if r.target else 0.0 for r in reports]
    )
    qs = {}
    if len(devs):
        for q in (0.1, 0.5, 0.9):
            qs[f"q{int(q * 100)}"] = float(np.quantile(devs, q))
    rate = sum(r.passed for r in reports) / max(len(reports), 1)
    return StatSummary(lemma, len(reports), rate, qs, reports)


def _trial_rng(seed, t):
    return np.random.default_rng([int(seed) & 0x7FFFFFFF, t])


def _size_floor(n):
    return int(math.sqrt(n))


def _edge_count(colouring, A, B, cmask):
    spec = colouring.kernel_spec()
    B_arr = np.asarray(B, dtype=np.int64)
    total = 0
    for a in A:
        row = kernels.colour_block(*spec, int(a), B_arr)
        total += int(np.count_nonzero(cmask[row]))
    return total


def stat_edge_density(colouring, p, a_size, b_size, trials, seed, epsilon=0.15):
    """Edges between random disjoint A, B restricted to a p-random colour
    set: measured count against p|A||B| at relative tolerance epsilon."""
    n = colouring.n
    floor = _size_floor(n)
    if a_size < floor or b_size < floor or a_size + b_size > n:
        raise ParameterError(f"need |A|,|B| >= {floor} and |A|+|B| <= {n}")
    if not (0 <= p <= 1):
        raise ParameterError("p must lie in [0,1]")
    reports = []
    for t in range(trials):
        rng = _trial_rng(seed, t)
        cmask = rng.random(colouring.n_colours) < p
        perm = rng.permutation(n)
        A, B = perm[:a_size], perm[a_size : a_size + b_size]
        measured = _edge_count(colouring, A, B, cmask)
        target = p * a_size * b_size
        tol = epsilon * target
        passed = abs(measured - target) <= tol if p > 0 else measured == 0
        reports.append(
            TrialReport(
                "edge_density",
                {"n": n, "p": p, "a_size": a_size, "b_size": b_size},
                float(measured), float(target), float(tol), bool(passed), seed,
            )
        )
    return _summarize("edge_density", reports)


def stat_colour_multiplicity(colouring, p, a_size, trials, seed, epsilon=0.1):
    """Fraction of colours whose A-X multiplicity exceeds (1+eps)pk|A| for
    a p-random X and random disjoint A; passes when at most epsilon."""
    n, k = colouring.n, colouring.k
    spec = colouring.kernel_spec()
    reports = []
    for t in range(trials):
        rng = _trial_rng(seed, t)
        X = rng.random(n) < p
        rest = np.flatnonzero(~X)
        if len(rest) < a_size:
            raise ParameterError("not enough vertices outside X for A")
        A = rest[rng.permutation(len(rest))[:a_size]]
        X_arr = np.flatnonzero(X).astype(np.int64)
        counts = np.zeros(colouring.n_colours, dtype=np.int64)
        for a in A:
            row = kernels.colour_block(*spec, int(a), X_arr)
            np.add.at(counts, row, 1)
        threshold = (1 + epsilon) * p * k * a_size
        measured = float(np.count_nonzero(counts > threshold)) / colouring.n_colours
        reports.append(
            TrialReport(
                "colour_multiplicity",
                {"n": n, "p": p, "k": k, "a_size": a_size},
                measured, float(epsilon), 0.0, measured <= epsilon, seed,
            )
        )
    return _summarize("colour_multiplicity", reports)


def stat_colour_diversity(colouring, p, a_size, trials, seed, b_size=None, epsilon=0.1):
    """Distinct colours between a random A and B inside a p-random X,
    against the target (1-eps)|B|/k; B defaults to all of X."""
    n, k = colouring.n, colouring.k
    floor = _size_floor(n)
    if a_size < floor:
        raise ParameterError(f"need |A| >= {floor}")
    spec = colouring.kernel_spec()
    reports = []
    for t in range(trials):
        rng = _trial_rng(seed, t)
        X = rng.random(n) < p
        rest = np.flatnonzero(~X)
        if len(rest) < a_size:
            raise ParameterError("not enough vertices outside X for A")
        A = rest[rng.permutation(len(rest))[:a_size]]
        X_arr = np.flatnonzero(X).astype(np.int64)
        if b_size is None:
            B = X_arr
        else:
            if len(X_arr) < b_size:
                raise ParameterError("sampled X smaller than requested |B|")
            B = X_arr[rng.permutation(len(X_arr))[:b_size]]
            B = np.sort(B)
        seen = np.zeros(colouring.n_colours, dtype=bool)
        for a in A:
            seen[kernels.colour_block(*spec, int(a), B)] = True
        measured = float(np.count_nonzero(seen))
        target = (1 - epsilon) * len(B) / k
        reports.append(
            TrialReport(
                "colour_diversity",
                {"n": n, "p": p, "k": k, "a_size": a_size, "b_size": int(len(B))},
                measured, float(target), 0.0, measured >= target, seed,
            )
        )
    return _summarize("colour_diversity", reports)


def stat_colour_neighbourhood(colouring, p, q, trials, seed):
    """Minimum over all vertices of the colour-C degree into X for
    independent p-random X and q-random C, against the target pqn/2."""
    n = colouring.n
    spec = colouring.kernel_spec()
    reports = []
    for t in range(trials):
        rng = _trial_rng(seed, t)
        X = rng.random(n) < p
        cmask = rng.random(colouring.n_colours) < q
        X_arr = np.flatnonzero(X).astype(np.int64)
        lo = n
        for v in range(n):
            row = kernels.colour_block(*spec, v, X_arr)
            deg = int(np.count_nonzero(cmask[row] & (X_arr != v)))
            if deg < lo:
                lo = deg
        target = p * q * n / 2
        passed = lo >= target if p > 0 and q > 0 else True
        reports.append(
            TrialReport(
                "colour_neighbourhood",
                {"n": n, "p": p, "q": q},
                float(lo), float(target), 0.0, bool(passed), seed,
            )
        )
    return _summarize("colour_neighbourhood", reports)
