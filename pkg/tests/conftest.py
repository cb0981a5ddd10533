"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the code paths they check: the
transport LP oracle prices every pairwise move explicitly instead of
quantile matching, and the vertex-enumeration oracle scans all basic
feasible solutions instead of pivoting.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from histolearn import Config, DistributionSpec, LpProblem, solve_lp
from histolearn.core import GeneralizedHistogram, LabeledDistribution
from histolearn.harness import TrialDetails, run_trial_details


# ---------------------------------------------------------------------------
# independent oracles


def transport_lp_oracle(
    g: GeneralizedHistogram, h: GeneralizedHistogram, tau: float
) -> float:
    """Min-cost transport between the mass profiles, solved as an explicit
    assignment LP over every (source, target) pair."""
    gx, gm = g.xs, g.xs * g.counts
    hx, hm = h.xs, h.xs * h.counts
    ns, nt = len(gx), len(hx)
    cost = np.abs(
        np.log(np.maximum(gx, tau))[:, None] - np.log(np.maximum(hx, tau))[None, :]
    ).ravel()
    A = np.zeros((ns + nt, ns * nt))
    for i in range(ns):
        A[i, i * nt : (i + 1) * nt] = 1.0
    for j in range(nt):
        A[ns + j, j::nt] = 1.0
    b = np.concatenate([gm, hm])
    sol = solve_lp(LpProblem(objective=cost, constraints_eq=A, rhs_eq=b))
    assert sol.status == "optimal", sol.status
    return float(sol.objective_value)


def vertex_enumeration_optimum(
    c: np.ndarray, A: np.ndarray, b: np.ndarray
) -> float:
    """Exhaustive minimum of c.x over basic feasible solutions of
    {A x = b, x >= 0}; exact for bounded LPs with full-row-rank A."""
    m, d = A.shape
    best = math.inf
    for cols in itertools.combinations(range(d), m):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, b)
        if xb.min() < -1e-9:
            continue
        best = min(best, float(c[list(cols)] @ xb))
    return best


def brute_min_weighted_deviation(
    xs: np.ndarray, weights: np.ndarray, n_scan: int = 1000
) -> float:
    """min over m of sum |x - m| * w, scanning support points plus a dense
    grid over [0, 2 max(x)]."""
    candidates = np.concatenate([xs, np.linspace(0.0, 2.0 * xs.max(), n_scan)])
    totals = (np.abs(xs[None, :] - candidates[:, None]) * weights[None, :]).sum(axis=1)
    return float(totals.min())


# ---------------------------------------------------------------------------
# random generators


def random_histogram(rng: np.random.Generator, max_points: int = 8) -> GeneralizedHistogram:
    """Normalized generalized histogram with log-uniform support."""
    npts = int(rng.integers(1, max_points + 1))
    xs = np.unique(np.exp(rng.uniform(np.log(1e-6), 0.0, npts)))
    masses = rng.dirichlet(np.ones(len(xs)))
    return GeneralizedHistogram.from_pairs(
        [(float(x), float(m / x)) for x, m in zip(xs, masses)]
    )


def random_labeled(rng: np.random.Generator, max_support: int = 10) -> LabeledDistribution:
    size = int(rng.integers(1, max_support + 1))
    probs = rng.dirichlet(np.ones(size))
    return LabeledDistribution(
        {f"w{i:03d}": float(p) for i, p in enumerate(probs)}, 0.0
    )


# ---------------------------------------------------------------------------
# shared Monte-Carlo sweeps (computed once per session, reused by the
# acceptance suite and by module-level property tests)

_PRACTICAL = Config()


def _sweep(spec: DistributionSpec, n: int, seeds: range) -> list[TrialDetails]:
    details = [run_trial_details(spec, n, seed, _PRACTICAL) for seed in seeds]
    failed = [d.report.error for d in details if d.report.error]
    assert not failed, f"trial failures in sweep {spec}: {failed}"
    return details


@pytest.fixture(scope="session")
def uniform1000_sweep() -> list[TrialDetails]:
    return _sweep(DistributionSpec("uniform", {"m": 1000}), 100_000, range(20))


@pytest.fixture(scope="session")
def two_level_sweep() -> list[TrialDetails]:
    return _sweep(DistributionSpec("two_level", {"n_ref": 10_000}), 10_000, range(20))


@pytest.fixture(scope="session")
def sparse_uniform_sweep() -> list[TrialDetails]:
    return _sweep(DistributionSpec("uniform", {"m": 10_000_000}), 1_000, range(20))


@pytest.fixture(scope="session")
def zipf_sweep() -> list[TrialDetails]:
    return _sweep(DistributionSpec("zipf", {"m": 50_000, "s": 1.0}), 10_000, range(10))
