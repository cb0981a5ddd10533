"""Histogram recovery from a fingerprint.

Builds a grid of candidate probabilities, assembles a linear program whose
variables are (fractional) multiplicities on that grid, fits the expected
fingerprint to the observed one in l1 under a unit-total-mass constraint,
and appends the empirical estimates for high-count elements.  The l1
objective is reformulated with split slack pairs so the solver stays in
standard form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Config, Fingerprint, GeneralizedHistogram, HistolearnError
from .lp import LpProblem, solve_lp
from .poisson import poisson_matrix

_MAX_GRID_POINTS = 5_000_000
_NEGLIGIBLE_COUNT = 1e-11


def _ceil_eps(v: float) -> int:
    """Ceiling that forgives ~1e-9 of float noise on exact integers."""
    return math.ceil(v - 1e-9)


@dataclass(frozen=True)
class RecoveryThresholds:
    """Count-region boundaries for one recovery run.

    The LP fits fingerprint indices 1..kappa; the grid extends to
    x_max = (kappa + kappa2)/n; counts strictly above empirical_cutoff
    = kappa + 2*kappa2 are taken at their empirical probability i/n.
    Counts in between contribute to neither (their elements are still
    labeled downstream).
    """

    kappa: int
    kappa2: int
    x_max: float
    empirical_cutoff: int


@dataclass(frozen=True)
class RecoveryResult:
    histogram: GeneralizedHistogram
    lp_objective: float
    thresholds: RecoveryThresholds
    grid_size: int


def make_thresholds(n: int, config: Config) -> RecoveryThresholds:
    """Fit-region sizes: n**B / n**C in paper mode, sqrt(n)-scale in
    practical mode (exponent 0.6 mirrors C/B sitting in (1/2, 1))."""
    if n < 2:
        raise HistolearnError("need a sample of size at least 2")
    if config.mode == "paper":
        kappa = _ceil_eps(n**config.B)
        kappa2 = _ceil_eps(n**config.C)
    else:
        kappa = math.isqrt(n - 1) + 1
        kappa2 = _ceil_eps(kappa**0.6)
    if config.kappa_override is not None:
        kappa = config.kappa_override
        if config.mode == "practical":
            kappa2 = _ceil_eps(kappa**0.6)
    if config.mode == "paper" and kappa <= kappa2:
        raise HistolearnError(
            f"paper-mode thresholds degenerate at n={n}: kappa={kappa} <= kappa2={kappa2}"
        )
    x_max = min(1.0, (kappa + kappa2) / n)
    return RecoveryThresholds(
        kappa=kappa,
        kappa2=kappa2,
        x_max=x_max,
        empirical_cutoff=kappa + 2 * kappa2,
    )


def make_grid(n: int, thresholds: RecoveryThresholds, config: Config) -> np.ndarray:
    """Candidate probabilities: multiples of 1/n**2 up to x_max (linear), or
    a geometric ladder from 1/n**2 with x_max appended (the default)."""
    lo = 1.0 / n**2
    x_max = thresholds.x_max
    if x_max < lo:
        raise HistolearnError("x_max below the finest grid step")
    if config.grid == "linear":
        count = int(round(x_max * n * n))
        if count > _MAX_GRID_POINTS:
            raise HistolearnError(
                f"linear grid needs {count} points at n={n}; use the geometric grid"
            )
        return np.arange(1, count + 1, dtype=float) / (n * n)
    pts = [lo]
    ratio = config.grid_ratio
    while pts[-1] * ratio < x_max * (1.0 - 1e-12):
        pts.append(pts[-1] * ratio)
    if pts[-1] < x_max:
        pts.append(x_max)
    return np.array(pts, dtype=float)


def _fingerprint_vector(fingerprint: Fingerprint, kappa: int) -> np.ndarray:
    f = np.zeros(kappa, dtype=float)
    for i, cnt in fingerprint.entries.items():
        if 1 <= i <= kappa:
            f[i - 1] = cnt
    return f


def lp_region_mass(fingerprint: Fingerprint, thresholds: RecoveryThresholds) -> float:
    """Probability mass left for the grid after the empirical region:
    1 - sum_{i > cutoff} (i/n) F_i."""
    n = fingerprint.n
    high = sum(
        (i / n) * cnt
        for i, cnt in fingerprint.entries.items()
        if i > thresholds.empirical_cutoff
    )
    return 1.0 - high


def assemble_lp(
    fingerprint: Fingerprint,
    thresholds: RecoveryThresholds,
    grid: np.ndarray,
    weighted: bool = False,
) -> LpProblem:
    """Variables: one multiplicity per grid point, then slack pairs
    (s_i+, s_i-) for i = 1..kappa.  Rows: per-index fit
    poi-expectation + s_i+ - s_i- = F_i, and the mass constraint."""
    n = fingerprint.n
    kappa = thresholds.kappa
    g = len(grid)
    fvec = _fingerprint_vector(fingerprint, kappa)
    mass = lp_region_mass(fingerprint, thresholds)
    if mass < -1e-9:
        raise HistolearnError("empirical mass exceeds unity")
    mass = max(mass, 0.0)

    pmat = poisson_matrix(n * grid, np.arange(1, kappa + 1, dtype=float))
    A = np.zeros((kappa + 1, g + 2 * kappa))
    A[:kappa, :g] = pmat
    A[:kappa, g : g + kappa] = np.eye(kappa)
    A[:kappa, g + kappa :] = -np.eye(kappa)
    A[kappa, :g] = grid
    b = np.concatenate([fvec, [mass]])
    w = 1.0 / np.sqrt(1.0 + fvec) if weighted else np.ones(kappa)
    c = np.concatenate([np.zeros(g), w, w])
    return LpProblem(objective=c, constraints_eq=A, rhs_eq=b)


def recover_histogram(fingerprint: Fingerprint, config: Config) -> RecoveryResult:
    """Solve the fit LP and append the empirical high-count region."""
    n = fingerprint.n
    if n < 2:
        raise HistolearnError("need a sample of size at least 2")
    thresholds = make_thresholds(n, config)
    grid = make_grid(n, thresholds, config)
    problem = assemble_lp(fingerprint, thresholds, grid, weighted=config.weighted_objective)
    solution = solve_lp(problem)
    if solution.status != "optimal":
        raise HistolearnError(
            f"recovery LP ended with status {solution.status!r} "
            f"after {solution.iterations} iterations "
            f"(n={n}, kappa={thresholds.kappa}, grid={len(grid)})"
        )
    v = solution.z[: len(grid)]
    pairs = [(float(x), float(cnt)) for x, cnt in zip(grid, v) if cnt > _NEGLIGIBLE_COUNT]
    for i, cnt in fingerprint.entries.items():
        if i > thresholds.empirical_cutoff:
            pairs.append((i / n, float(cnt)))
    histogram = GeneralizedHistogram.from_pairs(pairs).require_normalized()
    return RecoveryResult(
        histogram=histogram,
        lp_objective=float(solution.objective_value),
        thresholds=thresholds,
        grid_size=len(grid),
    )


def fingerprint_fit_residual(
    histogram: GeneralizedHistogram, fingerprint: Fingerprint, thresholds: RecoveryThresholds
) -> float:
    """sum_{i=1..kappa} |F_i - expected F_i under the grid-region part of the
    histogram|.  Equals the (unweighted) LP objective at the recovered point."""
    n = fingerprint.n
    keep = histogram.xs <= thresholds.x_max * (1.0 + 1e-12)
    xs = histogram.xs[keep]
    cs = histogram.counts[keep]
    fvec = _fingerprint_vector(fingerprint, thresholds.kappa)
    if len(xs) == 0:
        return float(np.abs(fvec).sum())
    pmat = poisson_matrix(n * xs, np.arange(1, thresholds.kappa + 1, dtype=float))
    expected = pmat @ cs
    return float(np.abs(fvec - expected).sum())


def truth_anchored_objective(
    truth: GeneralizedHistogram,
    fingerprint: Fingerprint,
    thresholds: RecoveryThresholds,
    grid: np.ndarray,
) -> float:
    """Objective value of the feasible point obtained from a known histogram
    by rounding each in-range probability up to the nearest grid point
    (mass-preservingly) and rebalancing any leftover mass at the grid top.
    The solved LP objective can never exceed this value.
    """
    n = fingerprint.n
    v = np.zeros(len(grid))
    for y, hy in truth.entries:
        if y > thresholds.x_max:
            continue
        k = int(np.searchsorted(grid, y, side="left"))
        k = min(k, len(grid) - 1)
        v[k] += hy * y / grid[k]
    target = lp_region_mass(fingerprint, thresholds)
    residual = target - float(np.dot(grid, v))
    if residual > 0.0:
        v[-1] += residual / grid[-1]
    elif residual < 0.0:
        deficit = -residual
        for k in range(len(grid) - 1, -1, -1):
            here = grid[k] * v[k]
            take = min(here, deficit)
            if take > 0.0:
                v[k] -= take / grid[k]
                deficit -= take
            if deficit <= 1e-15:
                break
    fvec = _fingerprint_vector(fingerprint, thresholds.kappa)
    pmat = poisson_matrix(n * grid, np.arange(1, thresholds.kappa + 1, dtype=float))
    return float(np.abs(fvec - pmat @ v).sum())
