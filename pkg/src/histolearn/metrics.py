"""Exact distances and error functionals.

Truncated relative earthmover distance between histograms (computed exactly
by quantile matching on the line), minimum-relabeling truncated l1, plain l1
between labeled distributions, distinct-element extrapolation, weighted
medians, per-count deviation sums, and the idealized-labeler error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GeneralizedHistogram, HistolearnError, LabeledDistribution
from .poisson import poisson_matrix, poisson_row

_MASS_MATCH_TOL = 1e-6
_WEIGHT_FLOOR = 1e-300


@dataclass(frozen=True)
class WeightedPoints:
    """Points on the line with nonnegative weights; input to weighted_median."""

    values: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_pairs(cls, pairs) -> "WeightedPoints":
        vals = np.array([v for v, _ in pairs], dtype=float)
        wts = np.array([w for _, w in pairs], dtype=float)
        return cls(vals, wts)


def weighted_median(points: WeightedPoints) -> float:
    """Left median: the smallest value v whose cumulative weight reaches half.

    Zero-weight points are ignored; zero total weight is an error (callers
    that need a fallback handle it themselves, see poisson_median).  When the
    half-total lands exactly on a cumulative boundary, the verdict follows
    float rounding of the sequential cumulative sum — both boundary values
    minimize the weighted deviation there, so the choice is a deterministic
    tie-break, not an error.
    """
    w = np.asarray(points.weights, dtype=float)
    v = np.asarray(points.values, dtype=float)
    if np.any(w < 0.0):
        raise HistolearnError("negative weight in weighted median")
    keep = w > 0.0
    w, v = w[keep], v[keep]
    if len(w) == 0 or float(w.sum()) <= 0.0:
        raise HistolearnError("degenerate median")
    order = np.argsort(v, kind="stable")
    cum = np.cumsum(w[order])
    # the half-total threshold must come from the same summation order as
    # the cumulative, or exact ties resolve inconsistently at one ulp
    k = int(np.searchsorted(cum, cum[-1] / 2.0, side="left"))
    return float(v[order][min(k, len(v) - 1)])


def _mass_profile(h: GeneralizedHistogram):
    xs = h.xs
    masses = xs * h.counts
    keep = masses > 0.0
    return xs[keep], masses[keep]


def truncated_relative_emd(
    g: GeneralizedHistogram, h: GeneralizedHistogram, tau: float
) -> float:
    """Minimum cost of morphing g's probability mass into h's, where moving a
    unit of mass from probability x to y costs |ln max(x,tau) - ln max(y,tau)|.

    Computed exactly by matching cumulative-mass quantiles in sorted order:
    the per-unit cost is |f(x) - f(y)| for the monotone map
    f = ln(max(., tau)), and for such costs sorted transport is optimal on
    the line.
    """
    if not 0.0 < tau <= 1.0:
        raise HistolearnError("tau must lie in (0, 1]")
    gx, gm = _mass_profile(g)
    hx, hm = _mass_profile(h)
    tg, th = float(gm.sum()), float(hm.sum())
    if abs(tg - th) > _MASS_MATCH_TOL:
        raise HistolearnError(f"unbalanced transport: masses {tg} vs {th}")
    gl = np.log(np.maximum(gx, tau)) if len(gx) else gx
    hl = np.log(np.maximum(hx, tau)) if len(hx) else hx

    cost = 0.0
    i = j = 0
    ri = gm[i] if i < len(gm) else 0.0
    rj = hm[j] if j < len(hm) else 0.0
    while i < len(gm) and j < len(hm):
        step = ri if ri <= rj else rj
        cost += step * abs(gl[i] - hl[j])
        ri -= step
        rj -= step
        if ri <= 0.0:
            i += 1
            ri = gm[i] if i < len(gm) else 0.0
        if rj <= 0.0:
            j += 1
            rj = hm[j] if j < len(hm) else 0.0
    return float(cost)


def untruncated_relative_emd(g: GeneralizedHistogram, h: GeneralizedHistogram) -> float:
    """Relative earthmover distance with no truncation in effect: evaluated
    as the tau-truncated distance at half the smallest support probability,
    below which truncation is inert."""
    supports = [x for x, _ in g.entries] + [x for x, _ in h.entries]
    if not supports:
        return 0.0
    return truncated_relative_emd(g, h, min(supports) / 2.0)


def min_relabel_truncated_l1(
    p: LabeledDistribution, q: LabeledDistribution, tau: float
) -> float:
    """Minimum over relabelings of sum_i |max(p_i,tau) - max(q_i,tau)|.

    Sorting both probability multisets descending and padding the shorter
    with zeros attains the minimum: l1 matching of two real sequences is
    minimized in sorted order.
    """
    if not 0.0 <= tau <= 1.0:
        raise HistolearnError("tau must lie in [0, 1]")
    pv = np.sort(np.fromiter(p.entries.values(), dtype=float))[::-1]
    qv = np.sort(np.fromiter(q.entries.values(), dtype=float))[::-1]
    size = max(len(pv), len(qv))
    pa = np.full(size, tau)
    qa = np.full(size, tau)
    pa[: len(pv)] = np.maximum(pv, tau)
    qa[: len(qv)] = np.maximum(qv, tau)
    return float(np.abs(pa - qa).sum())


def l1_distance(p: LabeledDistribution, q: LabeledDistribution) -> float:
    """Sum over the label union of |p - q|, plus the difference in reserved
    (unassigned) mass, so an estimator's deficit counts against it once."""
    small, big = (p, q) if len(p.entries) <= len(q.entries) else (q, p)
    big_total = big.total_assigned()
    acc = 0.0
    big_entries = big.entries
    for label, sv in small.entries.items():
        bv = big_entries.get(label, 0.0)
        acc += abs(sv - bv) - bv
    acc += big_total
    acc += abs(p.reserved_unseen_mass - q.reserved_unseen_mass)
    return float(acc)


def expected_distinct(h: GeneralizedHistogram, k: int) -> float:
    """Expected number of distinct elements in k draws from a distribution
    with histogram h: sum over support of (1 - (1-x)**k) * h(x)."""
    if k < 1:
        raise HistolearnError("k must be a positive integer")
    if not h.entries:
        return 0.0
    xs = h.xs
    cs = h.counts
    with np.errstate(divide="ignore", invalid="ignore"):
        seen = -np.expm1(k * np.log1p(-xs))  # guarded: x=1 gives log1p=-inf, seen=1
    seen = np.where(xs >= 1.0, 1.0, seen)
    return float(np.dot(seen, cs))


def dev(h: GeneralizedHistogram, m: float, j: int, n: int) -> float:
    """Poisson-weighted total deviation of h's support from the value m:
    sum over support of |x - m| * h(x) * pmf(n*x, j)."""
    if m < 0.0:
        raise HistolearnError("m must be nonnegative")
    if not h.entries:
        return 0.0
    xs = h.xs
    w = h.counts * poisson_row(n * xs, j)
    return float(np.dot(np.abs(xs - m), w))


def poisson_median(h: GeneralizedHistogram, j: int, n: int) -> float:
    """Weighted median of h's support with weights h(x) * pmf(n*x, j); falls
    back to j/n when the total weight underflows."""
    if not h.entries:
        return j / n
    xs = h.xs
    w = h.counts * poisson_row(n * xs, j)
    if float(w.sum()) < _WEIGHT_FLOOR:
        return j / n
    return weighted_median(WeightedPoints(xs, w))


def label_count_cutoff(n: int) -> int:
    """ceil(ln(n)**2): count classes below this use table medians."""
    return max(1, math.ceil(math.log(n) ** 2 - 1e-9))


def opt_estimate(h: GeneralizedHistogram, n: int) -> float:
    """Lower-bound estimate of the best achievable expected l1 error of any
    learner that assigns one probability per count class, restricted to
    elements seen fewer than ceil(ln(n)**2) times.

    Sums, over count classes j, the deviation of h's support from the
    class's Poisson-weighted median (including the unseen class j=0).
    """
    h.require_normalized()
    if not h.entries:
        return 0.0
    cutoff = label_count_cutoff(n)
    xs = h.xs
    cs = h.counts
    pmat = poisson_matrix(n * xs, np.arange(cutoff, dtype=float))
    total = 0.0
    for j in range(cutoff):
        w = cs * pmat[j]
        wsum = float(w.sum())
        if wsum < _WEIGHT_FLOOR:
            m = j / n
        else:
            m = weighted_median(WeightedPoints(xs, w))
        total += float(np.dot(np.abs(xs - m), w))
    return total
