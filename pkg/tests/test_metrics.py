"""Distances, medians, deviations, and their exactness/metric properties."""

import math

import numpy as np
import pytest

from histolearn import (
    DistributionSpec,
    HistolearnError,
    LabeledDistribution,
    WeightedPoints,
    dev,
    expected_distinct,
    histogram_of,
    l1_distance,
    make_distribution,
    min_relabel_truncated_l1,
    opt_estimate,
    poisson_median,
    truncated_relative_emd,
    weighted_median,
)
from histolearn.core import GeneralizedHistogram
from histolearn.metrics import untruncated_relative_emd
from histolearn.poisson import poisson_pmf

from conftest import brute_min_weighted_deviation, random_histogram, random_labeled


# ---------------------------------------------------------------------------
# weighted median


def test_weighted_median_examples():
    assert weighted_median(WeightedPoints.from_pairs([(1, 1), (2, 1), (3, 1)])) == 2
    assert weighted_median(WeightedPoints.from_pairs([(1, 1), (2, 3)])) == 2
    # left-median tie convention
    assert weighted_median(WeightedPoints.from_pairs([(1, 1), (2, 1)])) == 1


def test_weighted_median_degenerate():
    with pytest.raises(HistolearnError, match="degenerate median"):
        weighted_median(WeightedPoints.from_pairs([(1.0, 0.0)]))


# ---------------------------------------------------------------------------
# truncated relative earthmover distance


def test_emd_identity():
    h = GeneralizedHistogram.from_pairs([(0.2, 3), (0.4, 1)])
    for tau in (1e-6, 0.1, 1.0):
        assert truncated_relative_emd(h, h, tau) == 0.0


def test_emd_single_move():
    g = GeneralizedHistogram.from_pairs([(0.5, 2)])
    h = GeneralizedHistogram.from_pairs([(0.25, 4)])
    assert truncated_relative_emd(g, h, 1e-6) == pytest.approx(math.log(2), rel=1e-12)
    assert truncated_relative_emd(g, h, 0.3) == pytest.approx(
        abs(math.log(0.5) - math.log(0.3)), rel=1e-12
    )


def test_emd_unbalanced_rejected():
    g = GeneralizedHistogram.from_pairs([(0.5, 2)])
    h = GeneralizedHistogram.from_pairs([(0.5, 1)])
    with pytest.raises(HistolearnError, match="unbalanced transport"):
        truncated_relative_emd(g, h, 0.1)


def test_emd_metric_properties_on_random_triples():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a, b, c = (random_histogram(rng, 6) for _ in range(3))
        tau = float(np.exp(rng.uniform(np.log(1e-5), np.log(1.0))))
        dab = truncated_relative_emd(a, b, tau)
        dba = truncated_relative_emd(b, a, tau)
        dac = truncated_relative_emd(a, c, tau)
        dcb = truncated_relative_emd(c, b, tau)
        assert dab >= 0.0
        assert dab == pytest.approx(dba, abs=1e-9)
        assert dab <= dac + dcb + 1e-9


def test_emd_monotone_in_tau():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a, b = random_histogram(rng), random_histogram(rng)
        t1 = float(np.exp(rng.uniform(np.log(1e-6), np.log(0.5))))
        t2 = float(np.exp(rng.uniform(np.log(t1), 0.0)))
        assert truncated_relative_emd(a, b, t2) <= truncated_relative_emd(a, b, t1) + 1e-12


def test_untruncated_emd_is_inert_below_support():
    g = GeneralizedHistogram.from_pairs([(0.5, 2)])
    h = GeneralizedHistogram.from_pairs([(0.25, 4)])
    assert untruncated_relative_emd(g, h) == pytest.approx(math.log(2), rel=1e-12)


# ---------------------------------------------------------------------------
# min-relabel l1 and plain l1


def test_min_relabel_examples():
    p = LabeledDistribution({"a": 0.7, "b": 0.3})
    q = LabeledDistribution({"c": 0.6, "d": 0.4})
    assert min_relabel_truncated_l1(p, p, 0.2) == 0.0
    assert min_relabel_truncated_l1(p, q, 0.0) == pytest.approx(0.2, rel=1e-12)
    assert min_relabel_truncated_l1(
        LabeledDistribution({"a": 1.0}), LabeledDistribution({"b": 1.0}), 0.0
    ) == 0.0


def test_min_relabel_pads_with_tau():
    p = LabeledDistribution({"a": 1.0})
    q = LabeledDistribution({"b": 0.5, "c": 0.5})
    # sorted match: |1 - 0.5| + |max(0, 0.1) - 0.5|
    assert min_relabel_truncated_l1(p, q, 0.1) == pytest.approx(0.9, rel=1e-12)


def test_l1_examples():
    p = LabeledDistribution({"a": 0.6, "b": 0.4})
    assert l1_distance(p, p) == 0.0
    assert l1_distance(LabeledDistribution({"a": 1.0}), LabeledDistribution({"b": 1.0})) == 2.0
    q = LabeledDistribution({"a": 0.5, "b": 0.5})
    assert l1_distance(p, q) == pytest.approx(0.2, rel=1e-12)


def test_l1_charges_reserved_difference_once():
    truth = LabeledDistribution({"a": 0.5, "b": 0.5})
    est = LabeledDistribution({"a": 0.5}, reserved_unseen_mass=0.5)
    # |0.5-0.5| + unmatched 0.5 + reserved difference 0.5
    assert l1_distance(truth, est) == pytest.approx(1.0, rel=1e-12)


def test_l1_iteration_side_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(25):
        p, q = random_labeled(rng), random_labeled(rng)
        assert l1_distance(p, q) == pytest.approx(l1_distance(q, p), abs=1e-12)


# ---------------------------------------------------------------------------
# expected distinct elements


def test_expected_distinct_one_draw_is_total_mass():
    rng = np.random.default_rng(5)
    for _ in range(20):
        h = random_histogram(rng)
        assert expected_distinct(h, 1) == pytest.approx(h.mass(), abs=1e-9)


def test_expected_distinct_uniform_two():
    h = GeneralizedHistogram.from_pairs([(0.5, 2)])
    assert expected_distinct(h, 2) == pytest.approx(1.5, rel=1e-12)


def test_expected_distinct_matches_simulation_on_zipf():
    # simulation oracle: mean distinct count over 10,000 sampled draws
    truth = make_distribution(DistributionSpec("zipf", {"m": 1000, "s": 1.0}))
    h = histogram_of(truth)
    k = 500
    predicted = expected_distinct(h, k)
    labels = sorted(truth.entries)
    probs = np.array([truth.entries[l] for l in labels])
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    rng = np.random.default_rng(31)
    trials = 10_000
    distinct = np.empty(trials)
    for t in range(trials):
        idx = np.searchsorted(cdf, rng.random(k), side="right")
        distinct[t] = len(np.unique(idx))
    se = distinct.std(ddof=1) / math.sqrt(trials)
    assert abs(distinct.mean() - predicted) <= 3 * se


# ---------------------------------------------------------------------------
# dev / poisson medians / opt estimate


def test_dev_zero_at_exact_support():
    h = GeneralizedHistogram.from_pairs([(0.2, 5)])
    for j in (0, 1, 4):
        assert dev(h, 0.2, j, 10) == 0.0


def test_dev_direct_formula():
    h = GeneralizedHistogram.from_pairs([(0.1, 10)])
    assert dev(h, 0.2, 1, 10) == pytest.approx(math.exp(-1.0), rel=1e-9)


def test_poisson_median_single_support():
    h = GeneralizedHistogram.from_pairs([(0.001, 1000)])
    assert poisson_median(h, 1, 1000) == 0.001


def test_poisson_median_two_level_class_ten():
    # the 891-strong low level dominates the class-10 Poisson weights
    h = GeneralizedHistogram.from_pairs([(0.001, 891), (0.0011, 99)])
    assert poisson_median(h, 10, 10_000) == 0.001


def test_poisson_median_underflow_fallback():
    h = GeneralizedHistogram.from_pairs([(0.9, 1.0)])  # n*x huge, weight 0 at j=0
    assert poisson_median(h, 0, 200_000) == 0.0


def test_median_minimizes_dev_against_scan():
    rng = np.random.default_rng(17)
    for _ in range(100):
        h = random_histogram(rng)
        n = int(rng.integers(10, 10_000))
        j = int(rng.integers(0, 30))
        m_star = poisson_median(h, j, n)
        xs = h.xs
        w = h.counts * np.array([poisson_pmf(float(n * x), j) for x in xs])
        if w.sum() <= 0.0:
            continue
        best = brute_min_weighted_deviation(xs, w)
        assert dev(h, m_star, j, n) <= best + 1e-12


def test_opt_estimate_point_mass_is_zero():
    h = GeneralizedHistogram.from_pairs([(1.0, 1)])
    assert opt_estimate(h, 100) == 0.0


def test_opt_estimate_uniform_two_small_n():
    # exhaustive oracle: enumerate all 2^4 ordered outcomes; every element
    # seen j times has true probability 0.5, so the per-class medians are
    # 0.5 and the best-median error is exactly zero
    h = GeneralizedHistogram.from_pairs([(0.5, 2)])
    assert opt_estimate(h, 4) == pytest.approx(0.0, abs=1e-15)


def test_opt_estimate_matches_per_class_scan():
    # independent evaluation: sum over classes of the scanned minimum
    rng = np.random.default_rng(23)
    for _ in range(10):
        h = random_histogram(rng, 5)
        n = int(rng.integers(20, 2000))
        cutoff = max(1, math.ceil(math.log(n) ** 2 - 1e-9))
        total = 0.0
        for j in range(cutoff):
            w = h.counts * np.array([poisson_pmf(float(n * x), j) for x in h.xs])
            if w.sum() < 1e-300:
                total += dev(h, j / n, j, n)
            else:
                total += brute_min_weighted_deviation(h.xs, w)
        assert opt_estimate(h, n) == pytest.approx(total, rel=1e-9, abs=1e-12)


def test_weighted_median_is_always_a_minimizer():
    # rounded weights manufacture exact cumulative ties; whatever the
    # tie-break, the returned value must minimize the weighted deviation
    rng = np.random.default_rng(31337)
    for _ in range(2000):
        k = int(rng.integers(1, 12))
        vals = np.round(rng.normal(size=k), 3)
        wts = np.round(rng.uniform(0, 3, size=k), 2)
        if wts[wts > 0].sum() <= 0:
            continue
        m = weighted_median(WeightedPoints(vals, wts))
        devs = [float((np.abs(vals - v) * wts).sum()) for v in set(vals[wts > 0])]
        mine = float((np.abs(vals - m) * wts).sum())
        assert mine <= min(devs) + 1e-12 * (1 + min(devs))
