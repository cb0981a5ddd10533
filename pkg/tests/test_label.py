"""Fattening, median tables, probability assignment, and the full learner."""

import math

import numpy as np
import pytest

from histolearn import (
    Config,
    DistributionSpec,
    fatten,
    histogram_of,
    learn,
    make_distribution,
    median_table,
)
from histolearn.core import GeneralizedHistogram, SampleSet
from histolearn.label import MedianTable, assign_probabilities, learn_details
from histolearn.metrics import label_count_cutoff

from conftest import random_histogram


def test_fatten_added_count_formula():
    n = 55
    h = GeneralizedHistogram.from_pairs([(0.5, 2)])
    fat = fatten(h, n)
    added = dict(fat.entries)
    assert added[1 / n] == pytest.approx(n / math.log(n) ** 4, rel=1e-12)


def test_fatten_mass_preserved():
    rng = np.random.default_rng(2)
    for _ in range(25):
        h = random_histogram(rng)
        n = int(rng.integers(5, 200_000))
        assert fatten(h, n).mass() == pytest.approx(h.mass(), abs=1e-9)


def test_fatten_added_mass_amount():
    # at n = 1e5: ceil(ln(n)^2) = 133 classes, each adding 1/ln(n)^4 mass
    n = 100_000
    cutoff = label_count_cutoff(n)
    assert cutoff == 133
    expected_added = cutoff / math.log(n) ** 4
    assert expected_added == pytest.approx(0.00757, abs=5e-5)
    h = GeneralizedHistogram.from_pairs([(0.5, 2)])
    fat = fatten(h, n)
    kept = dict(fat.entries)[0.5]
    assert kept == pytest.approx(2 * (1 - expected_added), rel=1e-12)


def test_fatten_caps_degenerate_small_n():
    # nominal added mass exceeds 1 for n <= 3; the cap keeps the result valid
    h = GeneralizedHistogram.from_pairs([(0.5, 2)])
    fat = fatten(h, 2)
    assert fat.mass() == pytest.approx(1.0, abs=1e-9)
    assert all(c >= 0 for _, c in fat.entries)


def test_median_table_point_mass_dominates_fattening():
    h = GeneralizedHistogram.from_pairs([(0.001, 1000)])
    n = 100_000
    table = median_table(fatten(h, n), n)
    assert table.medians[100] == pytest.approx(0.001)


def test_median_table_two_level_class_ten():
    truth = make_distribution(DistributionSpec("two_level", {"n_ref": 10_000}))
    n = 10_000
    table = median_table(fatten(histogram_of(truth), n), n)
    assert table.medians[10] == pytest.approx(10 / n)


def test_median_table_fallback_when_weights_underflow():
    h = GeneralizedHistogram.from_pairs([(0.9, 1.0)])
    n = 200_000
    table = median_table(fatten(h, n), n)
    assert table.cutoff == label_count_cutoff(n)
    assert all(0.0 <= m <= 1.0 for m in table.medians)


def test_medians_bounded_by_two_log_squared_over_n(uniform1000_sweep):
    # fattening keeps every median within 2*ln(n)^2/n of the origin
    for d in uniform1000_sweep[:5]:
        n = d.report.n
        bound = 2 * math.log(n) ** 2 / n
        assert all(m <= bound for m in d.learned.medians.medians)


def test_assign_probabilities_branches():
    n = 100
    cutoff = label_count_cutoff(n)  # 22
    medians = MedianTable(cutoff, tuple(0.001 + j * 1e-5 for j in range(cutoff)))
    samples = SampleSet.from_counts({"lo": 3, "edge": cutoff, "hi": n - 3 - cutoff})
    dist = assign_probabilities(samples, medians, n)
    assert dist.entries["lo"] == medians.medians[3]
    assert dist.entries["edge"] == cutoff / n  # boundary class is empirical
    assert dist.entries["hi"] == (n - 3 - cutoff) / n


def test_assign_equal_counts_equal_probabilities():
    n = 60
    samples = SampleSet.from_counts({"a": 5, "b": 5, "c": 50})
    dist = learn(samples, Config())
    assert dist.entries["a"] == dist.entries["b"]


def test_single_label_gets_unit_probability():
    samples = SampleSet.from_counts({"only": 100})
    dist = learn(samples, Config())
    assert dist.entries["only"] == 1.0
    assert dist.reserved_unseen_mass == pytest.approx(0.0)


def test_learn_deterministic():
    truth = make_distribution(DistributionSpec("zipf", {"m": 200, "s": 1.0}))
    from histolearn import draw_samples

    samples = draw_samples(truth, 5_000, seed=4)
    d1 = learn(samples, Config())
    d2 = learn(samples, Config())
    assert d1.entries == d2.entries
    assert d1.reserved_unseen_mass == d2.reserved_unseen_mass


def test_learn_details_mass_accounting():
    truth = make_distribution(DistributionSpec("uniform", {"m": 100}))
    from histolearn import draw_samples

    samples = draw_samples(truth, 5_000, seed=1)
    result = learn_details(samples, Config())
    assigned = result.distribution.total_assigned()
    reserved = result.distribution.reserved_unseen_mass
    if assigned <= 1.0:
        assert assigned + reserved == pytest.approx(1.0, abs=1e-9)
        assert result.excess_mass == 0.0
    else:
        assert reserved == 0.0
        assert result.excess_mass == pytest.approx(assigned - 1.0)
