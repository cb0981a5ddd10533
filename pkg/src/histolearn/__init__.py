"""histolearn: learn discrete distributions from sample fingerprints.

Recovers the unlabeled histogram of probabilities by fitting Poissonized
fingerprint expectations with a linear program, labels observed elements
with Poisson-weighted median probabilities, extrapolates distinct-element
counts to larger samples, and scores estimators with exact truncated
relative-earthmover and l1 metrics.
"""

from .baselines import good_turing
from .core import (
    Config,
    Fingerprint,
    GeneralizedHistogram,
    HistolearnError,
    LabeledDistribution,
    SampleSet,
    build_fingerprint,
    draw_samples,
    empirical_distribution,
    histogram_of,
)
from .harness import DistributionSpec, TrialReport, make_distribution, run_experiment, run_trial
from .label import MedianTable, assign_probabilities, fatten, learn, median_table
from .lp import LpProblem, LpSolution, solve_lp
from .metrics import (
    WeightedPoints,
    dev,
    expected_distinct,
    l1_distance,
    min_relabel_truncated_l1,
    opt_estimate,
    poisson_median,
    truncated_relative_emd,
    weighted_median,
)
from .poisson import poisson_pmf
from .recover import RecoveryResult, RecoveryThresholds, make_grid, make_thresholds, recover_histogram
from .rounding import round_histogram

__version__ = "0.1.0"

__all__ = [
    "Config",
    "DistributionSpec",
    "Fingerprint",
    "GeneralizedHistogram",
    "HistolearnError",
    "LabeledDistribution",
    "LpProblem",
    "LpSolution",
    "MedianTable",
    "RecoveryResult",
    "RecoveryThresholds",
    "SampleSet",
    "TrialReport",
    "WeightedPoints",
    "assign_probabilities",
    "build_fingerprint",
    "dev",
    "draw_samples",
    "empirical_distribution",
    "expected_distinct",
    "fatten",
    "good_turing",
    "histogram_of",
    "l1_distance",
    "learn",
    "make_distribution",
    "make_grid",
    "make_thresholds",
    "median_table",
    "min_relabel_truncated_l1",
    "opt_estimate",
    "poisson_median",
    "poisson_pmf",
    "recover_histogram",
    "round_histogram",
    "run_experiment",
    "run_trial",
    "solve_lp",
    "truncated_relative_emd",
    "weighted_median",
]
