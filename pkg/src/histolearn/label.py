"""Labeling observed elements with Poisson-weighted median probabilities.

The recovered histogram is first "fattened" with a little mass at the
empirical probabilities j/n, which regularizes the per-count medians against
recovery error; each count class below ceil(ln(n)**2) is then assigned its
Poisson-weighted median probability, and higher classes their empirical j/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Config,
    GeneralizedHistogram,
    HistolearnError,
    LabeledDistribution,
    SampleSet,
    build_fingerprint,
)
from .metrics import WeightedPoints, label_count_cutoff, weighted_median
from .poisson import poisson_matrix
from .recover import RecoveryResult, recover_histogram

_WEIGHT_FLOOR = 1e-300
# cap on the total fattening mass; the nominal amount ceil(ln(n)^2)/ln(n)^4
# exceeds 1 for n <= 3, where the scheme is meaningless anyway
_MAX_FATTEN_MASS = 0.5


@dataclass(frozen=True)
class MedianTable:
    """Per-count-class probabilities m_j for j = 0..cutoff-1.

    j = 0 is kept for error estimation; labeling itself uses j >= 1.
    """

    cutoff: int
    medians: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.medians) != self.cutoff:
            raise HistolearnError("median table length must equal its cutoff")
        for j, m in enumerate(self.medians):
            if not 0.0 <= m <= 1.0:
                raise HistolearnError(f"median m_{j}={m} outside [0, 1]")


@dataclass(frozen=True)
class LearnResult:
    """Learned distribution plus the intermediates diagnostics want."""

    distribution: LabeledDistribution
    recovery: RecoveryResult
    fattened: GeneralizedHistogram
    medians: MedianTable
    excess_mass: float  # amount by which assigned mass exceeds 1, if any


def fatten(h: GeneralizedHistogram, n: int) -> GeneralizedHistogram:
    """Add n/(j*ln(n)**4) elements at probability j/n for each count class
    j = 1..ceil(ln(n)**2), scaling pre-existing entries down so total mass
    stays 1."""
    cutoff = label_count_cutoff(n)
    ln4 = math.log(n) ** 4
    added_counts = [n / (j * ln4) for j in range(1, cutoff + 1)]
    added_mass = cutoff / ln4
    if added_mass > _MAX_FATTEN_MASS:
        scale = _MAX_FATTEN_MASS / added_mass
        added_counts = [c * scale for c in added_counts]
        added_mass = _MAX_FATTEN_MASS
    pairs = [(x, c * (1.0 - added_mass)) for x, c in h.entries]
    pairs.extend((j / n, added_counts[j - 1]) for j in range(1, cutoff + 1))
    return GeneralizedHistogram.from_pairs(pairs)


def median_table(h_fattened: GeneralizedHistogram, n: int) -> MedianTable:
    """Poisson-weighted median of the fattened support for each count class;
    classes whose total weight underflows fall back to j/n."""
    cutoff = label_count_cutoff(n)
    xs = h_fattened.xs
    cs = h_fattened.counts
    if len(xs) == 0:
        return MedianTable(cutoff, tuple(j / n for j in range(cutoff)))
    pmat = poisson_matrix(n * xs, np.arange(cutoff, dtype=float))
    medians = []
    for j in range(cutoff):
        w = cs * pmat[j]
        if float(w.sum()) < _WEIGHT_FLOOR:
            medians.append(j / n)
        else:
            medians.append(weighted_median(WeightedPoints(xs, w)))
    return MedianTable(cutoff, tuple(medians))


def assign_probabilities(
    samples: SampleSet, medians: MedianTable, n: int
) -> LabeledDistribution:
    """Labels seen j times get m_j for 1 <= j < cutoff, else the empirical
    j/n.  Mass not assigned to any observed label is reserved."""
    by_count: dict[int, float] = {}
    entries: dict[str, float] = {}
    assigned = 0.0
    for label, j in samples.counts.items():
        p = by_count.get(j)
        if p is None:
            p = medians.medians[j] if 1 <= j < medians.cutoff else j / n
            by_count[j] = p
        entries[label] = p
        assigned += p
    reserved = max(0.0, 1.0 - assigned)
    return LabeledDistribution(entries, reserved)


def learn_details(samples: SampleSet, config: Config) -> LearnResult:
    """Full pipeline with intermediates: recover, fatten, medians, assign."""
    if samples.n < 2:
        raise HistolearnError("need a sample of size at least 2")
    n = samples.n
    recovery = recover_histogram(build_fingerprint(samples), config)
    fattened = fatten(recovery.histogram, n)
    table = median_table(fattened, n)
    dist = assign_probabilities(samples, table, n)
    excess = max(0.0, dist.total_assigned() - 1.0)
    return LearnResult(
        distribution=dist,
        recovery=recovery,
        fattened=fattened,
        medians=table,
        excess_mass=excess,
    )


def learn(samples: SampleSet, config: Config) -> LabeledDistribution:
    """Learn a labeled distribution from samples; deterministic given
    (samples, config).  Output is not renormalized: any excess over unit
    mass is surfaced via LearnResult.excess_mass, not hidden."""
    return learn_details(samples, config).distribution
