"""Core value types and sample-space operations.

Labeled distributions, unlabeled (generalized) histograms, sample multisets,
fingerprints, and seeded sampling.  All types are immutable after
construction and safe to share across threads; every operation here is a
pure function of its arguments.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class HistolearnError(Exception):
    """Domain error: invalid input, degenerate configuration, failed solve."""


#: probabilities equal after rounding to this many significant digits share a
#: histogram entry (floating point stands in for the exact-equality ideal)
GROUP_DIGITS = 12


def group_probability(p: float) -> float:
    """Round to GROUP_DIGITS significant digits; scale-free, so arbitrarily
    small probabilities still group correctly."""
    if p <= 0.0:
        return p
    return float(f"{p:.{GROUP_DIGITS - 1}e}")


#: mass slack tolerated on histograms produced by recovery / normalization ops
HISTOGRAM_MASS_TOL = 1e-6

#: normalization slack for ground-truth labeled distributions
NORMALIZED_TOL = 1e-9


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Config:
    """Pipeline knobs.  Defaults give the practical desk-scale setup.

    ``mode="paper"`` uses the asymptotic thresholds n**B / n**C (valid only
    under 0.1 > B > C > B/2 > 0); ``"practical"`` uses sqrt(n)-scale
    thresholds that leave a usable fit region at small n.  All logarithms in
    the pipeline are natural; ``tau=None`` resolves to 1/(n*ln(n)) wherever a
    sample size n is in scope.
    """

    mode: str = "practical"
    B: float = 0.08
    C: float = 0.05
    kappa_override: int | None = None
    grid: str = "geometric"
    grid_ratio: float = 1.1
    tau: float | None = None
    rng_seed: int = 0
    # optional per-term 1/sqrt(1+F_i) weights in the recovery objective
    weighted_objective: bool = False

    def __post_init__(self) -> None:
        if self.mode not in ("paper", "practical"):
            raise HistolearnError(f"unknown mode {self.mode!r}")
        if self.grid not in ("linear", "geometric"):
            raise HistolearnError(f"unknown grid {self.grid!r}")
        if not self.grid_ratio > 1.0:
            raise HistolearnError("grid_ratio must exceed 1")
        if self.mode == "paper" and not (0.1 > self.B > self.C > self.B / 2 > 0):
            raise HistolearnError(
                "paper mode requires 0.1 > B > C > B/2 > 0 "
                f"(got B={self.B}, C={self.C})"
            )
        if self.kappa_override is not None and self.kappa_override < 1:
            raise HistolearnError("kappa_override must be a positive integer")
        if self.tau is not None and not 0.0 < self.tau <= 1.0:
            raise HistolearnError("tau must lie in (0, 1]")

    def tau_for(self, n: int) -> float:
        """Truncation threshold: explicit value, else 1/(n*ln(n))."""
        if self.tau is not None:
            return self.tau
        return 1.0 / (n * math.log(n))


# ---------------------------------------------------------------------------
# labeled distributions


class UniformEntries(Mapping):
    """Lazy label -> probability mapping for a uniform distribution over m
    synthetic labels.  Avoids materializing huge supports (m up to 1e7+); the
    first label absorbs the float rounding of 1/m so the total is exactly 1
    to machine precision.
    """

    __slots__ = ("m", "_width", "_p", "_first")

    def __init__(self, m: int):
        if m < 1:
            raise HistolearnError("uniform support size must be positive")
        self.m = int(m)
        self._width = len(str(self.m))
        self._p = 1.0 / self.m
        self._first = 1.0 - (self.m - 1) * self._p

    def label(self, index: int) -> str:
        """1-based synthetic label, e.g. label(1) == 'e0001' when m=1000."""
        return f"e{index:0{self._width}d}"

    def _index_of(self, key: object) -> int | None:
        if not isinstance(key, str) or len(key) != self._width + 1 or key[0] != "e":
            return None
        if not key[1:].isdigit():
            return None
        idx = int(key[1:])
        return idx if 1 <= idx <= self.m else None

    def __getitem__(self, key: str) -> float:
        idx = self._index_of(key)
        if idx is None:
            raise KeyError(key)
        return self._first if idx == 1 else self._p

    def __contains__(self, key: object) -> bool:
        return self._index_of(key) is not None

    def __iter__(self):
        for i in range(1, self.m + 1):
            yield self.label(i)

    def __len__(self) -> int:
        return self.m

    def total(self) -> float:
        return self._first + (self.m - 1) * self._p


@dataclass(frozen=True)
class LabeledDistribution:
    """Map from opaque label to probability, plus mass the estimator knows it
    has not assigned to any observed label (``reserved_unseen_mass``).

    Ground truths must be normalized (use :meth:`require_normalized`);
    estimator outputs may assign less than unit mass, with the deficit
    recorded in ``reserved_unseen_mass``.
    """

    entries: Mapping[str, float]
    reserved_unseen_mass: float = 0.0

    def __post_init__(self) -> None:
        r = self.reserved_unseen_mass
        if not 0.0 <= r <= 1.0:
            raise HistolearnError(f"reserved_unseen_mass {r} outside [0, 1]")
        if isinstance(self.entries, UniformEntries):
            return  # positivity holds by construction
        for label, p in self.entries.items():
            if not 0.0 < p <= 1.0:
                raise HistolearnError(f"probability {p} for label {label!r} outside (0, 1]")

    def total_assigned(self) -> float:
        if isinstance(self.entries, UniformEntries):
            return self.entries.total()
        return float(sum(self.entries.values()))

    def require_normalized(self, tol: float = NORMALIZED_TOL) -> "LabeledDistribution":
        total = self.total_assigned() + self.reserved_unseen_mass
        if abs(total - 1.0) > tol:
            raise HistolearnError(f"distribution not normalized: total mass {total}")
        return self

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# histograms and fingerprints


@dataclass(frozen=True)
class GeneralizedHistogram:
    """Unlabeled histogram: sorted (probability x, multiplicity h(x)) pairs.

    Multiplicities may be fractional ("generalized").  Entries with zero
    multiplicity are absent; x values are strictly increasing.  Coordinates a
    hair above 1 (within the mass tolerance) are accepted because
    mass-preserving rounding of an input normalized to 1 +/- 1e-6 can scale a
    coordinate past 1 by that same slack.
    """

    entries: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        prev = 0.0
        for x, c in self.entries:
            if not x > prev:
                raise HistolearnError("histogram support must be strictly increasing and positive")
            if x > 1.0 + HISTOGRAM_MASS_TOL:
                raise HistolearnError(f"histogram probability {x} exceeds 1")
            if c < 0.0:
                raise HistolearnError(f"negative multiplicity {c} at {x}")
            prev = x

    @classmethod
    def from_pairs(cls, pairs) -> "GeneralizedHistogram":
        """Build from (x, count) pairs: merges equal x, drops zero counts."""
        merged: dict[float, float] = {}
        for x, c in pairs:
            if c < 0.0:
                raise HistolearnError(f"negative multiplicity {c} at {x}")
            if c > 0.0:
                merged[float(x)] = merged.get(float(x), 0.0) + float(c)
        return cls(tuple(sorted(merged.items())))

    @cached_property
    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.entries], dtype=float)

    @cached_property
    def counts(self) -> np.ndarray:
        return np.array([c for _, c in self.entries], dtype=float)

    def mass(self) -> float:
        return float(np.dot(self.xs, self.counts)) if self.entries else 0.0

    def support_size(self) -> float:
        return float(self.counts.sum()) if self.entries else 0.0

    def is_integral(self, tol: float = 1e-9) -> bool:
        if not self.entries:
            return True
        return bool(np.all(np.abs(self.counts - np.round(self.counts)) <= tol))

    def require_normalized(self, tol: float = HISTOGRAM_MASS_TOL) -> "GeneralizedHistogram":
        if abs(self.mass() - 1.0) > tol:
            raise HistolearnError(f"histogram not normalized: mass {self.mass()}")
        return self

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Fingerprint:
    """Map count i -> number of domain elements seen exactly i times."""

    entries: Mapping[int, int]
    n: int

    def __post_init__(self) -> None:
        total = 0
        for i, f in self.entries.items():
            if not (isinstance(i, int) and i >= 1):
                raise HistolearnError(f"fingerprint count index {i!r} must be a positive integer")
            if not (isinstance(f, int) and f >= 0):
                raise HistolearnError(f"fingerprint entry F_{i}={f!r} must be a nonnegative integer")
            total += i * f
        if total != self.n:
            raise HistolearnError(f"fingerprint mass {total} does not match sample size {self.n}")

    def get(self, i: int) -> int:
        return int(self.entries.get(i, 0))

    def max_count(self) -> int:
        return max(self.entries, default=0)

    def distinct(self) -> int:
        return sum(self.entries.values())


@dataclass(frozen=True)
class SampleSet:
    """Multiset of observed labels with total size n."""

    counts: Mapping[str, int]
    n: int

    def __post_init__(self) -> None:
        total = 0
        for label, c in self.counts.items():
            if not (isinstance(c, int) and c >= 1):
                raise HistolearnError(f"sample count {c!r} for {label!r} must be a positive integer")
            total += c
        if total != self.n:
            raise HistolearnError(f"sample counts sum to {total}, expected n={self.n}")

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "SampleSet":
        return cls(dict(counts), sum(counts.values()))

    @classmethod
    def from_labels(cls, labels) -> "SampleSet":
        return cls.from_counts(Counter(labels))


# ---------------------------------------------------------------------------
# operations


def build_fingerprint(samples: SampleSet) -> Fingerprint:
    """Count how many labels were seen exactly i times, for each i."""
    freq = Counter(samples.counts.values())
    return Fingerprint({int(i): int(f) for i, f in sorted(freq.items())}, samples.n)


def empirical_distribution(samples: SampleSet) -> LabeledDistribution:
    """Each observed label gets count/n; nothing reserved."""
    if samples.n <= 0:
        raise HistolearnError("empty input")
    n = samples.n
    return LabeledDistribution({label: c / n for label, c in samples.counts.items()}, 0.0)


def histogram_of(dist: LabeledDistribution) -> GeneralizedHistogram:
    """Group equal probabilities (after rounding to GROUP_DIGITS significant
    digits)."""
    if isinstance(dist.entries, UniformEntries):
        u = dist.entries
        pairs: dict[float, float] = {group_probability(u[u.label(1)]): 1.0}
        if u.m > 1:
            rest = group_probability(u[u.label(2)])
            pairs[rest] = pairs.get(rest, 0.0) + (u.m - 1)
        return GeneralizedHistogram.from_pairs(pairs.items())
    grouped: dict[float, int] = {}
    for p in dist.entries.values():
        x = group_probability(p)
        grouped[x] = grouped.get(x, 0) + 1
    return GeneralizedHistogram.from_pairs(grouped.items())


def draw_samples(dist: LabeledDistribution, n: int, seed: int) -> SampleSet:
    """n i.i.d. draws by inverse CDF; a pure function of (dist, n, seed).

    Labels are ordered lexicographically before building the CDF so that two
    equal distributions sample identically regardless of insertion order.
    """
    if n < 1:
        raise HistolearnError("sample size must be positive")
    if dist.reserved_unseen_mass != 0.0:
        raise HistolearnError("cannot sample: reserved_unseen_mass must be zero")
    dist.require_normalized()
    rng = np.random.default_rng(seed)

    if isinstance(dist.entries, UniformEntries):
        u = dist.entries
        idx = rng.integers(0, u.m, size=n)
        uniq, cnt = np.unique(idx, return_counts=True)
        return SampleSet({u.label(int(i) + 1): int(c) for i, c in zip(uniq, cnt)}, n)

    labels = sorted(dist.entries)
    probs = np.array([dist.entries[label] for label in labels], dtype=float)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0  # guard the top against float shortfall
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    cnt = np.bincount(idx, minlength=len(labels))
    return SampleSet(
        {labels[i]: int(c) for i, c in enumerate(cnt) if c > 0}, n
    )
