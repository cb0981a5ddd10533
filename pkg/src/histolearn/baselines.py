"""Reference estimators.

The empirical distribution lives in core; here is classic Good-Turing
frequency estimation: the total probability of elements seen i times is
estimated as (i+1) F_{i+1} / n and split evenly within the count class.
When F_{i+1} = 0 the raw estimate collapses, so that class falls back to the
empirical i/n.  Missing mass is F_1/n.
"""

from __future__ import annotations

from .core import HistolearnError, LabeledDistribution, SampleSet, build_fingerprint


def good_turing(samples: SampleSet) -> LabeledDistribution:
    if samples.n < 1:
        raise HistolearnError("empty input")
    n = samples.n
    fp = build_fingerprint(samples)
    per_class: dict[int, float] = {}
    for i, f_i in fp.entries.items():
        f_next = fp.get(i + 1)
        if f_next > 0:
            per_class[i] = (i + 1) * f_next / (n * f_i)
        else:
            per_class[i] = i / n
    entries = {label: per_class[c] for label, c in samples.counts.items()}
    reserved = min(1.0, max(0.0, fp.get(1) / n))
    return LabeledDistribution(entries, reserved)
