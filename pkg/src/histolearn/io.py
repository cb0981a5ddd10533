"""File formats.

Samples: newline-delimited labels, or TSV ``label<TAB>count`` (auto-detected
by a tab on the first non-comment line).  Histograms: lines ``x h(x)`` as
decimal floats, unsorted input accepted.  Labeled distributions: TSV
``label<TAB>probability`` sorted by descending probability, closed by a
``# unseen_mass <value>`` comment.  Everything is UTF-8; ``#`` starts a
comment line.  Probabilities serialize with 17 significant digits so a
write/read round trip is lossless.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import TextIO

from .core import (
    Fingerprint,
    GeneralizedHistogram,
    HistolearnError,
    LabeledDistribution,
    SampleSet,
)


def _fmt(v: float) -> str:
    return format(v, ".17g")


def _open_for_read(source) -> TextIO:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8")
    return source


def _data_lines(handle: TextIO):
    for raw in handle:
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield line


def read_samples(source) -> SampleSet:
    """Auto-detects the TSV count format vs one-label-per-line."""
    handle = _open_for_read(source)
    try:
        lines = list(_data_lines(handle))
    finally:
        if handle is not source:
            handle.close()
    if not lines:
        return SampleSet({}, 0)
    if "\t" in lines[0]:
        counts: Counter[str] = Counter()
        for line in lines:
            try:
                label, count_s = line.split("\t")
                count = int(count_s)
            except ValueError as exc:
                raise HistolearnError(f"bad samples line {line!r}") from exc
            if count < 1:
                raise HistolearnError(f"nonpositive count in samples line {line!r}")
            counts[label] += count
        return SampleSet.from_counts(counts)
    return SampleSet.from_labels(lines)


def write_samples(samples: SampleSet, sink: TextIO) -> None:
    for label in sorted(samples.counts):
        sink.write(f"{label}\t{samples.counts[label]}\n")


def read_histogram(source) -> GeneralizedHistogram:
    handle = _open_for_read(source)
    pairs = []
    try:
        for line in _data_lines(handle):
            parts = line.split()
            if len(parts) != 2:
                raise HistolearnError(f"bad histogram line {line!r}")
            try:
                x, c = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise HistolearnError(f"bad histogram line {line!r}") from exc
            pairs.append((x, c))
    finally:
        if handle is not source:
            handle.close()
    return GeneralizedHistogram.from_pairs(pairs)


def write_histogram(h: GeneralizedHistogram, sink: TextIO) -> None:
    for x, c in h.entries:
        sink.write(f"{_fmt(x)} {_fmt(c)}\n")


def read_distribution(source) -> LabeledDistribution:
    handle = _open_for_read(source)
    entries: dict[str, float] = {}
    reserved = 0.0
    try:
        for raw in handle:
            line = raw.rstrip("\r\n")
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                parts = stripped[1:].split()
                if len(parts) == 2 and parts[0] == "unseen_mass":
                    reserved = float(parts[1])
                continue
            try:
                label, prob_s = line.split("\t")
                prob = float(prob_s)
            except ValueError as exc:
                raise HistolearnError(f"bad distribution line {line!r}") from exc
            entries[label] = prob
    finally:
        if handle is not source:
            handle.close()
    return LabeledDistribution(entries, reserved)


def write_distribution(dist: LabeledDistribution, sink: TextIO) -> None:
    ordered = sorted(dist.entries.items(), key=lambda kv: (-kv[1], kv[0]))
    for label, prob in ordered:
        sink.write(f"{label}\t{_fmt(prob)}\n")
    sink.write(f"# unseen_mass {_fmt(dist.reserved_unseen_mass)}\n")


def write_fingerprint(fp: Fingerprint, sink: TextIO) -> None:
    for i in sorted(fp.entries):
        sink.write(f"{i}\t{fp.entries[i]}\n")
    sink.write(f"# n {fp.n}\n")
