"""Rounding a generalized histogram to integral multiplicities.

Works stage by stage over dyadic probability ranges.  Within a stage the
non-integral entries are swept in descending probability order, rounding up
whenever the running mass difference is nonpositive and down otherwise; the
stage's entries are then deposited at coordinates scaled by m/(m+diff),
which restores the stage's mass exactly.  The perturbation is bounded in
relative earthmover distance by 20 * (largest non-integral coordinate).
"""

from __future__ import annotations

import math

from .core import GeneralizedHistogram, HistolearnError

_INTEGRAL_TOL = 1e-9


def _stage_of(x: float) -> int:
    """Dyadic stage index: stage j holds [2**-(j+1), 2**-j), except stage 0
    which is closed above so x = 1 belongs to it."""
    return max(0, math.ceil(-math.log2(x)) - 1)


def round_histogram(g: GeneralizedHistogram) -> GeneralizedHistogram:
    """Integral histogram at the same total mass (drift <= 1e-12)."""
    g.require_normalized()
    out: dict[float, float] = {}
    stages: dict[int, list[tuple[float, float]]] = {}
    for x, c in g.entries:
        if abs(c - round(c)) <= _INTEGRAL_TOL:
            snapped = float(round(c))
            if snapped > 0.0:
                out[x] = out.get(x, 0.0) + snapped
        else:
            stages.setdefault(_stage_of(x), []).append((x, c))

    for j in sorted(stages):
        entries = sorted(stages[j], reverse=True)  # descending x
        m = sum(x * c for x, c in entries)
        diff = 0.0
        rounded: list[tuple[float, float]] = []
        for x, c in entries:
            hc = math.ceil(c) if diff <= 0.0 else math.floor(c)
            diff += x * (hc - c)
            rounded.append((x, float(hc)))
        scale = m / (m + diff)
        for x, hc in rounded:
            if hc > 0.0:
                xi = x * scale
                out[xi] = out.get(xi, 0.0) + hc

    result = GeneralizedHistogram.from_pairs(out.items())
    drift = abs(result.mass() - g.mass())
    if drift > 1e-9:  # arithmetic guard; the scheme preserves mass exactly
        raise HistolearnError(f"rounding drifted mass by {drift}")
    return result
