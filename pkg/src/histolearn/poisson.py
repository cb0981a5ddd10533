"""Poisson probability kernels.

Two evaluation paths are provided on purpose.  ``poisson_pmf`` is the scalar
reference: it anchors one value at the distribution mode via log-gamma and
then walks a multiplicative recurrence to the requested index, so adjacent
values are mutually consistent to a few ulp (direct log-gamma evaluation
cannot deliver that once the log-gamma argument is large).  ``poisson_matrix``
and ``poisson_row`` are the vectorized log-gamma kernels for bulk work, where
~1e-13 relative accuracy is plenty and throughput matters.

Results smaller than the smallest positive normal double are flushed to
exact zero; subnormal tail probabilities carry no usable precision.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

_DBL_MIN = 2.2250738585072014e-308
# exp() underflows (even to subnormals) a bit below -745; with headroom for
# the chain walk we skip the walk entirely when the target is hopeless.
_LOG_CUTOFF = -760.0


def _log_pmf(lam: float, j: float) -> float:
    return -lam + j * math.log(lam) - math.lgamma(j + 1.0)


def poisson_pmf(lam: float, j: int) -> float:
    """P[Poisson(lam) = j], i.e. exp(-lam) * lam**j / j!.

    Exact 1.0 for (0, 0) and exact 0.0 for (0, j>0).  Safe for j up to 1e6
    and beyond: evaluation is organized so neither lam**j nor j! is formed.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if j < 0:
        raise ValueError("j must be a nonnegative integer")
    if lam == 0.0:
        return 1.0 if j == 0 else 0.0
    if _log_pmf(lam, j) < _LOG_CUTOFF:
        return 0.0
    mode = int(lam)
    p = math.exp(_log_pmf(lam, mode))
    if mode < j:
        for t in range(mode, j):
            p *= lam / (t + 1)
            if p < _DBL_MIN:
                return 0.0
    else:
        for t in range(mode, j, -1):
            p *= t / lam
            if p < _DBL_MIN:
                return 0.0
    return p if p >= _DBL_MIN else 0.0


def poisson_matrix(lams: np.ndarray, js: np.ndarray) -> np.ndarray:
    """Matrix P with P[a, b] = poisson pmf at count js[a] under rate lams[b]."""
    lams = np.asarray(lams, dtype=float)
    js = np.asarray(js, dtype=float)
    lam = lams[None, :]
    jj = js[:, None]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logp = -lam + jj * np.log(lam) - gammaln(jj + 1.0)
        logp = np.where((lam == 0.0) & (jj == 0.0), 0.0, logp)
        logp = np.where((lam == 0.0) & (jj > 0.0), -np.inf, logp)
        out = np.exp(logp)
    out[out < _DBL_MIN] = 0.0
    return out


def poisson_row(lams: np.ndarray, j: int) -> np.ndarray:
    """Vector of pmf values at a single count j across many rates."""
    return poisson_matrix(lams, np.array([j], dtype=float))[0]
