"""Self-contained dense linear programming.

Standard form only: min c.z subject to A z = b, z >= 0 (callers reformulate
l1 objectives via split slack variables).  The per-iteration hot loop runs in
a compiled Cython kernel when the extension built, with a numpy fallback
selected at import time; set HISTOLEARN_PURE=1 to force the fallback.
``benchmarks/bench_simplex.py`` compares the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..core import HistolearnError
from . import _driver, _simplex_py

_FORCE_PURE = os.environ.get("HISTOLEARN_PURE", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _simplex as _kernel  # compiled

        _BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build environment
        _kernel = _simplex_py
        _BACKEND = "python"
else:
    _kernel = _simplex_py
    _BACKEND = "python"


def backend() -> str:
    """Which simplex kernel is active: "cython" or "python"."""
    return _BACKEND


@dataclass(frozen=True)
class LpProblem:
    """min objective . z subject to constraints_eq z = rhs_eq, z >= 0."""

    objective: np.ndarray
    constraints_eq: np.ndarray
    rhs_eq: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.constraints_eq, dtype=float)
        b = np.asarray(self.rhs_eq, dtype=float)
        c = np.asarray(self.objective, dtype=float)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise HistolearnError("constraint matrix must be 2-D and nonempty")
        if b.shape != (A.shape[0],):
            raise HistolearnError("rhs length must match constraint row count")
        if c.shape != (A.shape[1],):
            raise HistolearnError("objective length must match variable count")
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise HistolearnError("LP data must be finite")

    @property
    def n_vars(self) -> int:
        return int(np.asarray(self.constraints_eq).shape[1])


@dataclass(frozen=True)
class LpSolution:
    """Solver outcome; z and objective_value are meaningful when optimal."""

    status: str  # optimal | infeasible | unbounded | iteration_limit
    z: np.ndarray
    objective_value: float
    iterations: int


def solve_lp(
    problem: LpProblem,
    tolerance: float = 1e-9,
    max_iterations: int | None = None,
) -> LpSolution:
    """Solve the standard-form program with the active backend.

    Deterministic: identical inputs produce identical status, point, and
    objective.  Infeasible / unbounded / iteration-limit outcomes are
    reported in the status, never raised.
    """
    status, z, obj, iters = _driver.solve_standard_form(
        np.asarray(problem.objective, dtype=float),
        np.asarray(problem.constraints_eq, dtype=float),
        np.asarray(problem.rhs_eq, dtype=float),
        _kernel,
        tolerance=tolerance,
        max_iterations=max_iterations,
    )
    return LpSolution(status=status, z=z, objective_value=obj, iterations=iters)


__all__ = ["LpProblem", "LpSolution", "solve_lp", "backend"]
