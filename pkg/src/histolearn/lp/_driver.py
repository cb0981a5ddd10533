"""Two-phase dense simplex driver.

Owns everything outside the per-iteration hot loop: phase-I setup with
artificial variables, feasibility detection, driving leftover artificials
out of the basis (deleting redundant rows), phase II on the real objective,
and extraction of the final solution from a freshly factorized basis.
The hot loop itself lives in a backend kernel (compiled or numpy).
"""

from __future__ import annotations

import contextlib

import numpy as np

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover - optional speedup only
    def threadpool_limits(*args, **kwargs):
        return contextlib.nullcontext()

from . import _simplex_py

OPTIMAL = _simplex_py.OPTIMAL
UNBOUNDED = _simplex_py.UNBOUNDED
ITERATION_LIMIT = _simplex_py.ITERATION_LIMIT

# on the equilibrated system; pivots below this corrupt the basis inverse.
# if a solve still degenerates, retry with progressively stricter settings
# and a rotated pricing start (the pivot path, not the data, is what fails)
_ATTEMPTS = (
    (1e-6, 100, 0),
    (1e-5, 50, 977),
    (3e-5, 20, 499),
    (1e-5, 5, 123),
    (1e-6, 2, 0),
)


def default_iteration_limit(m: int, n: int) -> int:
    return max(10_000, 30 * (m + n))


def solve_standard_form(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    kernel,
    tolerance: float = 1e-9,
    max_iterations: int | None = None,
) -> tuple[str, np.ndarray, float, int]:
    """min c.x subject to A x = b, x >= 0.

    Returns (status, x, objective, iterations) with status one of
    "optimal" / "infeasible" / "unbounded" / "iteration_limit".  A solve
    whose basis degenerates beyond repair at every tolerance rung reports
    "iteration_limit" (the solver gave up), never an exception.
    """
    spent = 0
    # simplex issues thousands of small BLAS calls; per-call thread-pool
    # synchronization costs far more than the arithmetic, so pin to one thread
    with threadpool_limits(limits=1, user_api="blas"):
        for tol_pivot, refactor_every, cursor0 in _ATTEMPTS:
            try:
                status, x, obj, iters = _solve_once(
                    c, A, b, kernel, tolerance, max_iterations,
                    tol_pivot, refactor_every, cursor0,
                )
            except np.linalg.LinAlgError:
                spent += 1
                continue
            return status, x, obj, iters
    return "iteration_limit", np.zeros(np.asarray(A).shape[1]), float("nan"), spent


def _solve_once(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    kernel,
    tolerance: float,
    max_iterations: int | None,
    tol_pivot: float,
    refactor_every: int,
    cursor0: int = 0,
) -> tuple[str, np.ndarray, float, int]:
    A_orig = np.array(A, dtype=float, order="C")
    b_orig = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    m, nv = A_orig.shape
    if max_iterations is None:
        max_iterations = default_iteration_limit(m, nv)

    # equilibrate to unit max-norm rows then columns; vital when coefficient
    # magnitudes span many orders (tiny grid probabilities vs unit slacks)
    row_max = np.abs(A_orig).max(axis=1)
    row_scale = np.where(row_max > 0.0, 1.0 / np.maximum(row_max, 1e-300), 1.0)
    A = A_orig * row_scale[:, None]
    b = b_orig * row_scale
    col_max = np.abs(A).max(axis=0)
    col_scale = np.where(col_max > 0.0, 1.0 / np.maximum(col_max, 1e-300), 1.0)
    A = np.ascontiguousarray(A * col_scale[None, :])
    c_scaled = c * col_scale

    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # phase I: artificial identity basis
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(nv), np.ones(m)])
    basis = np.arange(nv, nv + m, dtype=np.int64)
    binv = np.eye(m)

    code, it1 = kernel.run_phase(
        A1, b, c1, basis, binv, nv, tol_pivot, max(tolerance, 1e-11),
        max_iterations, refactor_every, cursor0,
    )
    if code == ITERATION_LIMIT:
        return "iteration_limit", np.zeros(nv), float("nan"), it1
    # (phase I is always bounded, so code is OPTIMAL here)

    xb = binv @ b
    feas_tol = max(tolerance, 1e-11) * (1.0 + float(np.abs(b).max(initial=0.0)))
    if float(c1[basis] @ xb) > feas_tol:
        return "infeasible", np.zeros(nv), float("nan"), it1

    # clear leftover artificials: pivot them out where possible, otherwise
    # the row is redundant and gets dropped
    redundant: list[int] = []
    in_basis = np.zeros(nv + m, dtype=bool)
    in_basis[basis] = True
    for i in range(m):
        if basis[i] < nv:
            continue
        u = binv[i] @ A  # row i of binv * original columns
        pivot_j = -1
        for j in range(nv):
            if not in_basis[j] and abs(u[j]) > 1e-8:
                pivot_j = j
                break
        if pivot_j < 0:
            redundant.append(i)
            continue
        d = binv @ A[:, pivot_j]
        piv = d[i]
        binv[i, :] /= piv
        dcol = d.copy()
        dcol[i] = 0.0
        binv -= np.outer(dcol, binv[i, :])
        in_basis[basis[i]] = False
        in_basis[pivot_j] = True
        basis[i] = pivot_j

    if redundant:
        keep = np.setdiff1d(np.arange(m), np.array(redundant, dtype=int))
        A = np.ascontiguousarray(A[keep])
        b = b[keep]
        A_orig = np.ascontiguousarray(A_orig[keep])
        b_orig = b_orig[keep]
        basis = basis[keep]
        m = len(keep)
        if m == 0:
            # every row was vacuous; x = 0 is optimal unless the objective
            # rewards growing some coordinate
            if c.min(initial=0.0) < -max(tolerance, 1e-11):
                return "unbounded", np.zeros(nv), float("nan"), it1
            return "optimal", np.zeros(nv), 0.0, it1
        binv = np.linalg.inv(A[:, basis])

    # phase II on the real objective
    code, it2 = kernel.run_phase(
        A, b, c_scaled, basis, binv, nv, tol_pivot, max(tolerance, 1e-11),
        max(1, max_iterations - it1), refactor_every, cursor0,
    )
    iters = it1 + it2
    if code == UNBOUNDED:
        return "unbounded", np.zeros(nv), float("nan"), iters
    if code == ITERATION_LIMIT:
        return "iteration_limit", np.zeros(nv), float("nan"), iters

    # final extraction against the *original* data for an accurate residual
    xb = np.linalg.solve(A_orig[:, basis], b_orig)
    x = np.zeros(nv)
    x[basis] = xb
    # the Harris ratio test may leave slivers of negativity on basic
    # variables; snap those to zero, then audit the point (a near-singular
    # basis can pass solve() yet be garbage)
    b_mag = 1.0 + float(np.abs(b_orig).max(initial=0.0))
    snap = 5e-9 * b_mag
    tiny = (x < 0.0) & (x > -snap)
    x[tiny] = 0.0
    residual = float(np.abs(A_orig @ x - b_orig).max(initial=0.0))
    if residual > 1e-7 * b_mag or x.min(initial=0.0) < -1e-9:
        raise np.linalg.LinAlgError("extracted point fails the feasibility audit")
    return "optimal", x, float(c @ x), iters
