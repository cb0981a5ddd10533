"""Pure-numpy simplex phase kernel (fallback backend).

Runs revised-simplex iterations on one phase of the two-phase method,
maintaining an explicit basis inverse.  Entering-variable selection uses
cyclic partial pricing (most negative reduced cost within a window); after a
run of degenerate pivots it switches to Bland's rule, which guarantees
termination, and switches back once the objective moves.  All tie-breaks are
deterministic, so the iteration path is reproducible bit for bit.

Stability mechanics (the driver equilibrates the data to unit max-norm, so
the tolerances below are meaningful): pivots at or below ``tol_pivot`` are
refused; an improving column offering no safe pivot is *banned* rather than
misread as an unbounded ray, and bans are cleared whenever the inverse is
refactorized.  Optimality is only declared against a freshly factorized
inverse.

The compiled backend in ``_simplex.pyx`` implements the same contract; the
driver treats the two interchangeably.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

_DEGENERATE_RUN = 500  # consecutive non-improving pivots before Bland's rule


def run_phase(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    basis: np.ndarray,
    binv: np.ndarray,
    n_enter: int,
    tol_pivot: float,
    tol_dual: float,
    max_iter: int,
    refactor_every: int,
    cursor0: int = 0,
) -> tuple[int, int]:
    """Iterate to optimality of min c.x over the current basis.

    Mutates ``basis`` and ``binv`` in place.  Only columns with index below
    ``n_enter`` may enter the basis (artificials are placed above it).
    ``cursor0`` rotates where partial pricing starts scanning; retry rungs
    use it to steer the pivot path away from a basin that collapsed.
    Returns (status, iterations).
    """
    m = A.shape[0]
    window = n_enter if n_enter <= 512 else max(256, n_enter // 8)
    cursor = cursor0 % n_enter if n_enter > 0 else 0
    bland = False
    degen = 0
    prev_obj = np.inf
    banned = np.zeros(n_enter, dtype=bool)
    dirty = False  # pivots applied since the last refactorization
    feas_slack = 1e-10 * (1.0 + float(np.abs(b).max(initial=0.0)))
    # columns already basic must never price in again (their true reduced
    # cost is zero; numerical drift can make it look negative)
    in_basis = np.zeros(A.shape[1], dtype=bool)
    in_basis[basis] = True

    def refactor() -> None:
        nonlocal dirty
        binv[:, :] = np.linalg.inv(A[:, basis])
        banned[:] = False
        dirty = False

    it = 0
    while it < max_iter:
        it += 1
        if dirty and it % refactor_every == 0:
            refactor()
        xb = binv @ b
        y = c[basis] @ binv

        # --- entering column
        q = -1
        if bland:
            rc = c[:n_enter] - y @ A[:, :n_enter]
            rc[banned | in_basis[:n_enter]] = 0.0
            hits = np.flatnonzero(rc < -tol_dual)
            if len(hits):
                q = int(hits[0])
        else:
            scanned = 0
            while scanned < n_enter:
                w0 = cursor
                w1 = min(w0 + window, n_enter)
                rc = c[w0:w1] - y @ A[:, w0:w1]
                rc[banned[w0:w1] | in_basis[w0:w1]] = 0.0
                k = int(np.argmin(rc))
                if rc[k] < -tol_dual:
                    q = w0 + k
                    break
                scanned += w1 - w0
                cursor = w1 % n_enter
        if q < 0:
            if dirty:
                # only trust optimality from a fresh factorization; this also
                # lifts the bans so refused columns get a second look
                refactor()
                continue
            return OPTIMAL, it

        # --- leaving row (Harris two-pass ratio test)
        d = binv @ A[:, q]
        eligible = d > tol_pivot
        if not eligible.any():
            if d.max(initial=0.0) <= 0.0:
                return UNBOUNDED, it
            # an improving direction exists but no pivot is numerically safe:
            # sideline the column until the next refactorization
            banned[q] = True
            continue
        ratios = np.full(m, np.inf)
        ratios[eligible] = np.maximum(xb[eligible], 0.0) / d[eligible]
        rmin = ratios.min()
        if bland:
            # exact min-ratio ties broken to the smallest basis index
            ties = np.flatnonzero(ratios == rmin)
            r = int(ties[np.argmin(basis[ties])])
        else:
            # pass 2: admit rows within a feasibility sliver of the strict
            # minimum and take the numerically largest pivot among them; the
            # tiny infeasibility this injects is repaired by refactorization
            # and audited at extraction
            relaxed = np.full(m, np.inf)
            relaxed[eligible] = (np.maximum(xb[eligible], 0.0) + feas_slack) / d[eligible]
            theta = relaxed.min()
            near = np.flatnonzero(eligible & (ratios <= theta))
            r = int(near[np.argmax(d[near])])

        # --- pivot: basis and inverse update
        piv = d[r]
        binv[r, :] /= piv
        dcol = d.copy()
        dcol[r] = 0.0
        binv -= np.outer(dcol, binv[r, :])
        in_basis[basis[r]] = False
        in_basis[q] = True
        basis[r] = q
        dirty = True

        obj = float(c[basis] @ (binv @ b))
        if obj < prev_obj - 1e-12 * (1.0 + abs(prev_obj)):
            degen = 0
            bland = False
        else:
            degen += 1
            if degen > _DEGENERATE_RUN:
                bland = True
        prev_obj = obj

    return ITERATION_LIMIT, it
