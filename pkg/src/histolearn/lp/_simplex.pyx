# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex phase kernel.

Same contract and pivot rules as the numpy fallback in ``_simplex_py``:
cyclic partial pricing with a Bland's-rule escape after a run of degenerate
pivots, min-ratio leaving with near-ties broken toward the largest pivot
(exact ties toward the smallest basis index under Bland's rule), column
bans instead of unsafe pivots, and optimality declared only against a fresh
factorization.  The heavy per-iteration linear algebra goes through BLAS.
"""

import numpy as np

from libc.math cimport INFINITY, fabs
from scipy.linalg.cython_blas cimport dgemv, dger, dscal

cdef extern from "xmmintrin.h":
    unsigned int _mm_getcsr() nogil
    void _mm_setcsr(unsigned int) nogil

DEF _MXCSR_FTZ_DAZ = 0x8040  # flush-to-zero | denormals-are-zero

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

cdef int _DEGENERATE_RUN = 500


cdef void _refactor(object A_obj, object basis_obj, double[:, ::1] binv):
    fresh = np.linalg.inv(np.asarray(A_obj)[:, np.asarray(basis_obj)])
    cdef double[:, ::1] fv = fresh
    binv[:, :] = fv


def run_phase(double[:, ::1] A, double[::1] b, double[::1] c,
              long[::1] basis, double[:, ::1] binv, Py_ssize_t n_enter,
              double tol_pivot, double tol_dual, long max_iter,
              long refactor_every, Py_ssize_t cursor0=0):
    """Iterate one simplex phase to optimality; mutates basis and binv.

    Returns (status, iterations); see the numpy twin for the full contract.
    """
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t ncols = A.shape[1]
    cdef Py_ssize_t window = n_enter
    if n_enter > 512:
        window = n_enter // 8
        if window < 256:
            window = 256

    xb_arr = np.empty(m)
    y_arr = np.empty(m)
    d_arr = np.empty(m)
    cb_arr = np.empty(m)
    tmp_arr = np.empty(m)
    rc_arr = np.empty(window if window > 0 else 1)
    banned_arr = np.zeros(n_enter if n_enter > 0 else 1, dtype=np.uint8)
    in_basis_arr = np.zeros(ncols, dtype=np.uint8)
    in_basis_arr[np.asarray(basis)] = 1
    cdef double[::1] xb = xb_arr
    cdef double[::1] y = y_arr
    cdef double[::1] d = d_arr
    cdef double[::1] cb = cb_arr
    cdef double[::1] tmp = tmp_arr
    cdef double[::1] rc = rc_arr
    cdef unsigned char[::1] banned = banned_arr
    cdef unsigned char[::1] in_basis = in_basis_arr

    # subnormal operands stall the FPU by orders of magnitude and carry no
    # information at our tolerances; flush them for the duration of the phase
    cdef unsigned int _csr = _mm_getcsr()
    _mm_setcsr(_csr | _MXCSR_FTZ_DAZ)

    cdef int mi = <int> m
    cdef int inc1 = 1
    cdef int lda = <int> ncols
    cdef double done = 1.0, dzero = 0.0, dneg = -1.0
    cdef char trans_n = b'N'
    cdef char trans_t = b'T'

    cdef double feas_slack
    cdef Py_ssize_t cursor = cursor0 % n_enter if n_enter > 0 else 0
    cdef bint bland = False
    cdef bint dirty = False
    cdef Py_ssize_t degen = 0
    cdef double prev_obj = INFINITY
    cdef long it = 0
    cdef Py_ssize_t i, k, q, r, w0, w1, wlen, scanned
    cdef double best, ratio, rmin, piv, obj, dmax, theta
    cdef int wi

    best = 0.0
    for i in range(m):
        if fabs(b[i]) > best:
            best = fabs(b[i])
    feas_slack = 1e-10 * (1.0 + best)

    while it < max_iter:
        it += 1
        if dirty and it % refactor_every == 0:
            _refactor(np.asarray(A), np.asarray(basis), binv)
            banned[:] = 0
            dirty = False

        # xb = binv @ b ; y = binv^T @ cb  (C-order binv is Fortran binv^T)
        dgemv(&trans_t, &mi, &mi, &done, &binv[0, 0], &mi, &b[0], &inc1,
              &dzero, &xb[0], &inc1)
        for i in range(m):
            cb[i] = c[basis[i]]
        dgemv(&trans_n, &mi, &mi, &done, &binv[0, 0], &mi, &cb[0], &inc1,
              &dzero, &y[0], &inc1)

        # entering column
        q = -1
        if bland:
            scanned = 0
            w0 = 0
            while scanned < n_enter and q < 0:
                w1 = w0 + window
                if w1 > n_enter:
                    w1 = n_enter
                wlen = w1 - w0
                for k in range(wlen):
                    rc[k] = c[w0 + k]
                wi = <int> wlen
                dgemv(&trans_n, &wi, &mi, &dneg, &A[0, w0], &lda, &y[0], &inc1,
                      &done, &rc[0], &inc1)
                for k in range(wlen):
                    if rc[k] < -tol_dual and not banned[w0 + k] and not in_basis[w0 + k]:
                        q = w0 + k
                        break
                scanned += wlen
                w0 = w1
        else:
            scanned = 0
            while scanned < n_enter:
                w0 = cursor
                w1 = w0 + window
                if w1 > n_enter:
                    w1 = n_enter
                wlen = w1 - w0
                for k in range(wlen):
                    rc[k] = c[w0 + k]
                wi = <int> wlen
                dgemv(&trans_n, &wi, &mi, &dneg, &A[0, w0], &lda, &y[0], &inc1,
                      &done, &rc[0], &inc1)
                best = -tol_dual
                for k in range(wlen):
                    if rc[k] < best and not banned[w0 + k] and not in_basis[w0 + k]:
                        best = rc[k]
                        q = w0 + k
                if q >= 0:
                    break
                scanned += wlen
                cursor = w1 % n_enter
        if q < 0:
            if dirty:
                _refactor(np.asarray(A), np.asarray(basis), binv)
                banned[:] = 0
                dirty = False
                continue
            _mm_setcsr(_csr)
            return OPTIMAL, it

        # d = binv @ A[:, q]
        dgemv(&trans_t, &mi, &mi, &done, &binv[0, 0], &mi, &A[0, q], &lda,
              &dzero, &d[0], &inc1)

        # leaving row (Harris two-pass ratio test; see the numpy twin)
        rmin = INFINITY
        theta = INFINITY
        dmax = 0.0
        for i in range(m):
            if d[i] > dmax:
                dmax = d[i]
            if d[i] > tol_pivot:
                ratio = xb[i]
                if ratio < 0.0:
                    ratio = 0.0
                if (ratio + feas_slack) / d[i] < theta:
                    theta = (ratio + feas_slack) / d[i]
                ratio = ratio / d[i]
                if ratio < rmin:
                    rmin = ratio
        if rmin == INFINITY:
            if dmax <= 0.0:
                _mm_setcsr(_csr)
                return UNBOUNDED, it
            banned[q] = 1  # improving but numerically unsafe; sideline it
            continue
        r = -1
        if bland:
            for i in range(m):
                if d[i] > tol_pivot:
                    ratio = xb[i]
                    if ratio < 0.0:
                        ratio = 0.0
                    ratio = ratio / d[i]
                    if ratio == rmin and (r < 0 or basis[i] < basis[r]):
                        r = i
        else:
            for i in range(m):
                if d[i] > tol_pivot:
                    ratio = xb[i]
                    if ratio < 0.0:
                        ratio = 0.0
                    ratio = ratio / d[i]
                    if ratio <= theta and (r < 0 or d[i] > d[r]):
                        r = i

        # pivot: scale row r, rank-1 update of the rest
        piv = 1.0 / d[r]
        dscal(&mi, &piv, &binv[r, 0], &inc1)
        for i in range(m):
            tmp[i] = binv[r, i]
        d[r] = 0.0
        # binv -= outer(d, tmp)  <=>  Fortran-view binv^T += -1 * tmp d^T
        dger(&mi, &mi, &dneg, &tmp[0], &inc1, &d[0], &inc1, &binv[0, 0], &mi)
        in_basis[basis[r]] = 0
        in_basis[q] = 1
        basis[r] = q
        dirty = True

        dgemv(&trans_t, &mi, &mi, &done, &binv[0, 0], &mi, &b[0], &inc1,
              &dzero, &xb[0], &inc1)
        obj = 0.0
        for i in range(m):
            obj += c[basis[i]] * xb[i]
        if obj < prev_obj - 1e-12 * (1.0 + fabs(prev_obj)):
            degen = 0
            bland = False
        else:
            degen += 1
            if degen > _DEGENERATE_RUN:
                bland = True
        prev_obj = obj

    _mm_setcsr(_csr)
    return ITERATION_LIMIT, it
