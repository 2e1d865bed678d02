# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense-tableau simplex kernel for positive matrix games.

Twin of ``_simplex_py.py`` with identical LP formulation and pivoting rules;
see that module for the algorithm description. Only the inner loops differ
(plain C loops here instead of vectorized numpy updates).
"""

import numpy as np

STATUS_OK = 0
STATUS_PIVOT_LIMIT = 1
STATUS_NO_PIVOT = 2

DEF DEGENERATE_STREAK = 32

name = "c"


def solve_positive_game(a, max_pivots=10000):
    """Solve the matrix-game LP for a strictly positive (m, k) payoff matrix.

    Returns ``(status, x, y, pivots)`` with the unnormalized primal weights
    ``x`` (length m, row player) and dual weights ``y`` (length k, column
    player). ``sum(x) == sum(y) == 1 / value`` up to rounding.
    """
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] av = a_arr
    cdef Py_ssize_t m = av.shape[0]
    cdef Py_ssize_t k = av.shape[1]
    cdef Py_ssize_t ncols = m + k + 1
    cdef Py_ssize_t limit = max_pivots

    tab = np.zeros((k + 1, ncols))
    cdef double[:, ::1] t = tab
    basis_arr = np.empty(k, dtype=np.intp)
    cdef Py_ssize_t[::1] basis = basis_arr

    cdef Py_ssize_t r, j, col, row
    cdef double amax = av[0, 0]
    for r in range(m):
        for j in range(k):
            t[j, r] = av[r, j]
            if av[r, j] > amax:
                amax = av[r, j]
    for r in range(k):
        t[r, m + r] = 1.0
        t[r, ncols - 1] = 1.0
        basis[r] = m + r
    for j in range(m):
        t[k, j] = -1.0

    cdef double scale = 1.0 + amax
    cdef double opt_tol = 1e-11 * scale
    cdef double piv_tol = 1e-12 * scale

    cdef bint bland = False
    cdef int streak = 0
    cdef Py_ssize_t pivots = 0
    cdef double best, d, ratio, best_ratio, prev, piv, f
    cdef double INF = float("inf")
    cdef int status = STATUS_OK

    while True:
        col = -1
        if bland:
            for j in range(m + k):
                if t[k, j] < -opt_tol:
                    col = j
                    break
        else:
            best = -opt_tol
            for j in range(m + k):
                if t[k, j] < best:
                    best = t[k, j]
                    col = j
        if col < 0:
            break  # optimal

        row = -1
        best_ratio = INF
        for r in range(k):
            d = t[r, col]
            if d > piv_tol:
                ratio = t[r, ncols - 1] / d
                if ratio < best_ratio or (
                    bland and ratio == best_ratio and basis[r] < basis[row]
                ):
                    best_ratio = ratio
                    row = r
        if row < 0:
            status = STATUS_NO_PIVOT
            break
        if pivots >= limit:
            status = STATUS_PIVOT_LIMIT
            break

        prev = t[k, ncols - 1]
        piv = t[row, col]
        for j in range(ncols):
            t[row, j] /= piv
        for r in range(k + 1):
            if r == row:
                continue
            f = t[r, col]
            if f != 0.0:
                for j in range(ncols):
                    t[r, j] -= f * t[row, j]
        basis[row] = col
        pivots += 1

        if not bland:
            if t[k, ncols - 1] <= prev + 1e-15 * (1.0 + (prev if prev >= 0 else -prev)):
                streak += 1
                if streak > DEGENERATE_STREAK:
                    bland = True
            else:
                streak = 0

    x_arr = np.zeros(m)
    y_arr = np.zeros(k)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    if status == STATUS_OK:
        for r in range(k):
            if basis[r] < m and t[r, ncols - 1] > 0.0:
                x[basis[r]] = t[r, ncols - 1]
        for r in range(k):
            if t[k, m + r] > 0.0:
                y[r] = t[k, m + r]
    return status, x_arr, y_arr, pivots
