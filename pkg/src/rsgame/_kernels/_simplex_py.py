"""Pure-Python dense-tableau simplex kernel for positive matrix games.

This is the fallback backend; ``_simplex_c.pyx`` is the compiled twin. Both
apply the same pivoting rules in the same order so their outputs agree.

The LP solved is the classical reduction of a matrix game with strictly
positive payoff matrix ``a`` (rows minimize, columns maximize):

    maximize sum(x)   subject to   a.T @ x <= 1,   x >= 0.

Starting from the slack basis this is immediately feasible, and boundedness
follows from positivity of ``a``. At the optimum ``1 / sum(x)`` is the game
value, ``x / sum(x)`` the optimal row mixture, and the constraint duals
(read off the slack reduced costs) normalize to the column mixture.

Pivoting: Dantzig's rule (most negative reduced cost, lowest index on ties;
leaving row by minimum ratio, lowest row on ties), switching permanently to
Bland's rule after a run of degenerate pivots.
"""

import numpy as np

STATUS_OK = 0
STATUS_PIVOT_LIMIT = 1
STATUS_NO_PIVOT = 2

_DEGENERATE_STREAK = 32

name = "python"


def solve_positive_game(a, max_pivots=10000):
    """Solve the matrix-game LP for a strictly positive (m, k) payoff matrix.

    Returns ``(status, x, y, pivots)`` with the unnormalized primal weights
    ``x`` (length m, row player) and dual weights ``y`` (length k, column
    player). ``sum(x) == sum(y) == 1 / value`` up to rounding.
    """
    a = np.asarray(a, dtype=np.float64)
    m, k = a.shape
    t = np.zeros((k + 1, m + k + 1))
    t[:k, :m] = a.T
    t[:k, m:m + k] = np.eye(k)
    t[:k, -1] = 1.0
    t[k, :m] = -1.0
    basis = list(range(m, m + k))

    scale = 1.0 + float(a.max())
    opt_tol = 1e-11 * scale
    piv_tol = 1e-12 * scale

    bland = False
    streak = 0
    pivots = 0
    while True:
        obj = t[k]
        col = -1
        if bland:
            for j in range(m + k):
                if obj[j] < -opt_tol:
                    col = j
                    break
        else:
            best = -opt_tol
            for j in range(m + k):
                if obj[j] < best:
                    best = obj[j]
                    col = j
        if col < 0:
            break  # optimal

        row = -1
        best_ratio = np.inf
        for r in range(k):
            d = t[r, col]
            if d > piv_tol:
                ratio = t[r, -1] / d
                if ratio < best_ratio or (
                    bland and ratio == best_ratio and basis[r] < basis[row]
                ):
                    best_ratio = ratio
                    row = r
        if row < 0:
            return STATUS_NO_PIVOT, np.zeros(m), np.zeros(k), pivots
        if pivots >= max_pivots:
            return STATUS_PIVOT_LIMIT, np.zeros(m), np.zeros(k), pivots

        prev = t[k, -1]
        t[row] /= t[row, col]
        factors = t[:, col].copy()
        factors[row] = 0.0
        t -= np.outer(factors, t[row])
        basis[row] = col
        pivots += 1

        if not bland:
            if t[k, -1] <= prev + 1e-15 * (1.0 + abs(prev)):
                streak += 1
                if streak > _DEGENERATE_STREAK:
                    bland = True
            else:
                streak = 0

    x = np.zeros(m)
    for r in range(k):
        if basis[r] < m:
            x[basis[r]] = t[r, -1]
    np.maximum(x, 0.0, out=x)
    y = np.maximum(t[k, m:m + k], 0.0)
    return STATUS_OK, x, y, pivots
