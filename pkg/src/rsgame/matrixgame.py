"""One-shot matrix games: value and optimal mixed strategies via LP.

Rows are player 1 (minimizer), columns player 2 (maximizer). The solver
reduces the game to the standard primal/dual LP pair

    min w  s.t.  mu' M <= w 1', mu in simplex      (row player)
    max v  s.t.  M nu  >= v 1,  nu in simplex      (column player)

after shifting all entries so the value is positive, and solves it with a
dense tableau simplex (compiled kernel when available, pure-Python twin
otherwise). Pivoting order is fixed, so output is deterministic; Bland's
rule kicks in as an anti-cycling fallback under degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SolverFailureError

MAX_PIVOTS = 10000
STRATEGY_SUM_TOL = 1e-12


@dataclass(frozen=True)
class PayoffMatrix:
    """Validated payoff matrix; ``entries[a, b]`` is paid by rows to columns."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"payoff matrix must be a nonempty 2-D array, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("payoff matrix has non-finite entries")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    duality_gap: float

    def __post_init__(self):
        row = np.array(self.row_strategy, dtype=np.float64)
        col = np.array(self.col_strategy, dtype=np.float64)
        for name, s in (("row", row), ("col", col)):
            if (s < 0).any() or abs(float(s.sum()) - 1.0) > STRATEGY_SUM_TOL:
                raise ValueError(f"{name} strategy is not a probability vector: {s}")
        row.flags.writeable = False
        col.flags.writeable = False
        object.__setattr__(self, "row_strategy", row)
        object.__setattr__(self, "col_strategy", col)
        if self.duality_gap < 0:
            raise ValueError("duality gap must be nonnegative")


def solve_matrix_game(matrix) -> MatrixGameSolution:
    """Solve a matrix game to optimality.

    Accepts a :class:`PayoffMatrix` or anything array-like. The returned
    value is the primal optimum; both strategies carry an LP optimality
    certificate checkable with :func:`best_pure_responses`.
    """
    if isinstance(matrix, PayoffMatrix):
        entries = matrix.entries
    else:
        entries = PayoffMatrix(matrix).entries
    return _solve_entries(entries)


def _solve_entries(entries: np.ndarray) -> MatrixGameSolution:
    """Unchecked core used by the Shapley operator hot loop."""
    m, k = entries.shape
    if m == 1:
        b = int(np.argmax(entries[0]))
        nu = np.zeros(k)
        nu[b] = 1.0
        return MatrixGameSolution(float(entries[0, b]), np.ones(1), nu, 0.0)
    if k == 1:
        a = int(np.argmin(entries[:, 0]))
        mu = np.zeros(m)
        mu[a] = 1.0
        return MatrixGameSolution(float(entries[a, 0]), mu, np.ones(1), 0.0)

    shift = 1.0 - float(entries.min())
    status, x, y, _ = _kernels.solve_positive_game(entries + shift, MAX_PIVOTS)
    if status != _kernels.STATUS_OK:
        reason = "pivot limit exceeded" if status == _kernels.STATUS_PIVOT_LIMIT else "no pivot available"
        raise SolverFailureError(f"matrix-game simplex failed: {reason}", matrix=entries)
    sx = float(x.sum())
    sy = float(y.sum())
    w = 1.0 / sx
    v = 1.0 / sy
    return MatrixGameSolution(
        value=w - shift,
        row_strategy=x / sx,
        col_strategy=y / sy,
        duality_gap=abs(w - v),
    )


def best_pure_responses(matrix, sol: MatrixGameSolution) -> tuple[float, float]:
    """Worst pure-deviation regrets of a solution.

    Returns ``(row_regret, col_regret)`` where ``row_regret`` is the most
    any column earns above ``sol.value`` against ``sol.row_strategy`` and
    ``col_regret`` the most any row pushes below it against
    ``sol.col_strategy``. Both are <= solver tolerance for a correct
    solution.
    """
    entries = matrix.entries if isinstance(matrix, PayoffMatrix) else PayoffMatrix(matrix).entries
    row_payoffs = sol.row_strategy @ entries
    col_payoffs = entries @ sol.col_strategy
    return (
        float(row_payoffs.max() - sol.value),
        float(sol.value - col_payoffs.min()),
    )
