"""The one-step game operator and its policy specializations.

For a positive function ``h`` on states, the operator replaces each state's
value with the minimax value of a local matrix game whose ``(a, b)`` entry
is ``sum_j exp(theta * c(i,a,b)) * h(j) * P(j|i,a,b)``. Its fixed direction
encodes the game: repeated application grows like ``exp(theta * rho)`` per
step, where ``rho`` is the risk-sensitive average value.

Because iterates grow geometrically, functions are stored in normalized
form (max entry 1) together with an additive log scale; positive
homogeneity of the operator makes the split exact up to rounding, so long
products never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverFailureError
from .matrixgame import _solve_entries
from .model import GameModel

POLICY_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ValueFunction:
    """Positive function on states, represented as ``exp(log_scale) * values``.

    Stored values are kept normalized: strictly positive with maximum in
    ``[0.5, 2]`` (operations renormalize to exactly 1).
    """

    values: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("values must be a nonempty 1-D array")
        if not (arr > 0).all():
            raise ValueError("stored values must be strictly positive")
        mx = float(arr.max())
        if not 0.5 <= mx <= 2.0:
            raise ValueError(
                f"stored values must be normalized (max in [0.5, 2], got {mx}); "
                "use ValueFunction.from_values to normalize"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "log_scale", float(self.log_scale))

    @classmethod
    def ones(cls, n_states: int) -> "ValueFunction":
        return cls(np.ones(n_states), 0.0)

    @classmethod
    def from_values(cls, values, log_scale: float = 0.0) -> "ValueFunction":
        """Normalize an arbitrary positive array into a ValueFunction."""
        arr = np.asarray(values, dtype=np.float64)
        mx = float(arr.max())
        if not mx > 0:
            raise ValueError("values must contain a positive entry")
        return cls(arr / mx, log_scale + math.log(mx))

    def logs(self) -> np.ndarray:
        """Per-state natural log of the represented function."""
        return self.log_scale + np.log(self.values)


@dataclass(frozen=True)
class StationaryPolicy:
    """Per-state probability vector over that state's admissible actions."""

    probs: tuple[np.ndarray, ...]

    def __post_init__(self):
        rows = []
        for i, p in enumerate(self.probs):
            arr = np.array(p, dtype=np.float64)
            s = float(arr.sum())
            if arr.ndim != 1 or (arr < 0).any() or abs(s - 1.0) > POLICY_SUM_TOL:
                raise ValueError(f"state {i}: not a probability vector: {arr}")
            arr /= s
            arr.flags.writeable = False
            rows.append(arr)
        object.__setattr__(self, "probs", tuple(rows))

    @property
    def n_states(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class SelectorPair:
    """A minimax selector: optimal local mixtures for both players."""

    phi: StationaryPolicy
    psi: StationaryPolicy


def check_admissible(model: GameModel, pair: SelectorPair) -> None:
    """Raise ValueError unless the pair matches the model's action sets."""
    for name, pol, sizes in (
        ("phi", pair.phi, [len(a) for a in model.actions_a]),
        ("psi", pair.psi, [len(b) for b in model.actions_b]),
    ):
        if pol.n_states != model.n_states:
            raise ValueError(f"{name} has {pol.n_states} states, model has {model.n_states}")
        for i, p in enumerate(pol.probs):
            if p.size != sizes[i]:
                raise ValueError(
                    f"{name} state {i}: {p.size} action probabilities, expected {sizes[i]}"
                )


class ShapleyOperator:
    """Precomputed kernels of one model for repeated operator application."""

    def __init__(self, model: GameModel):
        self.model = model
        self.n_states = model.n_states
        self._weights = tuple(np.exp(model.theta * c) for c in model.cost)
        for i, w in enumerate(self._weights):
            if not np.isfinite(w).all():
                raise ValueError(f"state {i}: exp(theta * cost) overflows; theta too large")
        self._p = model.transition

    def local_matrix(self, values: np.ndarray, i: int) -> np.ndarray:
        """Local payoff matrix at state ``i`` for stored values ``values``."""
        return self._weights[i] * (self._p[i] @ values)

    def apply_values(
        self, values: np.ndarray
    ) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
        """One raw application on a nonnegative array (no scale handling).

        Returns the new per-state values plus each state's optimal row and
        column mixtures. States are independent given the input.
        """
        out = np.empty(self.n_states)
        mus: list[np.ndarray] = []
        nus: list[np.ndarray] = []
        for i in range(self.n_states):
            try:
                sol = _solve_entries(self.local_matrix(values, i))
            except SolverFailureError as exc:
                raise SolverFailureError(
                    f"matrix-game solve failed at state {i}: {exc}",
                    matrix=exc.matrix,
                    state=i,
                ) from exc
            out[i] = sol.value
            mus.append(sol.row_strategy)
            nus.append(sol.col_strategy)
        return out, mus, nus

    def apply(self, h: ValueFunction) -> tuple[ValueFunction, SelectorPair]:
        """One operator application with renormalization and selectors."""
        out, mus, nus = self.apply_values(h.values)
        pair = SelectorPair(StationaryPolicy(tuple(mus)), StationaryPolicy(tuple(nus)))
        return ValueFunction.from_values(out, h.log_scale), pair

    def apply_policy_values(self, values: np.ndarray, pair: SelectorPair) -> np.ndarray:
        check_admissible(self.model, pair)
        out = np.empty(self.n_states)
        for i in range(self.n_states):
            g = self.local_matrix(values, i)
            out[i] = float(pair.phi.probs[i] @ g @ pair.psi.probs[i])
        return out

    def apply_policy(self, h: ValueFunction, pair: SelectorPair) -> ValueFunction:
        """Apply the operator with both mixtures frozen to ``pair``."""
        return ValueFunction.from_values(self.apply_policy_values(h.values, pair), h.log_scale)


def local_payoff_matrix(model: GameModel, h: ValueFunction, i: int) -> np.ndarray:
    """Entry (a, b) = sum_j exp(theta c(i,a,b)) h(j) P(j|i,a,b), on stored values."""
    return ShapleyOperator(model).local_matrix(h.values, i)


def apply_operator(model: GameModel, h: ValueFunction) -> tuple[ValueFunction, SelectorPair]:
    return ShapleyOperator(model).apply(h)


def apply_operator_pow(model: GameModel, h: ValueFunction, k: int) -> ValueFunction:
    """k successive operator applications (selectors discarded)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    op = ShapleyOperator(model)
    for _ in range(k):
        h = ValueFunction.from_values(op.apply_values(h.values)[0], h.log_scale)
    return h


def apply_policy_operator(model: GameModel, h: ValueFunction, pair: SelectorPair) -> ValueFunction:
    return ShapleyOperator(model).apply_policy(h, pair)
