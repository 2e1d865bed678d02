"""Irreducibility analysis of the controlled chain.

The key quantity is a computable coefficient: the worst case, over start
state, target state, and both players' policies, of the probability of
reaching the target within ``n_states`` steps. It is obtained from a
max-over-actions recursion on the chain killed at the target,

    V_0 = 1,    V_{k+1}(i) = max_{a,b} sum_{j != target} P(j|i,a,b) V_k(j),

as ``gamma = 1 - max V_{n_states}``. The coefficient is positive exactly
when every deterministic stationary policy pair induces an irreducible
chain, which is the regime where the solver's guarantees hold. The same
table picks the anchor state and the coefficient ``eta`` used by the
saddle-point construction, and bounds the admissible risk parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GameModel

BRUTEFORCE_MAX_STATES = 4
BRUTEFORCE_MAX_ACTIONS = 3


@dataclass(frozen=True)
class IrreducibilityReport:
    """Everything derived from the V-recursion table.

    ``v_table[j, i]`` is the worst-case probability of avoiding target
    ``j`` for ``n_states`` steps from state ``i``. ``theta_max`` is
    ``-ln(1 - eta) / (n_states * m_c)``, infinite when ``eta == 1`` or the
    payoff table is constant.
    """

    gamma: float
    eta: float
    i_star: int
    v_table: np.ndarray
    m_c: float
    theta_max: float
    irreducible: bool

    def __post_init__(self):
        vt = np.array(self.v_table, dtype=np.float64)
        vt.flags.writeable = False
        object.__setattr__(self, "v_table", vt)


def v_recursion(model: GameModel, j: int, k: int) -> np.ndarray:
    """k steps of the killed-chain recursion toward target ``j``."""
    n = model.n_states
    if not 0 <= j < n:
        raise ValueError(f"target state {j} out of range")
    if k < 0:
        raise ValueError("k must be >= 0")
    v = np.ones(n)
    for _ in range(k):
        masked = v.copy()
        masked[j] = 0.0
        v = np.array([float((model.transition[i] @ masked).max()) for i in range(n)])
    return v


def analyze(model: GameModel) -> IrreducibilityReport:
    """Compute the worst-case reachability table and derived constants."""
    n = model.n_states
    v_table = np.array([v_recursion(model, j, n) for j in range(n)])
    gamma = 1.0 - float(v_table.max())
    max_per_target = v_table.max(axis=1)
    i_star = int(np.argmin(max_per_target))  # lowest index on ties
    eta = 1.0 - float(max_per_target[i_star])
    m_c = model.cost_span()
    if m_c == 0.0 or eta >= 1.0:
        theta_max = math.inf
    else:
        theta_max = -math.log1p(-eta) / (n * m_c)
    return IrreducibilityReport(
        gamma=gamma,
        eta=eta,
        i_star=i_star,
        v_table=v_table,
        m_c=m_c,
        theta_max=theta_max,
        irreducible=gamma > 0.0,
    )


def gamma_bruteforce(model: GameModel) -> float:
    """Worst-case return probability by exhaustive policy-tree evaluation.

    Evaluates, for every (start, target) pair, the supremum over all
    deterministic history-dependent policy pairs of the probability of
    avoiding the target for ``n_states`` steps, by direct recursion over
    the decision tree (no state merging). Deterministic choices suffice
    because the survival probability is multilinear in the per-history
    action distributions. This is the definitional quantity that
    :func:`analyze` computes by dynamic programming, so it serves as an
    independent oracle for ``gamma``.

    Guarded to tiny models; the tree has roughly
    ``(|A| * |B| * n)^n`` nodes per (start, target) pair.
    """
    n = model.n_states
    if n > BRUTEFORCE_MAX_STATES:
        raise ValueError(f"brute force limited to {BRUTEFORCE_MAX_STATES} states, got {n}")
    for i in range(n):
        if (
            len(model.actions_a[i]) > BRUTEFORCE_MAX_ACTIONS
            or len(model.actions_b[i]) > BRUTEFORCE_MAX_ACTIONS
        ):
            raise ValueError(
                f"brute force limited to {BRUTEFORCE_MAX_ACTIONS} actions per player per state"
            )

    # plain nested lists: scalar indexing dominates the tree walk
    rows: list[list[list[float]]] = [
        [list(map(float, model.transition[i][a, b])) for a in range(model.transition[i].shape[0])
         for b in range(model.transition[i].shape[1])]
        for i in range(n)
    ]

    def survive(s: int, target: int, depth: int) -> float:
        if depth == 0:
            return 1.0
        best = 0.0
        for row in rows[s]:
            acc = 0.0
            for s2 in range(n):
                if s2 != target:
                    p = row[s2]
                    if p > 0.0:
                        acc += p * survive(s2, target, depth - 1)
            if acc > best:
                best = acc
        return best

    worst = 0.0
    for target in range(n):
        for start in range(n):
            worst = max(worst, survive(start, target, n))
    return 1.0 - worst
