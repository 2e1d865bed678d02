"""Approximate saddle points via an anchored fixed-point iteration.

Given an accuracy ``eps``, the construction (i) picks the anchor state
with the best worst-case reachability and its coefficient ``eta``, (ii)
derives an iteration count ``n_eps = k_eps * n_states`` from ``eta``, the
risk parameter, and the payoff spread, (iii) obtains the value to accuracy
``eps / (2 * n_eps)``, and (iv) iterates

    U_0 = indicator(anchor),
    U_{m+1} = 1 at the anchor, else exp(-theta * rho) * (operator U_m),

for ``n_eps`` steps. The final iterate brackets the operator's eigenvector
tightly enough that its minimax selector is an ``eps``-saddle point. The
construction requires ``theta`` below ``-ln(1 - eta) / (n_states * m_c)``;
outside that interval no guarantee exists, so the solver refuses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .irreducibility import analyze
from .model import GameModel, shift_costs
from .shapley import SelectorPair, ShapleyOperator, StationaryPolicy
from .value_iteration import DEFAULT_MAX_OUTER, approximate_value


@dataclass(frozen=True)
class ThetaAdmissibility:
    theta: float
    theta_max: float
    admissible: bool


@dataclass(frozen=True)
class SaddleResult:
    """An eps-saddle pair plus the constants that produced it.

    ``rho_eps`` is the inner value approximation (original cost scale),
    ``u_final`` the last anchored iterate (exactly 1 at ``i_star``), and
    ``constant_cost`` flags the degenerate short circuit where every
    policy pair is a saddle point.
    """

    rho_eps: float
    phi_eps: StationaryPolicy
    psi_eps: StationaryPolicy
    i_star: int
    eta: float
    k_eps: int
    n_eps: int
    u_final: np.ndarray
    eps: float
    constant_cost: bool = False

    def __post_init__(self):
        u = np.array(self.u_final, dtype=np.float64)
        u.flags.writeable = False
        object.__setattr__(self, "u_final", u)

    @property
    def pair(self) -> SelectorPair:
        return SelectorPair(self.phi_eps, self.psi_eps)


def theta_admissibility(theta: float, theta_max: float) -> ThetaAdmissibility:
    return ThetaAdmissibility(theta, theta_max, 0.0 < theta < theta_max)


def _least_int_above(x: float) -> int:
    """Smallest integer k >= 1 with k strictly greater than x."""
    return max(1, math.floor(x) + 1)


def compute_k_eps(eta: float, theta: float, e_size: int, m_c: float, eps: float) -> int:
    """Block count of the anchored iteration for target accuracy ``eps``.

    With ``t = theta * e_size * m_c``, returns the least integer ``k >= 1``
    strictly greater than

        [ln eta + ln(1 - (1-eta) e^t) + ln(e^{theta eps / 2} - 1) - 2t]
        / [t + ln(1 - eta)],

    or 1 when ``eta == 1``. Requires ``theta`` strictly inside the
    admissible interval so the denominator is negative.
    """
    if not 0 < eta <= 1:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if not eps > 0:
        raise ValueError("eps must be > 0")
    if not theta > 0:
        raise ValueError("theta must be > 0")
    if eta == 1.0:
        return 1
    t = theta * e_size * m_c
    denom = t + math.log1p(-eta)
    if not denom < 0:
        theta_max = -math.log1p(-eta) / (e_size * m_c)
        raise PreconditionError(
            f"theta = {theta} is outside the admissible interval (0, {theta_max}); "
            "the saddle-point construction gives no guarantee there",
            detail=theta_admissibility(theta, theta_max),
        )
    numer = (
        math.log(eta)
        + math.log1p(-(1.0 - eta) * math.exp(t))
        + math.log(math.expm1(theta * eps / 2.0))
        - 2.0 * t
    )
    return _least_int_above(numer / denom)


def u_iteration(model: GameModel, rho_eps: float, i_star: int, n_steps: int) -> np.ndarray:
    """Run the anchored iteration for ``n_steps`` steps.

    ``model`` must already have nonnegative costs and ``rho_eps`` be
    expressed on the same (shifted) scale.
    """
    if not math.isfinite(rho_eps):
        raise ValueError("rho_eps must be finite")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    n = model.n_states
    if not 0 <= i_star < n:
        raise ValueError(f"i_star {i_star} out of range")
    op = ShapleyOperator(model)
    damp = math.exp(-model.theta * rho_eps)
    u = np.zeros(n)
    u[i_star] = 1.0
    for _ in range(n_steps):
        out, _, _ = op.apply_values(u)
        u = damp * out
        u[i_star] = 1.0
    return u


def compute_saddle(
    model: GameModel, eps: float, max_outer: int = DEFAULT_MAX_OUTER
) -> SaddleResult:
    """Compute an ``eps``-saddle point of an irreducible admissible game."""
    if not eps > 0:
        raise ValueError("eps must be > 0")
    report = analyze(model)
    if not report.irreducible:
        raise PreconditionError(
            "model is reducible; saddle-point construction needs irreducibility",
            detail=report,
        )
    n = model.n_states

    if report.m_c == 0.0:
        # constant payoff: every policy pair is a saddle point
        op = ShapleyOperator(model)
        _, mus, nus = op.apply_values(np.ones(n))
        return SaddleResult(
            rho_eps=float(model.cost[0].flat[0]),
            phi_eps=StationaryPolicy(tuple(mus)),
            psi_eps=StationaryPolicy(tuple(nus)),
            i_star=report.i_star,
            eta=report.eta,
            k_eps=1,
            n_eps=n,
            u_final=np.ones(n),
            eps=eps,
            constant_cost=True,
        )

    if not 0.0 < model.theta < report.theta_max:
        raise PreconditionError(
            f"theta = {model.theta} is outside the admissible interval "
            f"(0, {report.theta_max}); no eps-saddle guarantee applies",
            detail=theta_admissibility(model.theta, report.theta_max),
        )

    k_eps = compute_k_eps(report.eta, model.theta, n, report.m_c, eps)
    n_eps = k_eps * n

    value = approximate_value(model, eps / (2.0 * n_eps), max_outer=max_outer)
    shifted, cost_shift = shift_costs(model)
    rho_shifted = value.rho_tilde + cost_shift.shift

    u = u_iteration(shifted, rho_shifted, report.i_star, n_eps)
    _, mus, nus = ShapleyOperator(shifted).apply_values(u)

    return SaddleResult(
        rho_eps=value.rho_tilde,
        phi_eps=StationaryPolicy(tuple(mus)),
        psi_eps=StationaryPolicy(tuple(nus)),
        i_star=report.i_star,
        eta=report.eta,
        k_eps=k_eps,
        n_eps=n_eps,
        u_final=u,
        eps=eps,
    )
