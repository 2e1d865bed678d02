"""Independent oracles for checking solver output.

None of these reuse the solver's fixed-point path. A stationary policy
pair is scored through the spectral radius of its exponentially twisted
kernel (power iteration); best responses against a frozen opponent are
bracketed by running the doubling iteration on the induced one-player
game; and the two together certify the eps-saddle property: neither
player can gain more than eps by deviating. A seeded Monte Carlo
estimator of the exponential average is included as a diagnostic only —
log-moment estimates by naive sampling carry heavy relative error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverFailureError
from .model import GameModel
from .shapley import SelectorPair, StationaryPolicy, check_admissible
from .value_iteration import DEFAULT_MAX_OUTER, approximate_value, sandwich_certificate

POWER_MAX_ITER = 10**6
POWER_RTOL = 1e-12
_OSCILLATION_CHECK_FROM = 64

PLAYER1 = "player1"
PLAYER2 = "player2"


@dataclass(frozen=True)
class TwistedKernel:
    """Nonnegative matrix scoring a stationary pair.

    ``entries[i, j] = sum_{a,b} exp(theta c(i,a,b)) P(j|i,a,b)
    phi(a|i) psi(b|i)``; its spectral radius, on a log scale, is the pair's
    long-run exponential average payoff.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("twisted kernel must be square")
        if (arr < 0).any() or not np.isfinite(arr).all():
            raise ValueError("twisted kernel entries must be finite and nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)


@dataclass(frozen=True)
class SaddleCertificate:
    """Outcome of an eps-saddle check.

    ``rho_bracket`` encloses the game value; ``best_response_vs_phi``
    encloses the most player 2 can extract against ``phi`` and
    ``best_response_vs_psi`` the least player 1 can concede against
    ``psi``. The slacks compare the unfavorable bracket ends, so
    ``certified_eps`` overstates the true saddle slack by at most
    ``tolerance`` (the aggregated bracket widths) and the check
    ``certified_eps <= eps + tolerance`` never rejects a true eps-saddle.
    """

    rho_bracket: tuple[float, float]
    best_response_vs_psi: tuple[float, float]
    best_response_vs_phi: tuple[float, float]
    slack_player1: float
    slack_player2: float
    certified_eps: float
    eps: float
    tolerance: float
    passed: bool


def twisted_kernel(model: GameModel, phi: StationaryPolicy, psi: StationaryPolicy) -> TwistedKernel:
    """Twisted one-step kernel of a stationary pair, on original costs."""
    check_admissible(model, SelectorPair(phi, psi))
    n = model.n_states
    q = np.empty((n, n))
    for i in range(n):
        weights = np.outer(phi.probs[i], psi.probs[i]) * np.exp(model.theta * model.cost[i])
        q[i] = np.einsum("ab,abj->j", weights, model.transition[i])
    return TwistedKernel(q)


def spectral_radius(matrix, rtol: float = POWER_RTOL, max_iter: int = POWER_MAX_ITER) -> float:
    """Perron root of a nonnegative matrix by normalized power iteration.

    Stops when successive eigenvalue estimates agree to ``rtol``
    (relative). Periodic matrices make the plain iteration oscillate; on
    detection (or at the iteration cap) the iteration is rerun on the
    aperiodic shift ``Q + I``, whose root exceeds the target by exactly 1.
    """
    q = matrix.entries if isinstance(matrix, TwistedKernel) else np.asarray(matrix, dtype=np.float64)
    lam = _power_iteration(q, rtol, max_iter)
    if lam is not None:
        return lam
    lam = _power_iteration(q + np.eye(q.shape[0]), rtol, max_iter)
    if lam is not None:
        return lam - 1.0
    raise SolverFailureError("power iteration failed to converge, even on the shifted matrix")


def _power_iteration(q: np.ndarray, rtol: float, max_iter: int) -> float | None:
    x = np.ones(q.shape[0])
    lam_prev = math.inf
    lam_prev2 = math.inf
    for it in range(max_iter):
        y = q @ x
        lam = float(y.max())
        if lam <= 0.0:
            return 0.0  # no mass returns: nilpotent direction
        if abs(lam - lam_prev) <= rtol * lam:
            return lam
        if (
            it >= _OSCILLATION_CHECK_FROM
            and abs(lam - lam_prev2) <= 1e-14 * lam
            and abs(lam - lam_prev) > 1e-8 * lam
        ):
            return None  # stable period-2 oscillation
        lam_prev2 = lam_prev
        lam_prev = lam
        x = y / lam
    return None


def stationary_value(model: GameModel, phi: StationaryPolicy, psi: StationaryPolicy) -> float:
    """Long-run exponential average payoff of a stationary pair.

    Equals ``theta^-1 ln`` of the twisted-kernel spectral radius; assumes
    the model is irreducible so the limit is state-independent.
    """
    rho = spectral_radius(twisted_kernel(model, phi, psi))
    return math.log(rho) / model.theta


def induced_one_player_game(model: GameModel, side: str, fixed: StationaryPolicy) -> GameModel:
    """Freeze one player's stationary policy into the model.

    The frozen player's mixture is folded into the exponentially twisted
    kernel ``W(j|i, u) = sum_v fixed(v|i) exp(theta c) P``, which is then
    re-expressed as a one-player game via ``exp(theta c~) = sum_j W`` and
    ``P~ = W / sum_j W``; the free player's optimization is unchanged.
    ``side`` names the player left free.
    """
    n = model.n_states
    theta = model.theta
    cost, transition, actions_a, actions_b = [], [], [], []
    for i in range(n):
        ew = np.exp(theta * model.cost[i])
        if side == PLAYER1:
            if fixed.probs[i].size != len(model.actions_b[i]):
                raise ValueError(f"fixed policy does not match player-2 actions at state {i}")
            w = np.einsum("b,ab,abj->aj", fixed.probs[i], ew, model.transition[i])
            s = w.sum(axis=1)
            cost.append((np.log(s) / theta)[:, None])
            transition.append((w / s[:, None])[:, None, :])
            actions_a.append(model.actions_a[i])
            actions_b.append(("fixed",))
        elif side == PLAYER2:
            if fixed.probs[i].size != len(model.actions_a[i]):
                raise ValueError(f"fixed policy does not match player-1 actions at state {i}")
            w = np.einsum("a,ab,abj->bj", fixed.probs[i], ew, model.transition[i])
            s = w.sum(axis=1)
            cost.append((np.log(s) / theta)[None, :])
            transition.append((w / s[:, None])[None, :, :])
            actions_a.append(("fixed",))
            actions_b.append(model.actions_b[i])
        else:
            raise ValueError(f"side must be {PLAYER1!r} or {PLAYER2!r}, got {side!r}")
    return GameModel(
        theta=theta,
        actions_a=tuple(actions_a),
        actions_b=tuple(actions_b),
        cost=tuple(cost),
        transition=tuple(transition),
    )


def best_response(
    model: GameModel,
    side: str,
    fixed: StationaryPolicy,
    eps: float,
    max_outer: int = DEFAULT_MAX_OUTER,
) -> tuple[float, float]:
    """Bracket the free player's best achievable long-run payoff.

    ``side = "player1"`` brackets ``inf`` over all player-1 policies
    against the frozen ``psi = fixed``; ``side = "player2"`` brackets
    ``sup`` over player-2 policies against ``phi = fixed``. The bracket
    covers history-dependent deviations and has width at most ``eps``.
    """
    induced = induced_one_player_game(model, side, fixed)
    result = approximate_value(induced, eps, max_outer=max_outer)
    return sandwich_certificate(result)


def verify_saddle(
    model: GameModel,
    phi: StationaryPolicy,
    psi: StationaryPolicy,
    eps: float,
    max_outer: int = DEFAULT_MAX_OUTER,
) -> SaddleCertificate:
    """Certify that ``(phi, psi)`` is an eps-saddle point.

    All three brackets (game value, best response against each policy)
    are computed to accuracy ``eps / 10``; the pass test allows the
    aggregated bracket widths on top of ``eps`` so a true eps-saddle is
    never rejected, while any pair whose one-sided regret exceeds
    ``eps + tolerance`` is.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    acc = eps / 10.0
    rho_bracket = sandwich_certificate(approximate_value(model, acc, max_outer=max_outer))
    vs_phi = best_response(model, PLAYER2, phi, acc, max_outer=max_outer)
    vs_psi = best_response(model, PLAYER1, psi, acc, max_outer=max_outer)

    slack_player1 = vs_phi[1] - rho_bracket[0]
    slack_player2 = rho_bracket[1] - vs_psi[0]
    certified = max(slack_player1, slack_player2)
    w_rho = rho_bracket[1] - rho_bracket[0]
    tolerance = max(w_rho + (vs_phi[1] - vs_phi[0]), w_rho + (vs_psi[1] - vs_psi[0]))
    return SaddleCertificate(
        rho_bracket=rho_bracket,
        best_response_vs_psi=vs_psi,
        best_response_vs_phi=vs_phi,
        slack_player1=slack_player1,
        slack_player2=slack_player2,
        certified_eps=certified,
        eps=eps,
        tolerance=tolerance,
        passed=certified <= eps + tolerance,
    )


def simulate_cost(
    model: GameModel,
    phi: StationaryPolicy,
    psi: StationaryPolicy,
    start: int,
    horizon: int,
    trials: int,
    seed: int,
) -> float:
    """Monte Carlo estimate of the finite-horizon exponential average.

    Simulates ``trials`` independent trajectories under the pair and
    returns ``(theta * horizon)^-1 ln(mean_t exp(theta * S_t))`` with a
    log-sum-exp accumulator. Each trial draws from its own generator
    spawned from ``seed``, and the reduction runs in trial order, so the
    result depends only on ``(seed, trials, horizon)``. Diagnostic: the
    estimator's relative error grows with ``theta * horizon``.
    """
    if horizon < 1 or trials < 1:
        raise ValueError("horizon and trials must be >= 1")
    n = model.n_states
    if not 0 <= start < n:
        raise ValueError(f"start state {start} out of range")
    check_admissible(model, SelectorPair(phi, psi))

    max_a = max(len(a) for a in model.actions_a)
    max_b = max(len(b) for b in model.actions_b)
    cum_a = np.ones((n, max_a))
    cum_b = np.ones((n, max_b))
    cost_pad = np.zeros((n, max_a, max_b))
    cum_next = np.ones((n, max_a, max_b, n))
    for i in range(n):
        na, nb = len(model.actions_a[i]), len(model.actions_b[i])
        cum_a[i, :na] = np.cumsum(phi.probs[i])
        cum_b[i, :nb] = np.cumsum(psi.probs[i])
        cost_pad[i, :na, :nb] = model.cost[i]
        cum_next[i, :na, :nb] = np.cumsum(model.transition[i], axis=-1)
    size_a = np.array([len(a) - 1 for a in model.actions_a])
    size_b = np.array([len(b) - 1 for b in model.actions_b])

    children = np.random.SeedSequence(seed).spawn(trials)
    chunk = max(1, min(trials, 2_000_000 // (3 * horizon)))
    log_weights = np.empty(trials)
    theta = model.theta
    for lo in range(0, trials, chunk):
        hi = min(lo + chunk, trials)
        draws = np.stack(
            [np.random.default_rng(ss).random((horizon, 3)) for ss in children[lo:hi]]
        )
        states = np.full(hi - lo, start)
        total = np.zeros(hi - lo)
        for t in range(horizon):
            a = np.minimum(
                (draws[:, t, 0, None] > cum_a[states]).sum(axis=1), size_a[states]
            )
            b = np.minimum(
                (draws[:, t, 1, None] > cum_b[states]).sum(axis=1), size_b[states]
            )
            total += cost_pad[states, a, b]
            states = np.minimum(
                (draws[:, t, 2, None] > cum_next[states, a, b]).sum(axis=1), n - 1
            )
        log_weights[lo:hi] = theta * total

    peak = float(log_weights.max())
    mean_exp = peak + math.log(float(np.exp(log_weights - peak).sum()) / trials)
    return mean_exp / (theta * horizon)
