"""Shared game factories and exhaustive test oracles."""

import itertools

import numpy as np
import pytest

from rsgame import GameModel, analyze


def make_game(
    rng,
    n_states,
    max_a=2,
    max_b=2,
    theta=0.3,
    sparsity=0.0,
    cost_lo=0.0,
    cost_hi=1.0,
):
    """Random game; ``sparsity`` is the chance a transition entry is exactly 0."""
    cost, transition, actions_a, actions_b = [], [], [], []
    for i in range(n_states):
        na = int(rng.integers(1, max_a + 1))
        nb = int(rng.integers(1, max_b + 1))
        actions_a.append(tuple(f"a{x}" for x in range(na)))
        actions_b.append(tuple(f"b{x}" for x in range(nb)))
        cost.append(rng.uniform(cost_lo, cost_hi, size=(na, nb)))
        p = np.empty((na, nb, n_states))
        for a in range(na):
            for b in range(nb):
                if sparsity > 0.0:
                    mask = rng.random(n_states) >= sparsity
                    if not mask.any():
                        mask[int(rng.integers(n_states))] = True
                    row = rng.random(n_states) * mask
                    if row.sum() == 0.0:
                        row = mask.astype(float)
                else:
                    row = rng.random(n_states) + 0.05
                p[a, b] = row / row.sum()
        transition.append(p)
    return GameModel(
        theta=theta,
        actions_a=tuple(actions_a),
        actions_b=tuple(actions_b),
        cost=tuple(cost),
        transition=tuple(transition),
    )


def make_dyadic_game(rng, n_states, max_a=2, max_b=2, theta=0.3, sparsity=0.0, denom=64):
    """Random game whose transition rows are exact multiples of 1/denom.

    With dyadic entries the reachability recursion is exact in floating
    point, so the irreducibility coefficient is exactly 0 for reducible
    games (no one-ulp leakage across structural zeros).
    """
    cost, transition, actions_a, actions_b = [], [], [], []
    for i in range(n_states):
        na = int(rng.integers(1, max_a + 1))
        nb = int(rng.integers(1, max_b + 1))
        actions_a.append(tuple(f"a{x}" for x in range(na)))
        actions_b.append(tuple(f"b{x}" for x in range(nb)))
        cost.append(rng.uniform(0.0, 1.0, size=(na, nb)))
        p = np.empty((na, nb, n_states))
        for a in range(na):
            for b in range(nb):
                mask = rng.random(n_states) >= sparsity
                if not mask.any():
                    mask[int(rng.integers(n_states))] = True
                weights = mask / mask.sum()
                counts = rng.multinomial(denom, weights)
                p[a, b] = counts / denom
        transition.append(p)
    return GameModel(
        theta=theta,
        actions_a=tuple(actions_a),
        actions_b=tuple(actions_b),
        cost=tuple(cost),
        transition=tuple(transition),
    )


def make_admissible_game(rng, n_states=3, max_a=2, max_b=2, theta_frac=0.5, **kwargs):
    """Dense random game with theta set strictly inside the admissible range.

    Returns ``(model, report)`` with ``report = analyze(model)``.
    """
    model = make_game(rng, n_states, max_a=max_a, max_b=max_b, theta=1.0, **kwargs)
    report = analyze(model)
    assert report.irreducible and np.isfinite(report.theta_max)
    theta = theta_frac * report.theta_max
    model = GameModel(
        theta=theta,
        actions_a=model.actions_a,
        actions_b=model.actions_b,
        cost=model.cost,
        transition=model.transition,
    )
    return model, analyze(model)


def make_one_player_game(rng, n_states, max_a=3, theta=0.3, cost_hi=1.0):
    """Game where player 2 has a single action everywhere."""
    return make_game(rng, n_states, max_a=max_a, max_b=1, theta=theta, cost_hi=cost_hi)


def single_action_chain(p_matrix, costs, theta):
    """One action per player per state; dynamics given by a plain chain."""
    p_matrix = np.asarray(p_matrix, dtype=float)
    n = p_matrix.shape[0]
    return GameModel(
        theta=theta,
        actions_a=tuple(("a",) for _ in range(n)),
        actions_b=tuple(("b",) for _ in range(n)),
        cost=tuple(np.array([[c]], dtype=float) for c in costs),
        transition=tuple(p_matrix[i].reshape(1, 1, n) for i in range(n)),
    )


def swap_model(theta=1.0, costs=(0.0, 0.0)):
    """Two states that deterministically exchange."""
    return single_action_chain([[0.0, 1.0], [1.0, 0.0]], costs, theta)


def absorbing_model(theta=1.0):
    """State 0 absorbs; state 1 leaks into 0."""
    return single_action_chain([[1.0, 0.0], [0.5, 0.5]], (0.3, 0.7), theta)


def all_deterministic_pairs_irreducible(model):
    """Exhaustive irreducibility check over deterministic stationary pairs.

    For every pure policy pair, builds the support graph of the induced
    chain and tests strong connectivity by boolean closure.
    """
    n = model.n_states
    a_choices = [range(len(model.actions_a[i])) for i in range(n)]
    b_choices = [range(len(model.actions_b[i])) for i in range(n)]
    for f in itertools.product(*a_choices):
        for g in itertools.product(*b_choices):
            adj = np.zeros((n, n), dtype=bool)
            for i in range(n):
                adj[i] = model.transition[i][f[i], g[i]] > 0.0
            reach = np.eye(n, dtype=bool)
            for _ in range(n):
                reach = reach | (reach @ adj)
            if not reach.all():
                return False
    return True


@pytest.fixture(scope="session")
def smartgrid_model():
    from rsgame import SmartGridParams, build_smartgrid

    return build_smartgrid(SmartGridParams())
