"""Doubling iteration: traces, stopping rule, brackets, shift handling."""

import math

import numpy as np
import pytest

from rsgame import (
    GameModel,
    NonConvergenceError,
    PreconditionError,
    StationaryPolicy,
    approximate_value,
    sandwich_certificate,
    stationary_value,
    twisted_kernel,
    spectral_radius,
)

from conftest import absorbing_model, make_admissible_game, make_game, single_action_chain


class TestTrivialGames:
    def test_one_state_constant_cost(self):
        model = single_action_chain([[1.0]], [2.5], theta=0.7)
        res = approximate_value(model, eps=1e-6)
        assert res.converged
        assert res.n_outer == 1
        assert res.rho_tilde == pytest.approx(2.5, abs=1e-12)
        assert res.lambda_trace == pytest.approx((2.5, 2.5), abs=1e-12)
        assert res.zeta_trace == pytest.approx((2.5, 2.5), abs=1e-12)

    def test_huge_eps_still_runs_one_outer_step(self):
        model = single_action_chain([[0.2, 0.8], [0.6, 0.4]], [0.5, 1.5], theta=0.5)
        res = approximate_value(model, eps=100.0)
        assert res.n_outer == 1
        assert len(res.lambda_trace) == 2  # checkpoints 0 and 1

    def test_two_state_chain_matches_spectral_radius(self):
        model = single_action_chain([[0.3, 0.7], [0.6, 0.4]], [0.5, 1.5], theta=0.5)
        eps = 1e-4
        res = approximate_value(model, eps=eps)
        forced = StationaryPolicy((np.array([1.0]), np.array([1.0])))
        oracle = math.log(spectral_radius(twisted_kernel(model, forced, forced))) / 0.5
        assert abs(res.rho_tilde - oracle) <= eps + 1e-9
        lower, upper = sandwich_certificate(res)
        assert lower - 1e-12 <= oracle <= upper + 1e-12


class TestTracesAndBrackets:
    def test_monotone_and_sandwiched(self):
        rng = np.random.default_rng(0)
        for _ in range(15):
            model, _ = make_admissible_game(rng, n_states=3, max_a=2, max_b=2)
            res = approximate_value(model, eps=0.02)
            lam, zet = res.lambda_trace, res.zeta_trace
            assert all(lam[i + 1] <= lam[i] + 1e-12 for i in range(len(lam) - 1))
            assert all(zet[i + 1] >= zet[i] - 1e-12 for i in range(len(zet) - 1))
            assert all(z <= l + 1e-12 for z in zet for l in lam)
            assert lam[-1] - zet[-1] <= 0.02
            assert res.rho_tilde == lam[-1]

    def test_certificate_contains_tight_rerun(self):
        rng = np.random.default_rng(1)
        model, _ = make_admissible_game(rng, n_states=3)
        rough = sandwich_certificate(approximate_value(model, eps=0.05))
        tight = sandwich_certificate(approximate_value(model, eps=1e-4))
        assert rough[0] - 1e-12 <= tight[0] and tight[1] <= rough[1] + 1e-12
        assert rough[1] - rough[0] <= 0.05
        assert tight[1] - tight[0] <= 1e-4


class TestShiftConsistency:
    def test_cost_shift_moves_value_exactly(self):
        rng = np.random.default_rng(2)
        model, _ = make_admissible_game(rng, n_states=3)
        for k in (1.7, -0.6):
            shifted = GameModel(
                theta=model.theta,
                actions_a=model.actions_a,
                actions_b=model.actions_b,
                cost=tuple(c + k for c in model.cost),
                transition=model.transition,
            )
            r0 = approximate_value(model, eps=1e-3)
            r1 = approximate_value(shifted, eps=1e-3)
            assert r1.rho_tilde - r0.rho_tilde == pytest.approx(k, abs=1e-9)


class TestErrors:
    def test_reducible_model_refused(self):
        with pytest.raises(PreconditionError, match="reducible"):
            approximate_value(absorbing_model(), eps=0.1)

    def test_bad_eps(self):
        model = single_action_chain([[1.0]], [1.0], theta=1.0)
        with pytest.raises(ValueError):
            approximate_value(model, eps=0.0)

    def test_outer_cap_raises_with_trace(self):
        rng = np.random.default_rng(3)
        model, _ = make_admissible_game(rng, n_states=3)
        with pytest.raises(NonConvergenceError) as err:
            approximate_value(model, eps=1e-9, max_outer=2)
        partial = err.value.result
        assert not partial.converged
        assert partial.n_outer == 2
        assert len(partial.lambda_trace) == 3

    def test_application_budget(self):
        rng = np.random.default_rng(4)
        model, _ = make_admissible_game(rng, n_states=3)
        with pytest.raises(NonConvergenceError) as err:
            approximate_value(model, eps=1e-9, max_applications=5)
        assert not err.value.result.converged

    def test_certificate_requires_convergence(self):
        rng = np.random.default_rng(5)
        model, _ = make_admissible_game(rng, n_states=3)
        try:
            approximate_value(model, eps=1e-9, max_outer=1)
        except NonConvergenceError as err:
            with pytest.raises(ValueError, match="converged"):
                sandwich_certificate(err.result)
        else:  # pragma: no cover - eps is unreachably small in one step
            pytest.fail("expected non-convergence")


class TestOnePlayerOracle:
    def test_bracket_contains_enumerated_optimum(self):
        # player 2 frozen: min over deterministic stationary player-1 policies
        # of the twisted-kernel spectral radius equals the value
        rng = np.random.default_rng(6)
        import itertools

        for _ in range(15):
            model = make_game(rng, 3, max_a=3, max_b=1, theta=0.4)
            eps = 0.01
            res = approximate_value(model, eps=eps)
            lower, upper = sandwich_certificate(res)
            psi = StationaryPolicy(tuple(np.array([1.0]) for _ in range(3)))
            best = math.inf
            for f in itertools.product(*[range(len(a)) for a in model.actions_a]):
                phi = StationaryPolicy(
                    tuple(np.eye(len(model.actions_a[i]))[f[i]] for i in range(3))
                )
                best = min(best, stationary_value(model, phi, psi))
            assert upper - lower <= eps
            assert lower - 1e-9 <= best <= upper + 1e-9
