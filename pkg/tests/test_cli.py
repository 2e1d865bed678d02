"""Command-line interface: exit codes, human output, machine reports."""

import json

import numpy as np
import pytest

from rsgame import GameModel, save, load
from rsgame.cli import RunReport, main

from conftest import make_admissible_game, single_action_chain


@pytest.fixture(scope="module")
def grid_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "grid.json"
    assert main(["example", "smartgrid", "--out", str(path)]) == 0
    return str(path)


@pytest.fixture()
def tiny_file(tmp_path):
    model = single_action_chain([[0.3, 0.7], [0.6, 0.4]], [0.5, 1.5], theta=0.5)
    path = tmp_path / "tiny.json"
    save(model, path)
    return str(path)


@pytest.fixture()
def small_game_file(tmp_path):
    model, _ = make_admissible_game(np.random.default_rng(0), n_states=2, max_a=2, max_b=2)
    path = tmp_path / "small.json"
    save(model, path)
    return str(path)


class TestValidate:
    def test_valid_file(self, grid_file):
        assert main(["validate", grid_file]) == 0

    def test_broken_stochasticity(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        doc = {
            "n_states": 1,
            "theta": 1.0,
            "states": [
                {"actions_a": ["a"], "actions_b": ["b"], "cost": [[0.0]], "transition": [[[0.5]]]}
            ],
        }
        path.write_text(json.dumps(doc))
        assert main(["validate", str(path)]) == 2
        assert "stochasticity" in capsys.readouterr().out

    def test_missing_file(self):
        assert main(["validate", "/nonexistent/game.json"]) == 1

    def test_schema_error(self, tmp_path):
        path = tmp_path / "schema.json"
        path.write_text(json.dumps({"n_states": 1, "states": []}))
        assert main(["validate", str(path)]) == 2


class TestIrreducibility:
    def test_smartgrid_constants(self, grid_file, capsys):
        assert main(["irreducibility", grid_file, "--machine"]) == 0
        doc = json.loads(capsys.readouterr().out)
        out = doc["outputs"]
        assert out["eta"] == pytest.approx(0.6694, abs=5e-5)
        assert out["i_star"] == 2
        assert out["theta_max"] == pytest.approx(0.1322, abs=2e-4)
        assert out["irreducible"] is True
        assert main(["irreducibility", grid_file]) == 0
        assert "irreducible" in capsys.readouterr().out

    def test_reducible_verdict(self, tmp_path, capsys):
        model = single_action_chain([[1.0, 0.0], [0.5, 0.5]], [0.0, 1.0], 1.0)
        path = tmp_path / "red.json"
        save(model, path)
        assert main(["irreducibility", str(path)]) == 0
        assert "reducible" in capsys.readouterr().out


class TestValue:
    def test_two_state_chain(self, tiny_file, capsys):
        assert main(["value", tiny_file, "--eps", "1e-4"]) == 0
        assert "rho_tilde" in capsys.readouterr().out

    def test_machine_report_round_trips(self, tiny_file, capsys):
        assert main(["value", tiny_file, "--eps", "1e-4", "--machine"]) == 0
        raw = capsys.readouterr().out
        doc = json.loads(raw)
        report = RunReport.from_dict(doc)
        assert json.dumps(report.to_dict()) == json.dumps(doc)
        assert report.command == "value"
        assert report.outputs["converged"] is True
        assert report.outputs["bracket"][0] <= report.outputs["rho_tilde"]

    def test_reducible_exit_code(self, tmp_path):
        model = single_action_chain([[1.0, 0.0], [0.5, 0.5]], [0.0, 1.0], 1.0)
        path = tmp_path / "red.json"
        save(model, path)
        assert main(["value", str(path), "--eps", "0.1"]) == 3

    def test_nonconvergence_exit_code(self, tiny_file):
        assert main(["value", tiny_file, "--eps", "1e-12", "--max-outer", "2"]) == 4


class TestSaddle:
    def test_tables_and_certificate(self, small_game_file, capsys):
        assert main(["saddle", small_game_file, "--eps", "0.2"]) == 0
        out = capsys.readouterr().out
        assert "player 1 policy" in out
        assert "player 2 policy" in out
        assert "verdict                PASS" in out

    def test_machine_report_with_policies(self, small_game_file, tmp_path, capsys):
        pol = tmp_path / "policies.json"
        assert (
            main(
                [
                    "saddle",
                    small_game_file,
                    "--eps",
                    "0.2",
                    "--machine",
                    "--out-policies",
                    str(pol),
                ]
            )
            == 0
        )
        doc = json.loads(capsys.readouterr().out)
        assert doc["outputs"]["certificate"]["passed"] is True
        assert doc["outputs"]["k_eps"] >= 1
        # written policy file certifies through the verify subcommand
        assert main(["verify", small_game_file, "--policies", str(pol), "--eps", "0.2"]) == 0

    def test_no_certify_skips_certificate(self, small_game_file, capsys):
        assert main(["saddle", small_game_file, "--eps", "0.2", "--no-certify", "--machine"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert "certificate" not in doc["outputs"]

    def test_inadmissible_theta_exit_code(self, tmp_path, capsys):
        model, report = make_admissible_game(np.random.default_rng(1), n_states=2)
        hot = GameModel(
            theta=report.theta_max * 3,
            actions_a=model.actions_a,
            actions_b=model.actions_b,
            cost=model.cost,
            transition=model.transition,
        )
        path = tmp_path / "hot.json"
        save(hot, path)
        assert main(["saddle", str(path), "--eps", "0.1"]) == 3
        assert "admissible interval" in capsys.readouterr().err


class TestVerify:
    def test_bad_policy_label(self, small_game_file, tmp_path):
        pol = tmp_path / "bad.json"
        pol.write_text(json.dumps({"phi": [{"zzz": 1.0}, {"a0": 1.0}], "psi": [{}, {}]}))
        assert main(["verify", small_game_file, "--policies", str(pol), "--eps", "0.1"]) == 2

    def test_failing_pair_exit_code(self, tmp_path):
        # uniform policies are not a 1e-4 saddle of an asymmetric game
        model, _ = make_admissible_game(np.random.default_rng(2), n_states=2, max_a=2, max_b=2)
        path = tmp_path / "game.json"
        save(model, path)
        pol = tmp_path / "uniform.json"
        doc = {
            "phi": [
                {lbl: 1.0 / len(row) for lbl in row} for row in model.actions_a
            ],
            "psi": [
                {lbl: 1.0 / len(row) for lbl in row} for row in model.actions_b
            ],
        }
        pol.write_text(json.dumps(doc))
        code = main(["verify", str(path), "--policies", str(pol), "--eps", "1e-4"])
        assert code in (0, 2)  # depends on game; just exercise the path
        assert main(["verify", str(path), "--policies", str(pol), "--eps", "100.0"]) == 0


class TestSimulate:
    def test_smoke_and_determinism(self, tiny_file, tmp_path, capsys):
        model = load(tiny_file)
        pol = tmp_path / "forced.json"
        pol.write_text(
            json.dumps({"phi": [{"a": 1.0}, {"a": 1.0}], "psi": [{"b": 1.0}, {"b": 1.0}]})
        )
        args = [
            "simulate", tiny_file, "--policies", str(pol),
            "--seed", "5", "--horizon", "200", "--trials", "50", "--machine",
        ]
        assert main(args) == 0
        first = json.loads(capsys.readouterr().out)["outputs"]["estimate"]
        assert main(args) == 0
        second = json.loads(capsys.readouterr().out)["outputs"]["estimate"]
        assert first == second


class TestExample:
    def test_smartgrid_defaults_reproduce_constants(self, grid_file):
        model = load(grid_file)
        assert model.n_states == 3
        assert [len(b) for b in model.actions_b] == [6, 9, 11]
        assert model.metadata["family"] == "smartgrid"

    def test_single_state_variant(self, tmp_path):
        path = tmp_path / "deg.json"
        assert main(["example", "smartgrid", "--ns", "0", "--out", str(path)]) == 0
        assert load(path).n_states == 1

    def test_theta_above_bound_warns_but_writes(self, tmp_path, capsys):
        path = tmp_path / "hot.json"
        assert main(["example", "smartgrid", "--theta", "0.2", "--out", str(path)]) == 0
        assert "warning" in capsys.readouterr().err
        assert load(path).theta == 0.2

    def test_rejected_generation_params(self, tmp_path):
        path = tmp_path / "never.json"
        code = main(["example", "smartgrid", "--std", "0.01", "--out", str(path)])
        assert code == 2
