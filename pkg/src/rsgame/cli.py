"""Command-line front end.

Subcommands load a game file, dispatch one library operation, and print
either a human-readable summary or (with ``--machine``) a JSON run report
that round-trips losslessly. Exit codes: 0 success, 1 I/O, 2 validation,
3 precondition (risk parameter / irreducibility), 4 non-convergence or
solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._kernels import backend_name
from .errors import (
    GameFileError,
    ModelValidationError,
    NonConvergenceError,
    PreconditionError,
    SolverFailureError,
)
from .irreducibility import IrreducibilityReport, analyze
from .model import GameModel, SmartGridParams, build_smartgrid, load, save, validate
from .saddle import SaddleResult, compute_saddle
from .shapley import StationaryPolicy
from .value_iteration import ValueApproxResult, approximate_value, sandwich_certificate
from .verify import SaddleCertificate, simulate_cost, verify_saddle

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_PRECONDITION = 3
EXIT_NO_CONVERGENCE = 4


@dataclass(frozen=True)
class RunReport:
    """Machine-readable record of one CLI invocation."""

    command: str
    inputs: dict
    outputs: dict
    timings: dict
    versions: str

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timings": self.timings,
            "versions": self.versions,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        return cls(
            command=doc["command"],
            inputs=doc["inputs"],
            outputs=doc["outputs"],
            timings=doc["timings"],
            versions=doc["versions"],
        )


def _versions() -> str:
    return f"rsgame {__version__} ({backend_name} backend)"


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def policy_to_maps(policy: StationaryPolicy, labels: tuple[tuple[str, ...], ...]) -> list[dict]:
    return [
        {labels[i][a]: float(p) for a, p in enumerate(policy.probs[i])}
        for i, _ in enumerate(policy.probs)
    ]


def policy_from_maps(maps, labels: tuple[tuple[str, ...], ...], where: str) -> StationaryPolicy:
    if not isinstance(maps, list) or len(maps) != len(labels):
        raise GameFileError(
            f"must be an array with one action-probability map per state ({len(labels)})",
            location=where,
        )
    rows = []
    for i, entry in enumerate(maps):
        if not isinstance(entry, dict):
            raise GameFileError("state entry must be an object", location=f"{where}[{i}]")
        known = set(labels[i])
        unknown = set(entry) - known
        if unknown:
            raise GameFileError(
                f"unknown action label(s) {sorted(unknown)}; admissible: {list(labels[i])}",
                location=f"{where}[{i}]",
            )
        row = np.array([float(entry.get(lbl, 0.0)) for lbl in labels[i]])
        try:
            rows.append(row)
            StationaryPolicy((row,))
        except ValueError as exc:
            raise GameFileError(str(exc), location=f"{where}[{i}]") from exc
    return StationaryPolicy(tuple(rows))


def load_policy_pair(path, model: GameModel) -> tuple[StationaryPolicy, StationaryPolicy]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameFileError(f"not valid JSON: {exc}", location=str(path)) from exc
    if not isinstance(doc, dict) or "phi" not in doc or "psi" not in doc:
        raise GameFileError("policy file must be an object with keys 'phi' and 'psi'", location=str(path))
    phi = policy_from_maps(doc["phi"], model.actions_a, f"{path}: phi")
    psi = policy_from_maps(doc["psi"], model.actions_b, f"{path}: psi")
    return phi, psi


def save_policy_pair(path, model: GameModel, phi: StationaryPolicy, psi: StationaryPolicy) -> None:
    doc = {
        "phi": policy_to_maps(phi, model.actions_a),
        "psi": policy_to_maps(psi, model.actions_b),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def irreducibility_to_dict(rep: IrreducibilityReport) -> dict:
    return {
        "gamma": rep.gamma,
        "eta": rep.eta,
        "i_star": rep.i_star,
        "m_c": rep.m_c,
        "theta_max": rep.theta_max,
        "irreducible": rep.irreducible,
        "v_table": rep.v_table.tolist(),
    }


def value_result_to_dict(res: ValueApproxResult) -> dict:
    lower, upper = sandwich_certificate(res)
    return {
        "rho_tilde": res.rho_tilde,
        "eps": res.eps,
        "n_outer": res.n_outer,
        "converged": res.converged,
        "lambda_trace": list(res.lambda_trace),
        "zeta_trace": list(res.zeta_trace),
        "bracket": [lower, upper],
    }


def saddle_result_to_dict(res: SaddleResult, model: GameModel) -> dict:
    return {
        "rho_eps": res.rho_eps,
        "eps": res.eps,
        "i_star": res.i_star,
        "eta": res.eta,
        "k_eps": res.k_eps,
        "n_eps": res.n_eps,
        "constant_cost": res.constant_cost,
        "u_final": res.u_final.tolist(),
        "phi": policy_to_maps(res.phi_eps, model.actions_a),
        "psi": policy_to_maps(res.psi_eps, model.actions_b),
    }


def certificate_to_dict(cert: SaddleCertificate) -> dict:
    return {
        "rho_bracket": list(cert.rho_bracket),
        "best_response_vs_psi": list(cert.best_response_vs_psi),
        "best_response_vs_phi": list(cert.best_response_vs_phi),
        "slack_player1": cert.slack_player1,
        "slack_player2": cert.slack_player2,
        "certified_eps": cert.certified_eps,
        "eps": cert.eps,
        "tolerance": cert.tolerance,
        "passed": cert.passed,
    }


# ---------------------------------------------------------------------------
# human rendering
# ---------------------------------------------------------------------------


def render_policy_table(policy: StationaryPolicy, labels: tuple[tuple[str, ...], ...]) -> str:
    cols: list[str] = []
    for row in labels:
        for lbl in row:
            if lbl not in cols:
                cols.append(lbl)
    width = max(6, max(len(c) for c in cols))
    head = "state | " + "  ".join(f"{c:>{width}}" for c in cols)
    lines = [head, "-" * len(head)]
    for i, row in enumerate(labels):
        by_label = {lbl: policy.probs[i][a] for a, lbl in enumerate(row)}
        cells = "  ".join(f"{by_label.get(c, 0.0):>{width}.4f}" for c in cols)
        lines.append(f"{i:5d} | {cells}")
    return "\n".join(lines)


def render_certificate(cert: SaddleCertificate) -> str:
    verdict = "PASS" if cert.passed else "FAIL"
    return "\n".join(
        [
            f"value bracket          [{cert.rho_bracket[0]:.6f}, {cert.rho_bracket[1]:.6f}]",
            f"best response vs phi   [{cert.best_response_vs_phi[0]:.6f}, {cert.best_response_vs_phi[1]:.6f}]",
            f"best response vs psi   [{cert.best_response_vs_psi[0]:.6f}, {cert.best_response_vs_psi[1]:.6f}]",
            f"slack player 1         {cert.slack_player1:.6f}",
            f"slack player 2         {cert.slack_player2:.6f}",
            f"certified eps          {cert.certified_eps:.6f}"
            f" (target {cert.eps} + tolerance {cert.tolerance:.6f})",
            f"verdict                {verdict}",
        ]
    )


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (exit_code, outputs_dict, human_text)
# ---------------------------------------------------------------------------


def _cmd_validate(args, timings):
    t0 = time.perf_counter()
    try:
        load(args.model)
    except ModelValidationError as exc:
        timings["validate"] = time.perf_counter() - t0
        lines = [f"[{v.kind}] {v.message}" for v in exc.report.violations]
        outputs = {
            "ok": False,
            "violations": [
                {"kind": v.kind, "location": list(v.location), "message": v.message}
                for v in exc.report.violations
            ],
        }
        return EXIT_VALIDATION, outputs, "\n".join(["invalid:"] + lines)
    timings["validate"] = time.perf_counter() - t0
    return EXIT_OK, {"ok": True, "violations": []}, "valid"


def _cmd_irreducibility(args, timings):
    model = _load_timed(args.model, timings)
    t0 = time.perf_counter()
    rep = analyze(model)
    timings["analyze"] = time.perf_counter() - t0
    human = "\n".join(
        [
            f"gamma     {rep.gamma:.6f}",
            f"eta       {rep.eta:.6f}",
            f"i_star    {rep.i_star}",
            f"M_c       {rep.m_c:.6f}",
            f"theta_max {rep.theta_max:.6f}",
            f"verdict   {'irreducible' if rep.irreducible else 'reducible'}",
        ]
    )
    return EXIT_OK, irreducibility_to_dict(rep), human


def _cmd_value(args, timings):
    model = _load_timed(args.model, timings)
    t0 = time.perf_counter()
    res = approximate_value(model, args.eps, max_outer=args.max_outer)
    timings["value"] = time.perf_counter() - t0
    lower, upper = sandwich_certificate(res)
    human = "\n".join(
        [
            f"rho_tilde {res.rho_tilde:.6f}  (eps {res.eps}, outer steps {res.n_outer})",
            f"bracket   [{lower:.6f}, {upper:.6f}]  width {upper - lower:.3e}",
        ]
    )
    return EXIT_OK, value_result_to_dict(res), human


def _cmd_saddle(args, timings):
    model = _load_timed(args.model, timings)
    t0 = time.perf_counter()
    res = compute_saddle(model, args.eps, max_outer=args.max_outer)
    timings["saddle"] = time.perf_counter() - t0
    outputs = saddle_result_to_dict(res, model)
    parts = [
        f"rho_eps {res.rho_eps:.6f}  i_star {res.i_star}  eta {res.eta:.6f}  "
        f"k_eps {res.k_eps}  n_eps {res.n_eps}"
        + ("  [constant-cost: any pair is a saddle point]" if res.constant_cost else ""),
        "",
        "player 1 policy (phi):",
        render_policy_table(res.phi_eps, model.actions_a),
        "",
        "player 2 policy (psi):",
        render_policy_table(res.psi_eps, model.actions_b),
    ]
    if args.out_policies:
        save_policy_pair(args.out_policies, model, res.phi_eps, res.psi_eps)
        parts.append(f"\npolicies written to {args.out_policies}")
    if args.certify:
        t0 = time.perf_counter()
        cert = verify_saddle(model, res.phi_eps, res.psi_eps, args.eps, max_outer=args.max_outer)
        timings["certify"] = time.perf_counter() - t0
        outputs["certificate"] = certificate_to_dict(cert)
        parts += ["", "certificate:", render_certificate(cert)]
    return EXIT_OK, outputs, "\n".join(parts)


def _cmd_verify(args, timings):
    model = _load_timed(args.model, timings)
    phi, psi = load_policy_pair(args.policies, model)
    t0 = time.perf_counter()
    cert = verify_saddle(model, phi, psi, args.eps, max_outer=args.max_outer)
    timings["verify"] = time.perf_counter() - t0
    code = EXIT_OK if cert.passed else EXIT_VALIDATION
    return code, certificate_to_dict(cert), render_certificate(cert)


def _cmd_simulate(args, timings):
    model = _load_timed(args.model, timings)
    phi, psi = load_policy_pair(args.policies, model)
    t0 = time.perf_counter()
    est = simulate_cost(model, phi, psi, args.start, args.horizon, args.trials, args.seed)
    timings["simulate"] = time.perf_counter() - t0
    outputs = {
        "estimate": est,
        "start": args.start,
        "horizon": args.horizon,
        "trials": args.trials,
        "seed": args.seed,
    }
    human = (
        f"estimate {est:.6f}  (start {args.start}, horizon {args.horizon}, "
        f"trials {args.trials}, seed {args.seed})"
    )
    return EXIT_OK, outputs, human


def _cmd_example_smartgrid(args, timings):
    params = SmartGridParams(
        n_s=args.ns,
        n_c=args.nc,
        n_p=args.np,
        m=args.m,
        gen_mean=args.mean,
        gen_std=args.std,
        theta=args.theta,
    )
    t0 = time.perf_counter()
    model = build_smartgrid(params)
    timings["build"] = time.perf_counter() - t0
    save(model, args.out)
    rep = analyze(model)
    warning = None
    if not model.theta < rep.theta_max:
        warning = (
            f"warning: theta = {model.theta} is not below theta_max = {rep.theta_max:.6f}; "
            "saddle-point computation will refuse this game"
        )
        print(warning, file=sys.stderr)
    outputs = {
        "path": str(args.out),
        "n_states": model.n_states,
        "theta": model.theta,
        "theta_max": rep.theta_max,
        "eta": rep.eta,
        "i_star": rep.i_star,
        "m_c": rep.m_c,
        "warning": warning,
    }
    human = (
        f"wrote {args.out}: {model.n_states} states, theta {model.theta}, "
        f"eta {rep.eta:.4f}, theta_max {rep.theta_max:.4f}"
    )
    return EXIT_OK, outputs, human


def _load_timed(path, timings) -> GameModel:
    t0 = time.perf_counter()
    model = load(path)
    timings["load"] = time.perf_counter() - t0
    return model


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsgame",
        description="Solve and verify zero-sum risk-sensitive average stochastic games.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", action="store_true", help="emit a JSON run report to stdout")
    common.add_argument(
        "--max-outer", type=int, default=30, help="outer-step cap of the doubling iteration"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a game file against all invariants")
    p.add_argument("model")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("irreducibility", parents=[common], help="reachability coefficients and admissible theta range")
    p.add_argument("model")
    p.set_defaults(func=_cmd_irreducibility)

    p = sub.add_parser("value", parents=[common], help="eps-approximation of the game value")
    p.add_argument("model")
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_value)

    p = sub.add_parser("saddle", parents=[common], help="eps-saddle point with certificate")
    p.add_argument("model")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--no-certify", dest="certify", action="store_false", help="skip the independent eps-saddle certification")
    p.add_argument("--out-policies", metavar="FILE", help="also write the policy pair as a policy file")
    p.set_defaults(func=_cmd_saddle)

    p = sub.add_parser("verify", parents=[common], help="certify a policy pair as an eps-saddle point")
    p.add_argument("model")
    p.add_argument("--policies", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo diagnostic of a policy pair")
    p.add_argument("model")
    p.add_argument("--policies", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p_ex = sub.add_parser("example", help="generate example game files")
    ex_sub = p_ex.add_subparsers(dest="example_command", required=True)
    p = ex_sub.add_parser("smartgrid", parents=[common], help="smart-grid energy-management game")
    p.add_argument("--ns", type=int, default=2, help="storage capacity")
    p.add_argument("--nc", type=int, default=3, help="maximum consumption")
    p.add_argument("--np", type=int, default=2, help="maximum purchase")
    p.add_argument("--m", type=int, default=2, help="opponent demand cap")
    p.add_argument("--theta", type=float, default=0.01, help="risk-sensitivity parameter")
    p.add_argument("--mean", type=float, default=1.0, help="generation mean")
    p.add_argument("--std", type=float, default=2.0, help="generation standard deviation")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_example_smartgrid)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    timings: dict[str, float] = {}
    start = time.perf_counter()
    try:
        code, outputs, human = args.func(args, timings)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GameFileError, ModelValidationError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PreconditionError as exc:
        print(f"precondition not met: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NonConvergenceError, SolverFailureError) as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    timings["total"] = time.perf_counter() - start

    if args.machine:
        report = RunReport(
            command=args.command if args.command != "example" else "example smartgrid",
            inputs={k: v for k, v in vars(args).items() if k not in ("func", "machine") and not callable(v)},
            outputs=outputs,
            timings=timings,
            versions=_versions(),
        )
        json.dump(report.to_dict(), sys.stdout)
        sys.stdout.write("\n")
    else:
        print(human)
    return code


if __name__ == "__main__":
    sys.exit(main())
