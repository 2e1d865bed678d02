"""Game definitions: validation, cost shifting, serialization, generators.

A game instance couples a finite state space with per-state finite action
sets for two players, a controlled transition kernel ``P(j | i, a, b)``, a
stage payoff ``c(i, a, b)`` (paid by player 1 to player 2, so player 1
minimizes and player 2 maximizes), and a risk-sensitivity parameter
``theta > 0``. The criterion both players care about is the long-run
exponential average ``limsup (theta * n)^-1 * ln E[exp(theta * sum c)]``.

The smart-grid generator builds a worked family of such games: a prosumer
(player 2) with a bounded storage unit buys and consumes energy against the
aggregate demand of other market participants (player 1), with random
effective generation integrated over unit intervals of a Gaussian.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import GameFileError, ModelValidationError

PROB_TOL = 1e-9  # stochasticity tolerance; violations are reported, never renormalized


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GameModel:
    """Immutable game instance.

    ``cost[i]`` has shape ``(|A(i)|, |B(i)|)`` and ``transition[i]`` shape
    ``(|A(i)|, |B(i)|, n_states)``. Action labels are carried for
    serialization and reporting only; all numerics index by position.
    """

    theta: float
    actions_a: tuple[tuple[str, ...], ...]
    actions_b: tuple[tuple[str, ...], ...]
    cost: tuple[np.ndarray, ...]
    transition: tuple[np.ndarray, ...]
    metadata: Mapping | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "actions_a", tuple(tuple(str(x) for x in row) for row in self.actions_a)
        )
        object.__setattr__(
            self, "actions_b", tuple(tuple(str(x) for x in row) for row in self.actions_b)
        )
        object.__setattr__(self, "cost", tuple(_freeze(c) for c in self.cost))
        object.__setattr__(self, "transition", tuple(_freeze(p) for p in self.transition))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def n_states(self) -> int:
        return len(self.cost)

    def min_cost(self) -> float:
        return min(float(c.min()) for c in self.cost)

    def max_cost(self) -> float:
        return max(float(c.max()) for c in self.cost)

    def cost_span(self) -> float:
        """Spread between the largest and smallest stage payoff."""
        return self.max_cost() - self.min_cost()


@dataclass(frozen=True)
class CostShift:
    """Constant added to every payoff entry to make the table nonnegative."""

    shift: float


@dataclass(frozen=True)
class SmartGridParams:
    """Parameters of the smart-grid game family.

    ``n_s`` storage capacity (0 is allowed and collapses the state space to
    a single level), ``n_c`` maximum consumption, ``n_p`` maximum purchase,
    ``m`` demand cap of the other prosumers, and the mean/std of the
    Gaussian effective-generation distribution.
    """

    n_s: int = 2
    n_c: int = 3
    n_p: int = 2
    m: int = 2
    gen_mean: float = 1.0
    gen_std: float = 2.0
    theta: float = 0.01

    def __post_init__(self):
        if self.n_s < 0:
            raise ValueError("n_s must be >= 0")
        if min(self.n_c, self.n_p, self.m) < 1:
            raise ValueError("n_c, n_p, m must be >= 1")
        if not self.gen_std > 0:
            raise ValueError("gen_std must be > 0")
        if not self.theta > 0:
            raise ValueError("theta must be > 0")


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(v.message for v in self.violations)


def validate(model: GameModel) -> ValidationReport:
    """Check every structural invariant; reports violations, never raises."""
    bad: list[Violation] = []
    n = model.n_states

    if not (isinstance(model.theta, float) and model.theta > 0 and math.isfinite(model.theta)):
        bad.append(Violation("theta", (), f"theta must be a positive finite real, got {model.theta}"))
    if n == 0:
        bad.append(Violation("states", (), "model has no states"))
        return ValidationReport(tuple(bad))
    if not (len(model.actions_a) == len(model.actions_b) == len(model.transition) == n):
        bad.append(Violation("shape", (), "per-state field lengths disagree"))
        return ValidationReport(tuple(bad))

    for i in range(n):
        labels_a, labels_b = model.actions_a[i], model.actions_b[i]
        for player, labels in (("a", labels_a), ("b", labels_b)):
            if len(labels) == 0:
                bad.append(Violation("actions", (i, player), f"state {i}: empty action set for player {player}"))
            if len(set(labels)) != len(labels):
                bad.append(Violation("actions", (i, player), f"state {i}: duplicate action labels for player {player}"))
        na, nb = len(labels_a), len(labels_b)
        if model.cost[i].shape != (na, nb):
            bad.append(Violation("shape", (i,), f"state {i}: cost shape {model.cost[i].shape} != ({na}, {nb})"))
            continue
        if model.transition[i].shape != (na, nb, n):
            bad.append(
                Violation("shape", (i,), f"state {i}: transition shape {model.transition[i].shape} != ({na}, {nb}, {n})")
            )
            continue
        if not np.isfinite(model.cost[i]).all():
            a, b = map(int, np.argwhere(~np.isfinite(model.cost[i]))[0])
            bad.append(Violation("cost", (i, a, b), f"non-finite cost at (i={i}, a={a}, b={b})"))
        p = model.transition[i]
        if not np.isfinite(p).all():
            a, b = map(int, np.argwhere(~np.isfinite(p))[0][:2])
            bad.append(Violation("transition", (i, a, b), f"non-finite transition probability at (i={i}, a={a}, b={b})"))
            continue
        for a in range(na):
            for b in range(nb):
                row = p[a, b]
                neg = row < 0
                if neg.any():
                    j = int(np.argmax(neg))
                    bad.append(
                        Violation(
                            "negative_probability",
                            (i, a, b),
                            f"P({j}|i={i}, a={a}, b={b}) = {row[j]} < 0",
                        )
                    )
                s = float(row.sum())
                if abs(s - 1.0) > PROB_TOL:
                    bad.append(
                        Violation(
                            "stochasticity",
                            (i, a, b),
                            f"sum_j P(j|i={i}, a={a}, b={b}) = {s!r} differs from 1 by more than {PROB_TOL}",
                        )
                    )
    return ValidationReport(tuple(bad))


def shift_costs(model: GameModel) -> tuple[GameModel, CostShift]:
    """Return an equivalent model with nonnegative payoffs.

    Adds ``shift = max(0, -min c)`` to every entry; the game value moves by
    exactly ``shift`` and optimal policies are unchanged.
    """
    shift = max(0.0, -model.min_cost())
    if shift == 0.0:
        return model, CostShift(0.0)
    shifted = GameModel(
        theta=model.theta,
        actions_a=model.actions_a,
        actions_b=model.actions_b,
        cost=tuple(c + shift for c in model.cost),
        transition=model.transition,
        metadata=model.metadata,
    )
    return shifted, CostShift(shift)


def gaussian_cell(k: int, mean: float, std: float) -> float:
    """Probability mass of ``[k, k+1)`` under a Normal(mean, std^2) law."""
    if not std > 0:
        raise ValueError("std must be > 0")
    return _norm_cdf(k + 1.0, mean, std) - _norm_cdf(float(k), mean, std)


def _norm_cdf(x: float, mean: float, std: float) -> float:
    return 0.5 * math.erfc(-(x - mean) / (std * math.sqrt(2.0)))


def build_smartgrid(params: SmartGridParams) -> GameModel:
    """Build the smart-grid game for the given parameters.

    States are storage levels ``0..n_s``; player 1 picks the market demand
    ``a in 0..m``; player 2 picks ``(b_p, b_c)`` with ``0 <= b_p <= n_p``
    and ``0 <= b_c <= min(i + b_p, n_c)``. The next level is the current
    net level ``i + b_p - b_c`` plus the integer-cell Gaussian generation,
    clipped to ``[0, n_s]`` with all overflow mass aggregated at the
    boundaries. The payoff to player 2 is consumption profit minus purchase
    cost, ``ln((b_c + 0.4) / 0.4) - (b_p * (a + b_p) / 10 + [b_p > a] / 4)``.
    """
    ns, nc, npur, m = params.n_s, params.n_c, params.n_p, params.m
    mean, std = params.gen_mean, params.gen_std

    for k in range(-nc, ns + 1):
        if not gaussian_cell(k, mean, std) > 0.0:
            raise ValueError(
                f"generation cell {k} has numerically zero probability "
                f"(mean={mean}, std={std}); every cell in [-n_c, n_s] must be positive"
            )

    n = ns + 1
    labels_a = tuple(str(a) for a in range(m + 1))
    cost: list[np.ndarray] = []
    transition: list[np.ndarray] = []
    actions_b: list[tuple[str, ...]] = []
    for i in range(n):
        pairs = [
            (bp, bc)
            for bp in range(npur + 1)
            for bc in range(min(i + bp, nc) + 1)
        ]
        actions_b.append(tuple(f"({bp},{bc})" for bp, bc in pairs))
        c = np.empty((m + 1, len(pairs)))
        p = np.zeros((m + 1, len(pairs), n))
        for a in range(m + 1):
            for idx, (bp, bc) in enumerate(pairs):
                d = i + bp - bc
                if ns == 0:
                    p[a, idx, 0] = 1.0
                else:
                    p[a, idx, 0] = _norm_cdf(1.0 - d, mean, std)
                    for j in range(1, ns):
                        p[a, idx, j] = gaussian_cell(j - d, mean, std)
                    p[a, idx, ns] = 1.0 - _norm_cdf(float(ns - d), mean, std)
                profit = math.log(bc + 0.4) - math.log(0.4)
                price = bp * (a + bp) / 10.0 + (0.25 if bp > a else 0.0)
                c[a, idx] = profit - price
        cost.append(c)
        transition.append(p)

    return GameModel(
        theta=params.theta,
        actions_a=tuple(labels_a for _ in range(n)),
        actions_b=tuple(actions_b),
        cost=tuple(cost),
        transition=tuple(transition),
        metadata={
            "family": "smartgrid",
            "n_s": ns,
            "n_c": nc,
            "n_p": npur,
            "m": m,
            "gen_mean": mean,
            "gen_std": std,
        },
    )


# ---------------------------------------------------------------------------
# JSON serialization.
#
# Schema: {"n_states": int, "theta": float, "states": [{"actions_a": [str],
# "actions_b": [str], "cost": [[f]], "transition": [[[f]]]}], "metadata": {}}
# ---------------------------------------------------------------------------


def save(model: GameModel, path) -> None:
    """Write a game file; floats keep full double precision."""
    doc = {
        "n_states": model.n_states,
        "theta": model.theta,
        "states": [
            {
                "actions_a": list(model.actions_a[i]),
                "actions_b": list(model.actions_b[i]),
                "cost": model.cost[i].tolist(),
                "transition": model.transition[i].tolist(),
            }
            for i in range(model.n_states)
        ],
    }
    if model.metadata is not None:
        doc["metadata"] = dict(model.metadata)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load(path) -> GameModel:
    """Read and fully validate a game file.

    Raises :class:`GameFileError` for malformed files or schema violations
    and :class:`ModelValidationError` when the parsed model fails
    :func:`validate`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameFileError(f"not valid JSON: {exc}", location=str(path)) from exc
    model = _model_from_doc(doc, where=str(path))
    report = validate(model)
    if not report.ok:
        raise ModelValidationError(report)
    return model


def _model_from_doc(doc, where: str) -> GameModel:
    if not isinstance(doc, dict):
        raise GameFileError("top level must be an object", location=where)
    for key in ("n_states", "theta", "states"):
        if key not in doc:
            raise GameFileError(f"missing required key {key!r}", location=where)
    n = doc["n_states"]
    if not isinstance(n, int) or n < 1:
        raise GameFileError(f"n_states must be a positive integer, got {n!r}", location=where)
    theta = doc["theta"]
    if isinstance(theta, bool) or not isinstance(theta, (int, float)):
        raise GameFileError(f"theta must be a number, got {theta!r}", location=where)
    states = doc["states"]
    if not isinstance(states, list) or len(states) != n:
        raise GameFileError(
            f"states must be an array of length n_states={n}", location=where
        )

    actions_a, actions_b, cost, transition = [], [], [], []
    for i, st in enumerate(states):
        loc = f"{where}: states[{i}]"
        if not isinstance(st, dict):
            raise GameFileError("state entry must be an object", location=loc)
        for key in ("actions_a", "actions_b", "cost", "transition"):
            if key not in st:
                raise GameFileError(f"missing required key {key!r}", location=loc)
        la = _string_list(st["actions_a"], f"{loc}.actions_a")
        lb = _string_list(st["actions_b"], f"{loc}.actions_b")
        c = _numeric_array(st["cost"], 2, f"{loc}.cost")
        p = _numeric_array(st["transition"], 3, f"{loc}.transition")
        if c.shape != (len(la), len(lb)):
            raise GameFileError(
                f"cost shape {c.shape} does not match action counts ({len(la)}, {len(lb)})",
                location=loc,
            )
        if p.shape != (len(la), len(lb), n):
            raise GameFileError(
                f"transition shape {p.shape} does not match ({len(la)}, {len(lb)}, {n})",
                location=loc,
            )
        actions_a.append(tuple(la))
        actions_b.append(tuple(lb))
        cost.append(c)
        transition.append(p)

    metadata = doc.get("metadata")
    if metadata is not None and not isinstance(metadata, dict):
        raise GameFileError("metadata must be an object", location=where)
    return GameModel(
        theta=float(theta),
        actions_a=tuple(actions_a),
        actions_b=tuple(actions_b),
        cost=tuple(cost),
        transition=tuple(transition),
        metadata=metadata,
    )


def _string_list(obj, loc: str) -> list[str]:
    if not isinstance(obj, list) or not obj or not all(isinstance(x, str) for x in obj):
        raise GameFileError("must be a nonempty array of strings", location=loc)
    return obj


def _numeric_array(obj, ndim: int, loc: str) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise GameFileError(f"must be a numeric array: {exc}", location=loc) from exc
    if arr.ndim != ndim:
        raise GameFileError(f"must be a {ndim}-D numeric array, got {arr.ndim}-D", location=loc)
    return arr
