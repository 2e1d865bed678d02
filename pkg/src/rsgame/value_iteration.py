"""Doubling value iteration with a two-sided stopping certificate.

Repeated application of the one-step operator to the constant function 1
yields upper and lower estimates of the game value: after ``2^n``
applications,

    upper_n = ln(max iterate) / (theta * 2^n),
    lower_n = ln(min iterate) / (theta * 2^n),

the upper sequence is nonincreasing, the lower nondecreasing, and both
converge to the value. Outer step ``n`` squares the cumulative application
count; iteration stops at the first checkpoint whose gap is at most the
requested accuracy, so the returned upper estimate overshoots the value by
at most ``eps`` and never undershoots.

Costs are shifted to be nonnegative internally (the shift is subtracted
from every reported figure), and all bookkeeping is done in the log domain
through the value function's scale accumulator, so no overflow occurs no
matter how many applications run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonConvergenceError, PreconditionError
from .irreducibility import analyze
from .model import GameModel, shift_costs
from .shapley import ShapleyOperator, ValueFunction

DEFAULT_MAX_OUTER = 30


@dataclass(frozen=True)
class ValueApproxResult:
    """Outcome of the doubling iteration.

    ``lambda_trace[k]`` / ``zeta_trace[k]`` are the upper/lower value
    estimates after ``2^k`` operator applications (index 0 included), on
    the original cost scale. ``rho_tilde`` equals the final upper estimate
    and satisfies ``0 <= rho_tilde - value <= eps`` when converged.
    """

    rho_tilde: float
    lambda_trace: tuple[float, ...]
    zeta_trace: tuple[float, ...]
    n_outer: int
    eps: float
    converged: bool


def approximate_value(
    model: GameModel,
    eps: float,
    max_outer: int = DEFAULT_MAX_OUTER,
    max_applications: int | None = None,
) -> ValueApproxResult:
    """Compute an ``eps``-overestimate of the game value with certificate.

    Raises :class:`PreconditionError` on reducible models and
    :class:`NonConvergenceError` (carrying the partial result) when
    ``max_outer`` checkpoints or the application budget are exhausted.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    if max_outer < 1:
        raise ValueError("max_outer must be >= 1")
    report = analyze(model)
    if not report.irreducible:
        raise PreconditionError(
            "model is reducible (worst-case reachability coefficient is 0); "
            "value iteration guarantees need irreducibility",
            detail=report,
        )

    shifted, cost_shift = shift_costs(model)
    theta = model.theta
    op = ShapleyOperator(shifted)

    h = ValueFunction.ones(model.n_states)
    h, _ = op.apply(h)  # one application: the n = 0 checkpoint
    applications = 1

    def upper(n_apps: int) -> float:
        return h.log_scale / (theta * n_apps) - cost_shift.shift

    def lower(n_apps: int) -> float:
        return (h.log_scale + math.log(float(h.values.min()))) / (theta * n_apps) - cost_shift.shift

    lambda_trace = [upper(applications)]
    zeta_trace = [lower(applications)]

    n = 1
    while n <= max_outer:
        for _ in range(2 ** (n - 1)):
            if max_applications is not None and applications >= max_applications:
                partial = _result(lambda_trace, zeta_trace, n - 1, eps, False)
                raise NonConvergenceError(
                    f"application budget {max_applications} exhausted before the "
                    f"accuracy test passed (gap {lambda_trace[-1] - zeta_trace[-1]:.3e} > {eps:.3e})",
                    result=partial,
                )
            h, _ = op.apply(h)
            applications += 1
        lambda_trace.append(upper(applications))
        zeta_trace.append(lower(applications))
        if lambda_trace[-1] - zeta_trace[-1] <= eps:
            return _result(lambda_trace, zeta_trace, n, eps, True)
        n += 1

    partial = _result(lambda_trace, zeta_trace, max_outer, eps, False)
    raise NonConvergenceError(
        f"no convergence within {max_outer} outer steps "
        f"(gap {lambda_trace[-1] - zeta_trace[-1]:.3e} > {eps:.3e})",
        result=partial,
    )


def _result(lambda_trace, zeta_trace, n_outer, eps, converged) -> ValueApproxResult:
    return ValueApproxResult(
        rho_tilde=lambda_trace[-1],
        lambda_trace=tuple(lambda_trace),
        zeta_trace=tuple(zeta_trace),
        n_outer=n_outer,
        eps=eps,
        converged=converged,
    )


def sandwich_certificate(result: ValueApproxResult) -> tuple[float, float]:
    """Two-sided bracket ``lower <= value <= upper`` of a converged run."""
    if not result.converged:
        raise ValueError("sandwich certificate requires a converged result")
    return result.zeta_trace[-1], result.lambda_trace[-1]
