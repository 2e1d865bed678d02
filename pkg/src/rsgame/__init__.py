"""Solver and verification toolkit for zero-sum risk-sensitive average stochastic games.

Finite states and actions, exponential (risk-sensitive) long-run average
criterion. The package computes two-sided approximations of the game value,
extracts eps-saddle policy pairs with explicit iteration counts, verifies
irreducibility through a computable reachability coefficient, and
cross-checks every output with independent oracles.
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from .errors import (
    GameFileError,
    ModelValidationError,
    NonConvergenceError,
    PreconditionError,
    SolverFailureError,
)
from .irreducibility import IrreducibilityReport, analyze, gamma_bruteforce, v_recursion
from .matrixgame import (
    MatrixGameSolution,
    PayoffMatrix,
    best_pure_responses,
    solve_matrix_game,
)
from .model import (
    CostShift,
    GameModel,
    SmartGridParams,
    ValidationReport,
    build_smartgrid,
    gaussian_cell,
    load,
    save,
    shift_costs,
    validate,
)
from .saddle import (
    SaddleResult,
    ThetaAdmissibility,
    compute_k_eps,
    compute_saddle,
    u_iteration,
)
from .shapley import (
    SelectorPair,
    ShapleyOperator,
    StationaryPolicy,
    ValueFunction,
    apply_operator,
    apply_operator_pow,
    apply_policy_operator,
    local_payoff_matrix,
)
from .value_iteration import ValueApproxResult, approximate_value, sandwich_certificate
from .verify import (
    SaddleCertificate,
    TwistedKernel,
    best_response,
    simulate_cost,
    spectral_radius,
    stationary_value,
    twisted_kernel,
    verify_saddle,
)

__all__ = [
    "__version__",
    "backend_name",
    "GameFileError",
    "ModelValidationError",
    "NonConvergenceError",
    "PreconditionError",
    "SolverFailureError",
    "IrreducibilityReport",
    "analyze",
    "gamma_bruteforce",
    "v_recursion",
    "MatrixGameSolution",
    "PayoffMatrix",
    "best_pure_responses",
    "solve_matrix_game",
    "CostShift",
    "GameModel",
    "SmartGridParams",
    "ValidationReport",
    "build_smartgrid",
    "gaussian_cell",
    "load",
    "save",
    "shift_costs",
    "validate",
    "SaddleResult",
    "ThetaAdmissibility",
    "compute_k_eps",
    "compute_saddle",
    "u_iteration",
    "SelectorPair",
    "ShapleyOperator",
    "StationaryPolicy",
    "ValueFunction",
    "apply_operator",
    "apply_operator_pow",
    "apply_policy_operator",
    "local_payoff_matrix",
    "ValueApproxResult",
    "approximate_value",
    "sandwich_certificate",
    "SaddleCertificate",
    "TwistedKernel",
    "best_response",
    "simulate_cost",
    "spectral_radius",
    "stationary_value",
    "twisted_kernel",
    "verify_saddle",
]
