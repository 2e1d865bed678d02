"""Exception types shared across the package."""

from __future__ import annotations


class GameFileError(Exception):
    """A game or policy file is malformed or violates the file schema."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ModelValidationError(Exception):
    """A game model violates its structural invariants.

    Carries the full :class:`~rsgame.model.ValidationReport` in ``report``.
    """

    def __init__(self, report):
        self.report = report
        first = report.violations[0] if report.violations else None
        n = len(report.violations)
        msg = f"invalid game model ({n} violation{'s' if n != 1 else ''})"
        if first is not None:
            msg += f"; first: {first.message}"
        super().__init__(msg)


class PreconditionError(Exception):
    """An operation was called outside its guaranteed regime.

    Raised for reducible models and for risk parameters outside the
    admissible interval; ``detail`` holds context (for the latter a
    :class:`~rsgame.saddle.ThetaAdmissibility`).
    """

    def __init__(self, message: str, detail=None):
        self.detail = detail
        super().__init__(message)


class SolverFailureError(Exception):
    """The matrix-game solver failed (pivot limit exceeded).

    ``matrix`` holds the offending payoff matrix and ``state`` the game
    state it came from, when known.
    """

    def __init__(self, message: str, matrix=None, state=None):
        self.matrix = matrix
        self.state = state
        super().__init__(message)


class NonConvergenceError(Exception):
    """An iteration hit its budget before meeting the accuracy target.

    ``result`` carries the partial (non-converged) result, including the
    bound traces accumulated so far.
    """

    def __init__(self, message: str, result=None):
        self.result = result
        super().__init__(message)
