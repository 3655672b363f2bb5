"""Exception types shared across the package."""

from __future__ import annotations


class BetapotError(Exception):
    """Base class for all library errors."""


class ContractError(BetapotError, ValueError):
    """A precondition on the arguments was violated."""


class DomainError(BetapotError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DivergenceError(BetapotError, ArithmeticError):
    """The requested integral or series does not converge."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class QuadratureError(BetapotError, ArithmeticError):
    """Quadrature did not reach the requested tolerance within its budget."""

    def __init__(self, message: str, best_estimate: float, achieved: float):
        super().__init__(f"{message} (best={best_estimate:.6g}, achieved err={achieved:.3g})")
        self.best_estimate = best_estimate
        self.achieved = achieved


class SingularPointError(DomainError):
    """A field was evaluated exactly at a declared singularity."""
