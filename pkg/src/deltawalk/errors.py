"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` so that the CLI can
emit a structured error object without parsing messages.
"""

from __future__ import annotations


class DeltaWalkError(Exception):
    """Base class for all library errors."""

    code = "error"

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


class ConfigurationError(DeltaWalkError, ValueError):
    """Invalid solver or quadrature settings."""

    code = "configuration"


class ParameterError(DeltaWalkError, ValueError):
    """Model parameters violate their invariants (e.g. non-positive hopping)."""

    code = "parameter"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field

    def to_dict(self) -> dict:
        out = super().to_dict()
        if self.field is not None:
            out["field"] = self.field
        return out


class DomainError(DeltaWalkError, ValueError):
    """Argument outside the domain where the quantity is defined."""

    code = "domain"


class IntegrandEvaluationError(DeltaWalkError, ArithmeticError):
    """The integrand returned a non-finite value at a quadrature node."""

    code = "integrand"

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class UndefinedPhaseError(DomainError):
    """The phase of a vanishing complex hopping amplitude was requested."""

    code = "undefined_phase"


class NoSolutionError(DeltaWalkError):
    """The dispersion equation has no root for the requested target."""

    code = "no_solution"


class NotSquareIntegrableError(DeltaWalkError):
    """A band-edge eigenfunction candidate is not in l2."""

    code = "not_square_integrable"


class NoEigenfunctionError(DeltaWalkError):
    """No bound state exists for the given parameters."""

    code = "no_eigenfunction"


class ResourceError(DeltaWalkError, MemoryError):
    """A request exceeds the configured memory or evaluation budget."""

    code = "resource"


class ConvergenceError(DeltaWalkError, ArithmeticError):
    """An iterative method failed to reach its tolerance."""

    code = "convergence"

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual

    def to_dict(self) -> dict:
        out = super().to_dict()
        if self.best_residual is not None:
            out["best_residual"] = self.best_residual
        return out
