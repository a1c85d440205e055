"""Error types shared across the package."""


class FluxjumpError(Exception):
    """Base class for all package errors."""


class DomainError(FluxjumpError):
    """Position outside the spatial domain."""


class StateError(FluxjumpError):
    """State value outside the admissible range."""


class InterfacePointError(FluxjumpError):
    """Pointwise flux evaluation requested at a singular interface position."""


class InterfaceIndexError(FluxjumpError, IndexError):
    """Interface index out of range."""


class UnsupportedCouplingError(FluxjumpError):
    """Coupling requested for fluxes that do not satisfy its shape requirements."""


class CouplingError(FluxjumpError):
    """No admissible interface state pair for the requested data."""


class GermError(FluxjumpError):
    """Invalid germ specification."""


class EmptyGermError(GermError):
    """Dissipativity query on an empty germ."""


class CflError(FluxjumpError):
    """Time step violates the CFL stability bound."""


class SolverError(FluxjumpError):
    """Time stepping failed (non-finite states)."""


class ConvergenceError(FluxjumpError):
    """Operation requires a converged trace sample."""


class GridMismatchError(FluxjumpError):
    """Paired solutions do not share scenario fingerprint and time grid."""


class ScenarioError(FluxjumpError):
    """Scenario file cannot be parsed or validated.

    Carries the offending 1-based line number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
