"""Exception types shared across the package."""


class PhaselessError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PhaselessError, ValueError):
    """Malformed or out-of-domain input."""


class DomainError(PhaselessError, ValueError):
    """A constant formula was evaluated outside the region where it is defined."""


class CapacityError(PhaselessError):
    """An exact enumeration would exceed its configured size cap."""


class InfeasibleError(PhaselessError):
    """No point satisfies the constraints.

    ``floor`` carries the smallest achievable residual when it is known.
    """

    def __init__(self, message, floor=None):
        super().__init__(message)
        self.floor = floor


class SolverError(PhaselessError):
    """Numerical breakdown inside one of the convex engines."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PreconditionError(PhaselessError, ValueError):
    """The hypothesis of a lemma does not hold, so the lemma does not apply."""


class UnsupportedParameterError(PhaselessError, ValueError):
    """A parameter value the exact path does not support."""
