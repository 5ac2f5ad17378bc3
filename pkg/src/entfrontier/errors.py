"""Exception types raised across the package."""


class EntFrontierError(Exception):
    """Base class for all package errors."""


class InvalidState(EntFrontierError, ValueError):
    """A matrix failed one of the density-matrix invariants.

    ``magnitude`` holds the size of the violation (asymmetry, trace error or
    most negative eigenvalue) so callers can report it.
    """

    invariant = "state"

    def __init__(self, message: str, magnitude: float):
        super().__init__(message)
        self.magnitude = magnitude


class NotHermitian(InvalidState):
    invariant = "hermitian"


class NotUnitTrace(InvalidState):
    invariant = "unit_trace"


class NotPSD(InvalidState):
    invariant = "psd"


class DomainError(EntFrontierError, ValueError):
    """A scalar argument lies outside the domain of the function."""


class RootBracketFailure(EntFrontierError, RuntimeError):
    def __init__(self, message: str, residual_lo: float, residual_hi: float):
        super().__init__(message)
        self.residual_lo = residual_lo
        self.residual_hi = residual_hi


class NonPhysicalCss(EntFrontierError, RuntimeError):
    pass


class ConvergenceFailure(EntFrontierError, RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class RankError(EntFrontierError, ValueError):
    pass


class SearchFailure(EntFrontierError, RuntimeError):
    pass
