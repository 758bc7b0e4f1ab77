"""Exception hierarchy shared across the package."""


class SectorBoundError(Exception):
    """Base class for all package errors."""


class ValidationError(SectorBoundError):
    """Raised when an input violates a structural invariant."""


class ConfigError(SectorBoundError):
    """Raised for malformed or schema-violating configuration documents."""


class SolverFailure(SectorBoundError):
    """Raised when the conic solver cannot produce a trustworthy answer."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class AllInfeasible(SectorBoundError):
    """Raised when no point of the tau1 search grid admits a certificate."""


class IntegrationError(SectorBoundError):
    """Raised when the master-equation integrator detects NaN or overflow."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
