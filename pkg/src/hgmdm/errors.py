"""Exception and warning types shared across the package."""


class HgmdmError(Exception):
    """Base class for all package errors."""


class ConfigurationError(HgmdmError):
    """A grid, truncation or config field is inconsistent with its contract."""


class DomainError(HgmdmError, ValueError):
    """Argument outside the mathematical domain (r <= 0, bad ordering, ...)."""


class DegenerateRepresentationError(DomainError):
    """lambda = 0 does not label an infinite-dimensional irreducible."""


class InvalidSymbolError(HgmdmError):
    """Symbol does not satisfy the homogeneity required by the operation."""


class TailContaminationError(HgmdmError):
    """Requested mode sits too close to the Hermite truncation edge."""


class NotIntegrableError(HgmdmError):
    """Trace sum over the dual grid diverged beyond the configured threshold."""


class UnderresolvedOscillationError(HgmdmError):
    """A phase frequency exceeds the Nyquist limit of the configured grid.

    Carries the minimal node count that would resolve it.
    """

    def __init__(self, message, required_nodes=None):
        super().__init__(message)
        self.required_nodes = required_nodes


class UnderresolvedDomainWarning(UserWarning):
    """Integrand mass at the quadrature box boundary exceeds the tail threshold."""
