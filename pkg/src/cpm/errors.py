class CPMError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CPMError, ValueError):
    """Input outside the domain of an operation."""


class DegenerateError(DomainError):
    """Coincident or otherwise degenerate geometric input."""


class GeometryError(DomainError):
    pass


class SingularActionError(DomainError):
    pass


class NotAutomorphismError(DomainError):
    """Spectrum not realised by any of the six automorphism families."""


class NotBoundaryTypeError(DomainError):
    """Spectrum is not real and positive, so (lambda, tau) is undefined."""


class UnsupportedClassError(DomainError):
    pass


class InfeasibleChartError(DomainError):
    pass


class RangeError(DomainError):
    pass


class SpecError(CPMError, ValueError):
    """Malformed surface or representation description."""


class ConsistencyError(CPMError, RuntimeError):
    """An internal identity failed; signals a construction bug."""


class ChartOverflowError(CPMError, RuntimeError):
    def __init__(self, msg, deepest=None):
        super().__init__(msg)
        self.deepest = deepest


class NormalizationError(DomainError):
    """Input is not in the standard frame an operation expects."""
