"""Exception hierarchy shared by every module of the package."""


class PlanarARError(Exception):
    """Base class for all errors raised by planar_ar."""


class ParameterDomainError(PlanarARError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NonstationaryError(ParameterDomainError):
    """The coefficients admit no stationary solution (D <= 0)."""


class NotCausalError(ParameterDomainError):
    """The operation requires all four factors f1..f4 to be positive."""


class IllConditionedError(ParameterDomainError):
    """Moment inversion denominators are numerically zero."""


class InconsistentAcfError(ParameterDomainError):
    """Autocovariance values that no stationary model can produce."""


class LagRangeError(PlanarARError, IndexError):
    """A requested lag lies outside the available window."""


class InternalInvariantError(PlanarARError, RuntimeError):
    """A mathematical guarantee failed to hold; indicates a bug."""


class TruncationError(PlanarARError):
    """A truncated expansion cannot meet the requested tolerance within its size cap."""


class InputFormatError(PlanarARError, ValueError):
    """A file or flag could not be parsed into the expected structure."""
