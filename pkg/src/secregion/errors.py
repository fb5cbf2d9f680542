"""Exception types shared across the package."""


class SecregionError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrix(SecregionError):
    """Matrix input is malformed (non-square, non-finite entries)."""


class NotPositiveDefinite(SecregionError):
    """A positive-definite matrix was required but not supplied."""


class DimMismatch(SecregionError):
    """Operands have incompatible dimensions."""


class NotAlignable(SecregionError):
    """Channel matrices are not square and invertible."""


class InvalidChannel(SecregionError):
    """A channel invariant is violated; the message names it."""


class DegenerateConstraint(SecregionError):
    """The input power cap S is singular; only strictly positive definite
    caps are supported."""


class InfeasibleCovariance(SecregionError):
    """A covariance allocation violates the PSD or power-cap constraints."""


class InfeasibleTarget(SecregionError):
    """The requested common-rate floor exceeds what the channel supports."""


class UnsupportedDim(SecregionError):
    """Operation is only available at small dimensions."""


class NoCertificate(SecregionError):
    """Multiplier recovery failed: the candidate point is not stationary.

    Carries the recovery residuals in ``residuals`` when available.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals) if residuals else {}


class ParseError(SecregionError):
    """Configuration or solution file could not be parsed."""
