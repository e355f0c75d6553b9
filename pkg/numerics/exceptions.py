"""Errors and warnings raised across the emcap apps."""


class EmcapError(Exception):
    """Base class for every emcap error"""


class DomainError(EmcapError, ValueError):
    """An argument lies outside the domain of the operation"""


class SingularityError(DomainError):
    """Evaluation requested exactly at a kernel singularity"""


class BranchPointError(SingularityError):
    """Evaluation at the branch point |kappa| = kappa0 of the line spectrum"""


class BracketError(DomainError):
    """A root bracket without a sign change"""


class GridError(DomainError):
    """A sampling grid that is too narrow or lands on a singularity"""


class NotPositiveSemidefiniteError(DomainError):
    """A kernel or matrix expected to be PSD has a negative eigenvalue"""


class ShapeError(EmcapError, ValueError):
    """Operands defined on different grids or with mismatched dimensions"""


class AccuracyError(EmcapError, ArithmeticError):
    """
    A numerical procedure failed to reach its tolerance.

    The best estimate and its error bound are kept so that callers can
    decide whether the result is still usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConditioningError(AccuracyError):
    """A covariance matrix too ill-conditioned to factorize reliably"""


class ResolutionWarning(RuntimeWarning):
    """A quadrature grid that does not resolve its integrand"""


class TruncationWarning(RuntimeWarning):
    """A truncated infinite construction that has not settled"""
