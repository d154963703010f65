"""
Exception hierarchy for weighted_chi2.

Every error raised on purpose by the package derives from WeightedChi2Error,
and additionally from the builtin it specialises so callers can catch either.
"""


class WeightedChi2Error(Exception):
    """Base class for all package errors."""


class SpecError(WeightedChi2Error, ValueError):
    """Invalid weighted-sum specification, spec document or evaluation grid."""


class DomainError(WeightedChi2Error, ValueError):
    """Argument outside the domain of the function being evaluated."""


class CoincidentPolesError(WeightedChi2Error, ValueError):
    """Two pole weights coincide; the caller must merge them first."""


class CoefficientOverflowError(WeightedChi2Error, OverflowError):
    """A partial-fraction coefficient does not fit in a double."""


class ConvergenceError(WeightedChi2Error, ArithmeticError):
    """An iterative evaluation hit its iteration cap."""


class OracleConvergenceError(ConvergenceError):
    """The inversion oracle could not reach the requested error bound."""
