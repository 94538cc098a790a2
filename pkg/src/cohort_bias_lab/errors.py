"""Exception types raised across the package."""


class CohortBiasError(Exception):
    """Base class for all package errors."""


class DomainError(CohortBiasError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateInputError(DomainError):
    """Inputs are valid individually but make the result undefined."""


class ValidationError(CohortBiasError, ValueError):
    """A data structure violates one of its invariants."""


class UnsupportedError(CohortBiasError, NotImplementedError):
    """A model feature that is deliberately not implemented."""


class RiskKeyError(CohortBiasError, KeyError):
    """A (sex, cause) pair is missing from a relative-risk table."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown risk key"


class SingularFitError(CohortBiasError, ValueError):
    """The regressor has zero variance, so the line is not identified."""
