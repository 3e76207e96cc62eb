"""Shared exception types.

The CLI maps these onto its exit codes: invalid input -> 2,
guard violations -> 3, failed mathematical checks -> 1.
"""


class ArrchiError(Exception):
    """Base class for all library errors."""


class InvalidInput(ArrchiError, ValueError):
    """Malformed user data: bad matrix shapes, zero forms, rank deficiency."""


class GuardExceeded(ArrchiError, RuntimeError):
    """An exponential-cost operation refused to run without an explicit override."""


class InconsistentSamples(ArrchiError, ValueError):
    """Sample data admits no quasi-polynomial of the requested period and degree."""


class PeriodNotFound(ArrchiError, ValueError):
    """No period up to the cap fits the sampled values."""


class InvariantViolation(ArrchiError, AssertionError):
    """An internal mathematical invariant failed; indicates a bug, not bad input."""
