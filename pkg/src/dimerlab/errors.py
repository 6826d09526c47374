"""Exception hierarchy shared by the dimerlab modules."""

from __future__ import annotations


class DimerlabError(Exception):
    """Base class for all dimerlab errors."""


class DimensionTooLarge(DimerlabError):
    pass


class EnumerationCapExceeded(DimerlabError):
    pass


class MalformedSuperposition(DimerlabError):
    pass


class ParityViolation(DimerlabError):
    pass


class PrecisionInsufficient(DimerlabError):
    """Raised when a value that should be an integer is not close enough to one.

    ``gap`` is the measured distance to the nearest integer and ``precision``
    the working precision (bits) that produced it.
    """

    def __init__(self, message: str, gap=None, precision: int | None = None):
        super().__init__(message)
        self.gap = gap
        self.precision = precision


class DomainError(DimerlabError, ValueError):
    pass


class ConvergenceFailure(DimerlabError):
    pass
