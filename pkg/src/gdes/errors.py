"""Exception types shared across the package."""

from __future__ import annotations


class GdesError(Exception):
    """Base class for all errors raised by this package."""


class InvalidElementError(GdesError, ValueError):
    """An element does not belong to the group it is used with."""


class DimensionError(GdesError, ValueError):
    """Mismatched word lengths, groups, or wire-map widths."""


class WordParseError(GdesError, ValueError):
    """Text could not be parsed as a word; ``position`` is 1-based."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class RangeError(GdesError, ValueError):
    """An integer encoding is outside the representable range."""


class NotInvertibleError(GdesError, ValueError):
    """A wire map that is not a bijection cannot be inverted."""


class SpecValidationError(GdesError, ValueError):
    """A cipher spec, spec document, or embedding failed validation."""


class CapacityError(GdesError, RuntimeError):
    """A brute-force operation would exceed its size guard."""
