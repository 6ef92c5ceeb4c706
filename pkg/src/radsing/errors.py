"""Exception hierarchy.

Every error carries a short machine-readable ``kind`` (the class name) and an
``exit_code`` used by the command-line front end.
"""

from __future__ import annotations


class RadsingError(Exception):
    """Base class for all library errors."""

    exit_code = 1

    @property
    def kind(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class InvalidParams(RadsingError, ValueError):
    """Parameter triple violates N >= 1, M > 0, q > 1."""

    exit_code = 64


class ExcludedExponent(InvalidParams):
    """q = 2 is excluded from the theory and from this library."""


class InvalidState(RadsingError, ValueError):
    """A radial state or phase point violates its invariants."""

    exit_code = 64


class CriticalPoint(InvalidState):
    """A transform needing u' != 0 received u' = 0."""


class WrongTag(RadsingError, TypeError):
    """Phase point variant does not match the requested system."""

    exit_code = 64


class SeedRadiusTooLarge(RadsingError, ValueError):
    exit_code = 64


class EventNotBracketed(RadsingError):
    pass


class NotAFixedPoint(RadsingError, ValueError):
    pass


class ComplexEigenvalueSelected(RadsingError, ValueError):
    pass


class WindowViolation(RadsingError, ValueError):
    """Parameters fall outside the hypothesis window of a construction."""

    exit_code = 65


class SeedEscaped(RadsingError):
    pass


class DriftDetected(RadsingError):
    pass


class ContractionFailure(RadsingError):
    pass


class BracketNotFound(RadsingError):
    pass


class NoConvergence(RadsingError):
    pass


class AsymptoteMiss(RadsingError):
    pass


class WindowTooShort(RadsingError, ValueError):
    exit_code = 66


class OrderOverflow(RadsingError, ValueError):
    exit_code = 64


class RadiusTooLarge(RadsingError, ValueError):
    exit_code = 64
