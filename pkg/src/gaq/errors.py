"""Exception hierarchy shared by every gaq module."""

from __future__ import annotations


class GaqError(Exception):
    """Base class for all engine errors."""


class ParseError(GaqError):
    """Malformed DSL text. ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = ""
        if text:
            pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at offset {position}{pointer}")


class UnknownSymbolError(GaqError):
    """An identifier that is neither a coordinate, parameter nor function."""


class SpecError(GaqError):
    """A group or algebra specification is malformed or inconsistent."""


class UnknownSpecError(SpecError):
    """Registry lookup for a name that does not exist."""


class SingularPointError(GaqError):
    """Evaluation landed on the declared singular locus of a chart."""


class NonClosureError(GaqError):
    """A set of vector fields does not close into a Lie algebra."""


class DegreeBoundExceeded(GaqError):
    """A PBW element exceeds the supported polynomial degree."""


class NonPolynomialObstruction(GaqError):
    """An anomaly-scan obstruction is not polynomial in the scanned parameter."""


class RepresentationError(GaqError):
    """Invalid input to a representation routine, e.g. a non-half-integral spin."""
