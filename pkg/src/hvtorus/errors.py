"""
Exception hierarchy for hvtorus.

Input problems are ``ValueError`` subclasses so that callers catching the
built-in keep working; the CLI maps every ``HvtorusError`` to exit code 2.
"""

from typing import Optional


class HvtorusError(Exception):
    """Base class for errors raised by hvtorus."""


class DimensionMismatchError(HvtorusError, ValueError):
    """Vector or matrix shapes are incompatible."""


class ElementParseError(HvtorusError, ValueError):
    """
    Element text could not be parsed.

    Attributes:
        position: Zero-based character offset of the offending token
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class CaseMismatchError(HvtorusError, ValueError):
    """
    Parameters fall outside the classification case a construction requires.

    Attributes:
        case: Label of the violated case, e.g. ``"case (2)"``
    """

    def __init__(self, message: str, case: Optional[str] = None):
        text = f"case mismatch: {message}" if case is None else f"case mismatch [{case}]: {message}"
        super().__init__(text)
        self.case = case


class UnknownGeneratorError(HvtorusError, ValueError):
    """A basis symbol does not act on the given module."""
