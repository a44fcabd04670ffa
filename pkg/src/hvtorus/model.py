"""
Pydantic base layer shared by every validated value type.

Provides the frozen base model, the rational field type used in JSON
documents, and the digest helper that stamps CLI artifacts.
"""

import hashlib
from fractions import Fraction
from typing import Annotated, Any, Iterable

from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer

from hvtorus.exactla import format_rational, to_rational


def _coerce_rational(value: Any) -> Fraction:
    if isinstance(value, float):
        raise ValueError("floating-point values are not accepted; use 'p/q' strings")
    try:
        return to_rational(value)
    except TypeError as e:
        raise ValueError(str(e)) from e


RationalValue = Annotated[
    Fraction,
    BeforeValidator(_coerce_rational),
    PlainSerializer(format_rational, return_type=str),
]
"""Rational field: accepts ints, Fractions and ``"p/q"`` strings, dumps ``"p/q"``."""


def generate_digest(values: Iterable[Any]) -> str:
    """
    Generate an MD5 digest from a sequence of values.

    Args:
        values: Values to concatenate (by ``str``) and hash

    Returns:
        32-character hexadecimal MD5 hash string
    """
    concatenated = "".join(str(v) for v in values)
    return hashlib.md5(concatenated.encode("utf-8")).hexdigest()


class FrozenModel(BaseModel):
    """
    Immutable, hashable pydantic model that rejects unknown fields.

    Example:
        class Window(FrozenModel):
            low: int
            high: int

        Window(low=0, high=3).model_dump()
    """

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)
