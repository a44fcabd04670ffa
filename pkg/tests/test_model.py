"""
Basic tests for the pydantic base layer
"""

from fractions import Fraction
from typing import Optional

import pytest
from pydantic import ValidationError

from hvtorus.model import FrozenModel, RationalValue, generate_digest


class Sample(FrozenModel):
    """Test model for unit tests"""

    value: RationalValue
    note: Optional[str] = None


@pytest.mark.unit
def test_generate_digest():
    """Test digest generation"""
    digest = generate_digest(["a", 1, Fraction(1, 2)])

    assert digest == generate_digest(["a1", "1/2"])
    assert digest != generate_digest(["a", 2, Fraction(1, 2)])
    assert len(digest) == 32
    assert generate_digest([]) == "d41d8cd98f00b204e9800998ecf8427e"


@pytest.mark.unit
@pytest.mark.parametrize(
    "raw, expected",
    [(3, Fraction(3)), ("-2/6", Fraction(-1, 3)), (Fraction(5, 7), Fraction(5, 7)), (" 4 ", Fraction(4))],
)
def test_rational_value_accepts_exact_input(raw, expected):
    """Test the accepted rational encodings"""
    assert Sample(value=raw).value == expected


@pytest.mark.unit
@pytest.mark.parametrize("raw", [0.5, "1/0", "one", True])
def test_rational_value_rejects_inexact_input(raw):
    """Test that floats and malformed strings are rejected"""
    with pytest.raises(ValidationError):
        Sample(value=raw)


@pytest.mark.unit
def test_rational_value_serializes_as_string():
    """Test that rationals dump as p/q strings"""
    sample = Sample(value="3/4")

    assert sample.model_dump(mode="json") == {"value": "3/4", "note": None}
    assert Sample.model_validate_json(sample.model_dump_json()) == sample


@pytest.mark.unit
def test_frozen_model_is_immutable_and_hashable():
    """Test frozen behavior"""
    sample = Sample(value=1)

    with pytest.raises(ValidationError):
        sample.value = Fraction(2)
    assert hash(sample) == hash(Sample(value="1"))


@pytest.mark.unit
def test_frozen_model_rejects_unknown_fields():
    """Test extra field handling"""
    with pytest.raises(ValidationError, match="extra"):
        Sample(value=1, other=2)
