"""Tests for lattice bases, coordinates and cones"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from hvtorus.lattice import (
    STANDARD_BASIS,
    BasisPair,
    ConeMode,
    LatticeVector,
    basis_change_witness,
    compare,
    cone_contains,
    coords,
    det2,
    from_coords,
    ghw_basis,
    greater_or_equal,
    inverse_basis,
    is_zbasis,
    strictly_greater,
)

coordinate = st.integers(min_value=-20, max_value=20)


@pytest.mark.unit
def test_lattice_vector_arithmetic():
    v = LatticeVector(1, 2)
    w = LatticeVector(-3, 1)
    assert v + w == (-2, 3)
    assert v - w == (4, 1)
    assert -v == (-1, -2)
    assert 3 * v == (3, 6)
    assert (v - v).is_zero()


@pytest.mark.unit
def test_is_zbasis_exhaustive():
    """Unimodularity agrees with |det| = 1 for every entry tuple in [-3, 3]."""
    values = range(-3, 4)
    for a, b, c, d in itertools.product(values, repeat=4):
        assert is_zbasis((a, b), (c, d)) == (abs(a * d - b * c) == 1)


@pytest.mark.unit
def test_basis_pair_rejects_non_basis():
    with pytest.raises(ValidationError) as exc_info:
        BasisPair(b1=(2, 0), b2=(0, 1))
    assert "not a Z-basis" in str(exc_info.value)


@pytest.mark.unit
def test_basis_pair_json_form():
    b = BasisPair.model_validate({"b1": [2, 1], "b2": [1, 1]})
    assert b.det == 1
    assert b.to_json() == {"b1": [2, 1], "b2": [1, 1]}


@pytest.mark.unit
def test_coords_examples(skew_basis):
    assert coords((3, 2), skew_basis) == (1, 1)
    assert coords((1, 0), skew_basis) == (1, -1)
    assert coords((5, 7), STANDARD_BASIS) == (5, 7)


@pytest.mark.unit
def test_coords_with_negative_determinant():
    b = BasisPair(b1=(0, 1), b2=(1, 0))
    assert b.det == -1
    assert coords((3, 4), b) == (4, 3)


@pytest.mark.unit
@settings(max_examples=100)
@given(coordinate, coordinate)
def test_coordinate_round_trip(x1, x2):
    for b in (STANDARD_BASIS, BasisPair(b1=(2, 1), b2=(1, 1)), BasisPair(b1=(1, 3), b2=(0, -1))):
        assert coords(from_coords(x1, x2, b), b) == (x1, x2)


@pytest.mark.unit
def test_inverse_basis_inverts_row_matrix(skew_basis):
    inv = inverse_basis(skew_basis)
    (b11, b12), (b21, b22) = skew_basis.b1, skew_basis.b2
    assert b11 * inv.p1 + b12 * inv.p2 == 1
    assert b11 * inv.q1 + b12 * inv.q2 == 0
    assert b21 * inv.p1 + b22 * inv.p2 == 0
    assert b21 * inv.q1 + b22 * inv.q2 == 1


@pytest.mark.unit
def test_cone_modes(skew_basis):
    b1_plus_b2 = (3, 2)
    assert cone_contains(skew_basis, b1_plus_b2, ConeMode.STRICT_POS)
    assert cone_contains(skew_basis, (2, 1), ConeMode.NONNEG)
    assert not cone_contains(skew_basis, (2, 1), ConeMode.STRICT_POS)
    assert cone_contains(skew_basis, (-1, 0), ConeMode.MIXED_Z_N)  # -b1 + b2
    assert not cone_contains(skew_basis, (1, 0), ConeMode.MIXED_Z_N)


@pytest.mark.unit
def test_partial_order():
    assert strictly_greater((2, 3), (1, 2))
    assert not strictly_greater((2, 2), (1, 2))
    assert greater_or_equal((2, 2), (1, 2))
    assert compare((1, 1), (1, 1)) == 0
    assert compare((2, 2), (1, 1)) == 1
    assert compare((0, 0), (1, 1)) == -1
    assert compare((2, 0), (1, 1)) is None
    assert compare((1, 2), (1, 1)) is None


@pytest.mark.unit
def test_derived_bases_are_bases(skew_basis):
    for b in (STANDARD_BASIS, skew_basis):
        g = ghw_basis(b)
        assert g.b1 == b.b1 + b.b2
        assert g.b2 == b.b1 + 2 * b.b2
        w = basis_change_witness(b)
        assert w.b1 == 2 * b.b1 + b.b2
        assert w.b2 == 3 * b.b1 + b.b2
        assert abs(det2(g.b1, g.b2)) == 1
        assert abs(det2(w.b1, w.b2)) == 1
