"""Tests for the algebra: brackets, grading, PBW straightening and text syntax"""

import random
from fractions import Fraction

import pytest

from hvtorus.errors import ElementParseError
from hvtorus.hvr2 import (
    D,
    E,
    K,
    LieElement,
    PBWOrder,
    Subalgebra,
    T,
    bidegree,
    bracket,
    bracket_terms,
    e_sym,
    f_of,
    format_element,
    h_of,
    in_subalgebra,
    jacobi_defect,
    k_sym,
    level_of,
    parse_element,
    pbw_normal_form,
    symbol_pool,
    t_sym,
    triangular_part,
    twisted_derivation,
)
from hvtorus.lattice import from_coords


def random_element(rng, pool, max_terms=2):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        terms[rng.choice(pool)] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return LieElement(terms)


# =============================================================================
# Elements
# =============================================================================


@pytest.mark.unit
def test_zero_coefficients_and_zero_degree_are_dropped():
    x = LieElement({e_sym((1, 0)): 0, k_sym(1): 2})
    assert len(x) == 1
    assert (E(0, 0) + T(0, 0)).is_zero()
    assert not LieElement.zero()


@pytest.mark.unit
def test_element_arithmetic():
    x = E(1, 0) + 2 * T(0, 1)
    assert x - x == LieElement.zero()
    assert (x * Fraction(1, 2)).coefficient(t_sym((0, 1))) == 1
    assert -x == (-1) * x


@pytest.mark.unit
def test_basis_symbol_constructors_reject_degenerate_input():
    with pytest.raises(ValueError):
        e_sym((0, 0))
    with pytest.raises(ValueError):
        t_sym((0, 0))
    with pytest.raises(ValueError):
        k_sym(5)
    with pytest.raises(ValueError):
        D(3)


@pytest.mark.unit
def test_central_combinations():
    assert h_of((1, 0)) == K(1)
    assert f_of((0, 0)).is_zero()
    assert f_of((2, -3)) == 2 * K(3) - 3 * K(4)
    assert h_of((1, 2)) + h_of((2, -2)) == h_of((3, 0))


# =============================================================================
# Brackets
# =============================================================================


@pytest.mark.unit
@pytest.mark.parametrize(
    "x, y, expected",
    [
        (T(1, 0), E(0, 1), -T(1, 1)),
        (E(1, 2), E(3, 4), 2 * E(4, 6)),
        (E(1, 0), E(-1, 0), K(3)),
        (E(0, 2), E(0, -2), 2 * K(4)),
        (T(0, 1), E(0, -1), K(2)),
        (E(0, -1), T(0, 1), -K(2)),
        (T(3, 1), E(-3, -1), 3 * K(1) + K(2)),
        (D(1), E(3, 5), 3 * E(3, 5)),
        (E(3, 5), D(2), -5 * E(3, 5)),
        (D(2), T(1, -4), -4 * T(1, -4)),
        (K(1), E(5, 5), LieElement.zero()),
        (T(1, 1), T(2, 3), LieElement.zero()),
        (D(1), D(2), LieElement.zero()),
        (E(2, 2), E(1, 1), LieElement.zero()),
    ],
)
def test_structure_constants(x, y, expected):
    assert bracket(x, y) == expected


@pytest.mark.unit
def test_bracket_is_bilinear():
    x = E(1, 0) + 2 * T(0, 1)
    y = E(0, 1) - D(1)
    expected = bracket(E(1, 0), E(0, 1)) - bracket(E(1, 0), D(1)) + 2 * (
        bracket(T(0, 1), E(0, 1)) - bracket(T(0, 1), D(1))
    )
    assert bracket(x, y) == expected


@pytest.mark.unit
def test_bracket_terms_are_cached_tuples():
    terms = bracket_terms(e_sym((1, 2)), e_sym((3, 4)))
    assert terms == ((e_sym((4, 6)), Fraction(2)),)
    assert bracket_terms(e_sym((1, 2)), e_sym((3, 4))) is terms


@pytest.mark.unit
def test_antisymmetry_on_random_pairs():
    rng = random.Random(7)
    pool = symbol_pool(3)
    for _ in range(300):
        x = random_element(rng, pool)
        y = random_element(rng, pool)
        assert bracket(x, y) == -bracket(y, x)
        assert bracket(x, x).is_zero()


@pytest.mark.unit
def test_jacobi_identity_on_random_triples():
    rng = random.Random(20240)
    pool = symbol_pool(3)
    for _ in range(1000):
        x, y, z = (random_element(rng, pool) for _ in range(3))
        assert jacobi_defect(x, y, z).is_zero(), (x, y, z)


@pytest.mark.unit
def test_jacobi_defect_detects_broken_bracket():
    def broken(x, y):
        out = bracket(x, y)
        if x == E(1, 0) and y == E(-1, 0):
            out = out + K(1)
        return out

    defect = jacobi_defect(D(1), E(1, 0), E(-1, 0), broken)
    assert not defect.is_zero()


# =============================================================================
# Grading
# =============================================================================


@pytest.mark.unit
def test_bidegree_in_skew_basis(skew_basis):
    assert bidegree(e_sym((3, 2)), skew_basis) == (1, 1)
    assert level_of(t_sym((1, 1)), skew_basis) == 1
    assert bidegree(k_sym(2), skew_basis) == (0, 0)


@pytest.mark.unit
def test_triangular_part():
    split = triangular_part(E(0, 1) + E(1, 0) + T(0, -2) + K(1))
    assert split.plus == E(0, 1)
    assert split.zero == E(1, 0) + K(1)
    assert split.minus == T(0, -2)


@pytest.mark.unit
@pytest.mark.parametrize(
    "x, which, expected",
    [
        (E(5, 0) + T(-1, 0) + K(1), Subalgebra.H_B1, True),
        (E(0, 1), Subalgebra.H_B1, False),
        (E(2, 0) + K(3), Subalgebra.E_B1, True),
        (E(2, 0) + K(4), Subalgebra.E_B1, False),
        (T(2, 0), Subalgebra.E_B1, False),
        (T(1, 0), Subalgebra.T_B1, True),
        (T(1, 0) + K(1), Subalgebra.T_B1, False),
        (E(1, 1) + K(3), Subalgebra.E_SCRIPT, True),
        (T(1, 1), Subalgebra.E_SCRIPT, False),
        (E(1, 0) + T(-1, 0) + K(1), Subalgebra.HEIS_PLUS, True),
        (E(-1, 0), Subalgebra.HEIS_PLUS, False),
        (E(-1, 0) + T(1, 0), Subalgebra.HEIS_MINUS, True),
        (D(1), Subalgebra.H_B1, False),
    ],
)
def test_subalgebra_membership(x, which, expected):
    assert in_subalgebra(x, which) is expected


@pytest.mark.unit
def test_twisted_derivation_reads_coordinates(skew_basis):
    m = from_coords(2, -3, skew_basis)
    x = E(m.m1, m.m2)
    assert bracket(twisted_derivation(1, skew_basis), x) == 2 * x
    assert bracket(twisted_derivation(2, skew_basis), x) == -3 * x
    with pytest.raises(ValueError):
        twisted_derivation(3)


# =============================================================================
# PBW straightening
# =============================================================================


@pytest.mark.unit
def test_single_inversion_straightens_with_commutator():
    a, b = e_sym((1, -1)), e_sym((0, -1))
    result = pbw_normal_form([a, b])
    assert result == {(b, a): Fraction(1), (e_sym((1, -2)),): Fraction(1)}


@pytest.mark.unit
def test_sorted_word_is_fixed():
    order = PBWOrder()
    word = sorted([t_sym((2, -1)), e_sym((0, -2)), e_sym((-1, -1))], key=order.key)
    assert pbw_normal_form(word) == {tuple(word): Fraction(1)}


@pytest.mark.unit
def test_straightening_schedules_agree():
    rng = random.Random(3)
    pool = [
        sym
        for m1 in range(-2, 3)
        for m2 in (-1, -2)
        for sym in (e_sym((m1, m2)), t_sym((m1, m2)))
    ]
    for _ in range(60):
        word = [rng.choice(pool) for _ in range(rng.randint(2, 4))]
        leftmost = pbw_normal_form(word, schedule="leftmost")
        assert pbw_normal_form(word, schedule="rightmost") == leftmost
        assert pbw_normal_form(word, schedule="insertion") == leftmost


@pytest.mark.unit
def test_straightening_in_positive_part_of_skew_basis(skew_basis):
    word = [e_sym((3, 2)), e_sym((1, 1)), t_sym((4, 3))]
    left = pbw_normal_form(word, basis=skew_basis)
    assert pbw_normal_form(word, basis=skew_basis, schedule="insertion") == left


@pytest.mark.unit
def test_straightening_rejects_non_terminating_input():
    with pytest.raises(ValueError, match="non-terminating"):
        pbw_normal_form([e_sym((0, -1)), e_sym((0, 1))])
    with pytest.raises(ValueError, match="non-terminating"):
        pbw_normal_form([e_sym((1, 0))])
    with pytest.raises(ValueError, match="non-terminating"):
        pbw_normal_form([k_sym(1), e_sym((0, -1))])
    with pytest.raises(ValueError):
        pbw_normal_form([e_sym((0, -1))], schedule="random")
    with pytest.raises(ValueError):
        pbw_normal_form([e_sym((0, -1))], order=PBWOrder().key, schedule="insertion")


@pytest.mark.unit
def test_left_multiply_caches_products():
    order = PBWOrder()
    mono = (e_sym((0, -1)),)
    first = order.left_multiply(e_sym((1, -1)), mono)
    size = order.cache_size()
    assert order.left_multiply(e_sym((1, -1)), mono) is first
    assert order.cache_size() == size
    with pytest.raises(ValueError):
        PBWOrder(axis=3)


@pytest.mark.unit
def test_pbw_order_along_first_axis():
    order = PBWOrder(axis=1)
    assert order.level(e_sym((-2, 5))) == -2
    assert order.key(e_sym((-1, 3))) < order.key(e_sym((-2, 0)))


# =============================================================================
# Text syntax
# =============================================================================


@pytest.mark.unit
def test_parse_and_format():
    x = parse_element("3/2*E[1,0] - t[0,-1] + K3 + d1")
    assert x == Fraction(3, 2) * E(1, 0) - T(0, -1) + K(3) + D(1)
    assert format_element(x) == "3/2*E[1,0] - 1*t[0,-1] + 1*K3 + 1*d1"
    assert parse_element(format_element(x)) == x


@pytest.mark.unit
def test_format_zero_and_cancellation():
    assert format_element(parse_element("E[1,0] - E[1,0]")) == "0"
    assert str(bracket(T(1, 0), E(0, 1))) == "-1*t[1,1]"


@pytest.mark.unit
@pytest.mark.parametrize(
    "text, position",
    [
        ("x", 0),
        ("E[1 0]", 4),
        ("3", 0),
        ("E[0,0]", 0),
        ("E[1,0] t[0,1]", 7),
        ("K5", 1),
        ("1/0*E[1,0]", 2),
    ],
)
def test_parse_errors_carry_position(text, position):
    with pytest.raises(ElementParseError) as exc_info:
        parse_element(text)
    assert exc_info.value.position == position


@pytest.mark.unit
def test_parse_empty_expression():
    with pytest.raises(ElementParseError, match="empty"):
        parse_element("   ")
