"""Tests for truncated graded modules, slices and dimension tables"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from hvtorus.errors import UnknownGeneratorError
from hvtorus.gradmod import (
    DimensionTable,
    ModuleAlgebra,
    Region,
    TruncatedModule,
    Truncation,
    Weight,
    act,
    annihilation_bound,
    check_support_closure,
    commutator_defect,
    dimension_table,
    generated_submodule,
    interior_keys,
    is_ghw_vector,
    quotient_dims,
    quotient_module,
    radical,
    require_two_dimensional,
    restrict,
    support,
    support_keys,
    top_space_seeds,
)
from hvtorus.hvr2 import E, K, LieElement, d_sym, e_sym, k_sym, t_sym
from hvtorus.lattice import STANDARD_BASIS, LatticeVector

UP = e_sym((0, 1))
DOWN = e_sym((0, -1))


def toy_module(coupling=2, algebra=ModuleAlgebra.L, levels=(0, 0, 0, 2), **kwargs):
    """Top vector a; level -1 spanned by b = E(0,-1) a and an inert vector c."""

    def provider(symbol, label):
        if symbol == DOWN and label == "a":
            return {"b": 1}
        if symbol == UP and label == "b":
            return {"a": coupling}
        return {}

    return TruncatedModule(
        basis=STANDARD_BASIS,
        spaces={(0, 0): ["a"], (0, -1): ["b", "c"]},
        provider=provider,
        algebra=algebra,
        levels=levels,
        name="toy",
        **kwargs,
    )


# =============================================================================
# Value types
# =============================================================================


@pytest.mark.unit
def test_truncation_defaults_raising_bound_to_twice_window():
    assert Truncation(depth=2, window=3).raising_bound == 6
    assert Truncation.model_validate({"depth": 1, "window": 2, "raising_bound": None}).raising_bound == 4
    assert Truncation(depth=1, window=2, raising_bound=9).raising_bound == 9


@pytest.mark.unit
def test_truncation_validation():
    with pytest.raises(ValidationError):
        Truncation(depth=-1, window=2)
    with pytest.raises(ValidationError):
        Truncation(depth=1, window=-2)
    with pytest.raises(ValidationError, match="raising_bound"):
        Truncation(depth=1, window=4, raising_bound=3)


@pytest.mark.unit
def test_weight_equality_uses_base_plus_offset():
    w1 = Weight(base=("1/2", 0), offset=LatticeVector(1, 0))
    w2 = Weight(base=("3/2", 0), offset=LatticeVector(0, 0))
    assert w1 == w2
    assert hash(w1) == hash(w2)
    assert w1.value == (Fraction(3, 2), Fraction(0))


@pytest.mark.unit
def test_region_contains():
    r = Region(-1, 1, -2, 0)
    assert r.contains((1, -2))
    assert not r.contains((2, 0))


# =============================================================================
# TruncatedModule
# =============================================================================


@pytest.mark.unit
def test_module_bases():
    mod = toy_module()
    assert mod.keys() == [(0, 0), (0, -1)]
    assert mod.dim((0, -1)) == 2
    assert mod.dim((5, 5)) == 0
    assert mod.total_dim() == 3
    assert "c" in mod
    assert mod.locate("c") == ((0, -1), 1)
    assert mod.level_keys(-1) == [(0, -1)]
    assert mod.to_dense((0, -1), {"c": Fraction(3)}) == [0, 3]
    assert mod.from_dense((0, -1), [0, 3]) == {"c": 3}
    assert mod.split({"a": Fraction(1), "c": Fraction(2)}) == {(0, 0): [1], (0, -1): [0, 2]}


@pytest.mark.unit
def test_module_constructor_validation():
    with pytest.raises(ValueError, match="grading"):
        toy_module(grading="weird")
    with pytest.raises(ValueError, match="appears twice"):
        TruncatedModule(
            basis=STANDARD_BASIS,
            spaces={(0, 0): ["a"], (0, -1): ["a"]},
            provider=lambda symbol, label: {},
            algebra=ModuleAlgebra.L,
        )
    mod = toy_module()
    with pytest.raises(ValueError):
        mod.locate("z")
    with pytest.raises(ValueError):
        mod.to_dense((0, 0), {"b": Fraction(1)})


@pytest.mark.unit
def test_empty_spaces_are_dropped():
    mod = TruncatedModule(
        basis=STANDARD_BASIS,
        spaces={(0, 0): ["a"], (3, -1): []},
        provider=lambda symbol, label: {},
        algebra=ModuleAlgebra.L,
    )
    assert mod.keys() == [(0, 0)]


@pytest.mark.unit
def test_action_matrix_and_images_are_cached():
    mod = toy_module()
    m = mod.action_matrix(DOWN, (0, 0))
    assert m.to_dense() == [[1], [0]]
    assert mod.action_matrix(DOWN, (0, 0)) is m
    assert mod.image(UP, "b") == {"a": 2}
    assert mod.image(UP, "a") == {}
    assert mod.cache_info()["matrices"] == 1


@pytest.mark.unit
def test_central_and_derivation_actions():
    mod = toy_module(algebra=ModuleAlgebra.L0, levels=(1, 2, 3, 4), base=(Fraction(1, 2), 0))
    assert mod.image(k_sym(2), "a") == {"a": 2}
    assert mod.image(d_sym(1), "a") == {"a": Fraction(1, 2)}
    assert mod.image(d_sym(2), "b") == {"b": -1}
    with pytest.raises(UnknownGeneratorError):
        mod.image(DOWN, "a")


@pytest.mark.unit
def test_derivations_do_not_act_without_them():
    mod = toy_module()
    assert not mod.supports(d_sym(1))
    with pytest.raises(UnknownGeneratorError):
        act(mod, LieElement.of(d_sym(1)), {"a": Fraction(1)})


@pytest.mark.unit
def test_act_drops_images_outside_truncation():
    mod = toy_module()
    assert act(mod, E(0, -1), {"b": Fraction(1)}) == {}
    assert act(mod, E(0, -1) + 3 * K(4), {"a": Fraction(1)}) == {"b": 1, "a": 6}


@pytest.mark.unit
def test_commutator_defect_vanishes_when_levels_match_coupling():
    v = {"a": Fraction(1)}
    assert commutator_defect(toy_module(coupling=2), E(0, 1), E(0, -1), v) == {}
    assert commutator_defect(toy_module(coupling=1), E(0, 1), E(0, -1), v) == {"a": 1}


@pytest.mark.unit
def test_candidate_and_raising_symbols():
    mod = toy_module()
    assert set(mod.symbols_from((0, 0))) == {DOWN, t_sym((0, -1))}
    assert set(mod.raising_symbols((0, -1))) == {UP, t_sym((0, 1))}
    assert mod.raising_symbols((0, 0)) == []


# =============================================================================
# Slices
# =============================================================================


@pytest.mark.unit
def test_radical_with_nonzero_coupling():
    rad = radical(toy_module(coupling=2))
    assert rad.dim_at((0, 0)) == 0
    assert rad.dim_at((0, -1)) == 1
    assert rad.contains((0, -1), [0, 1])
    assert not rad.contains((0, -1), [1, 0])
    assert rad.quotient_dim((0, -1)) == 1


@pytest.mark.unit
def test_radical_with_zero_coupling():
    rad = radical(toy_module(coupling=0))
    assert rad.dim_at((0, -1)) == 2
    assert quotient_dims(rad.module, rad).dims == {(0, 0): 1, (0, -1): 0}


@pytest.mark.unit
def test_radical_rejects_keys_above_top():
    mod = TruncatedModule(
        basis=STANDARD_BASIS,
        spaces={(0, 1): ["z"]},
        provider=lambda symbol, label: {},
        algebra=ModuleAlgebra.L,
    )
    with pytest.raises(ValueError, match="above its top level"):
        radical(mod)


@pytest.mark.unit
def test_generated_submodule_and_restriction():
    mod = toy_module()
    piece = generated_submodule(mod, top_space_seeds(mod))
    assert piece.dims() == {(0, 0): 1, (0, -1): 1}
    assert not piece.is_full()
    sub = restrict(mod, piece)
    assert sub.total_dim() == 2
    assert act(sub, E(0, 1), {"b": Fraction(1)}) == {"a": 2}


@pytest.mark.unit
def test_generated_submodule_respects_symbol_filter():
    mod = toy_module()
    piece = generated_submodule(mod, [{"a": Fraction(1)}], symbols=[t_sym((0, -1))])
    assert piece.dims() == {(0, 0): 1, (0, -1): 0}


@pytest.mark.unit
def test_slice_sum_and_intersection():
    mod = toy_module()
    top = generated_submodule(mod, [{"a": Fraction(1)}])
    inert = generated_submodule(mod, [{"c": Fraction(1)}])
    assert (top + inert).is_full()
    assert top.intersect(inert).is_zero()
    assert inert.total_dim() == 1


@pytest.mark.unit
def test_quotient_module_acts_on_classes():
    mod = toy_module()
    quotient = quotient_module(mod, radical(mod))
    assert dimension_table(quotient).dims == {(0, 0): 1, (0, -1): 1}
    assert act(quotient, E(0, -1), {"a": Fraction(1)}) == {"b": 1}
    assert radical(quotient).dim_at((0, -1)) == 0


# =============================================================================
# Dimension tables and supports
# =============================================================================


@pytest.mark.unit
def test_dimension_table_operations():
    table = DimensionTable({(0, 0): 1, (1, -1): 2, (-1, -1): 3, (2, -2): 0})
    assert table.rows() == [(0, 0, 1), (-1, -1, 3), (1, -1, 2), (2, -2, 0)]
    assert table.level_dims(2) == [1, 5, 0]
    assert table.at((1, -1)) == 2
    assert table.at((9, 9)) == 0
    assert table.shifted(2).at((3, -1)) == 2
    assert table.restricted([(0, 0)]).dims == {(0, 0): 1}
    assert table.support() == {(0, 0), (1, -1), (-1, -1)}
    assert table.to_json()["rows"][0] == {"offset_b1": 0, "offset_b2": 0, "dim": 1}


@pytest.mark.unit
def test_level_dims_along_first_axis_mirrored():
    table = DimensionTable({(0, 0): 1, (1, 0): 1, (2, 7): 2})
    assert table.level_dims(2, axis=1, orientation=-1) == [1, 1, 2]


@pytest.mark.unit
def test_support_inside_region():
    mod = toy_module(region=Region(0, 0, 0, 0))
    rad = radical(mod)
    assert support_keys(mod, rad) == {(0, 0)}
    assert support(mod) == {Weight()}


@pytest.mark.unit
def test_interior_keys():
    mod = toy_module()
    assert interior_keys(mod, [UP]) == [(0, 0), (0, -1)]
    assert interior_keys(mod, [DOWN]) == [(0, 0)]


@pytest.mark.unit
def test_ghw_vectors_and_annihilation_bound():
    mod = toy_module()
    assert is_ghw_vector(mod, {"a": Fraction(1)})
    assert is_ghw_vector(mod, {"c": Fraction(1)})
    assert not is_ghw_vector(mod, {"b": Fraction(1)})
    assert annihilation_bound(mod, {"b": Fraction(1)}) == 1
    assert annihilation_bound(mod, {}) == 1


@pytest.mark.unit
def test_ghw_checks_need_two_dimensional_action():
    mod = toy_module(algebra=ModuleAlgebra.H_B1)
    with pytest.raises(ValueError, match="full lattice action"):
        require_two_dimensional(mod)
    with pytest.raises(ValueError):
        is_ghw_vector(mod, {"a": Fraction(1)})


@pytest.mark.unit
def test_support_closure_accepts_lower_set():
    region = [(x, y) for x in range(3) for y in range(3)]
    lower = [(x, y) for x, y in region if x + y <= 1]
    assert check_support_closure(lower, region) == []


@pytest.mark.unit
def test_support_closure_reports_violations():
    region = [(x, y) for x in range(3) for y in range(3)]
    holed = [(x, y) for x, y in region if x + y <= 1 and (x, y) != (0, 0)]
    violations = check_support_closure(holed, region)
    rules = {v.rule for v in violations}
    assert rules == {"complement-up", "support-down"}
    assert all(v.key == (0, 0) for v in violations)
