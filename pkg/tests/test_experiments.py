"""Tests for the experiment drivers and their reports"""

from fractions import Fraction

import pytest

from hvtorus.constructions import fock, hat_V, induced_laurent, laurent_T
from hvtorus.errors import CaseMismatchError
from hvtorus.experiments import (
    FAIL,
    GROWING,
    INCONCLUSIVE,
    PASS,
    STABILIZED,
    SweepReport,
    decomposition_check,
    ghw_scan,
    growth_experiment,
    heisenberg_irreducibility_probe,
    lowering_nonvanishing_check,
    ray_support_check,
    stabilization_experiment,
    support_properties_check,
    sweep_verdict,
    uniform_bound_check,
    witness_family_rank,
)
from hvtorus.exppoly import RhoSpec, table_from_functions
from hvtorus.gradmod import DimensionTable, ModuleAlgebra, Truncation
from hvtorus.lattice import STANDARD_BASIS, BasisPair, ghw_basis

SMALL = Truncation(depth=1, window=2)


# =============================================================================
# Sweep verdicts
# =============================================================================


@pytest.mark.unit
@pytest.mark.parametrize(
    "series, expected",
    [
        ([[1], [2], [2], [2]], (STABILIZED, 1)),
        ([[3], [3], [3]], (STABILIZED, 0)),
        ([[1, 5], [2, 5], [3, 5]], (GROWING, None)),
        ([[1], [3], [2]], (INCONCLUSIVE, None)),
        ([[2], [2]], (INCONCLUSIVE, None)),
    ],
)
def test_sweep_verdict(series, expected):
    assert sweep_verdict(series) == expected


@pytest.mark.unit
def test_sweep_report_validation():
    table = DimensionTable({(0, 0): 1})
    with pytest.raises(ValueError, match="strictly increasing"):
        SweepReport("window", [2, 2], [table, table], [[1], [1]], INCONCLUSIVE)
    with pytest.raises(ValueError, match="align"):
        SweepReport("window", [1, 2], [table], [[1], [1]], INCONCLUSIVE)


@pytest.mark.unit
def test_sweep_report_rows_and_json():
    table = DimensionTable({(0, 0): 1, (0, -1): 2})
    report = SweepReport("window", [1, 2], [table, table], [[2], [2]], INCONCLUSIVE)
    assert report.rows() == [(1, 0, 0, 1), (1, 0, -1, 2), (2, 0, 0, 1), (2, 0, -1, 2)]
    data = report.to_json()
    assert data["verdict"] == INCONCLUSIVE
    assert data["tables"][0]["rows"][1] == {"offset_b1": 0, "offset_b2": -1, "dim": 2}


# =============================================================================
# Window sweeps
# =============================================================================


@pytest.mark.unit
def test_exp_polynomial_rho_stabilizes(linear_rho):
    report = stabilization_experiment(linear_rho, sweep=(2, 3, 4))
    assert report.verdict == STABILIZED
    assert report.stable_value == [2]
    assert report.stabilized_at == 2


@pytest.mark.unit
def test_finitely_supported_rho_grows(shift_rho):
    report = stabilization_experiment(shift_rho, sweep=(2, 3, 4))
    assert report.verdict == GROWING
    assert report.series == [[5], [7], [9]]


@pytest.mark.slow
def test_stabilization_default_sweep(linear_rho, shift_rho):
    assert stabilization_experiment(linear_rho).verdict == STABILIZED
    assert stabilization_experiment(shift_rho).verdict == GROWING


@pytest.mark.slow
@pytest.mark.parametrize("fixture, top", [("linear_rho", 2), ("constant_rho", 1)])
def test_exp_polynomial_rho_stabilizes_two_levels_down(fixture, top, request):
    report = stabilization_experiment(request.getfixturevalue(fixture), levels=2)
    assert report.verdict == STABILIZED
    assert report.stable_value[0] == top
    assert len(report.stable_value) == 2


@pytest.mark.slow
def test_super_exponential_rho_grows():
    rho = table_from_functions(lambda m: 2 ** (m * m), lambda m: 0, bound=48)
    report = stabilization_experiment(rho)
    assert report.verdict == GROWING


@pytest.mark.unit
def test_sweep_arguments_are_checked(linear_rho):
    with pytest.raises(ValueError, match="at least 3"):
        stabilization_experiment(linear_rho, sweep=(2, 4))
    with pytest.raises(ValueError, match="strictly increasing"):
        stabilization_experiment(linear_rho, sweep=(4, 2, 6))
    with pytest.raises(ValueError, match="levels"):
        stabilization_experiment(linear_rho, levels=0, sweep=(1, 2, 3))


@pytest.mark.unit
def test_growth_is_bounded_below_by_window():
    report = growth_experiment((0, 1, 0, 0), "+", sweep=(1, 2, 3))
    for window, (dim,) in zip(report.values, report.series):
        assert dim >= window


@pytest.mark.slow
def test_growth_verdict():
    report = growth_experiment((0, 1, 0, 0), "+", sweep=(2, 4, 6, 8))
    assert report.verdict == GROWING


@pytest.mark.unit
def test_growth_rejects_level_zero():
    with pytest.raises(CaseMismatchError) as exc_info:
        growth_experiment((0, 0, 1, 1), "+", sweep=(1, 2, 3))
    assert exc_info.value.case == "case (3)"


@pytest.mark.unit
@pytest.mark.parametrize("n", [1, 2, 3])
def test_witness_family_is_independent(n):
    assert witness_family_rank(window=3, n=n) == n


@pytest.mark.unit
def test_witness_family_mirrored_sign():
    assert witness_family_rank(window=2, n=2, epsilon="-") == 2


@pytest.mark.unit
def test_witness_family_bounds():
    with pytest.raises(ValueError):
        witness_family_rank(window=2, n=3)
    with pytest.raises(ValueError):
        witness_family_rank(window=2, n=0)


# =============================================================================
# Probes
# =============================================================================


@pytest.mark.unit
def test_heisenberg_probe_on_fock_modules():
    assert heisenberg_irreducibility_probe(fock("+", 1, depth=4), 1)
    assert heisenberg_irreducibility_probe(fock("-", "1/2", depth=3), Fraction(1, 2))
    assert not heisenberg_irreducibility_probe(fock("+", 0, depth=3), 0)


@pytest.mark.unit
def test_heisenberg_probe_on_laurent_modules(shift_rho):
    assert heisenberg_irreducibility_probe(laurent_T(shift_rho, ModuleAlgebra.E_B1, window=4), 0)
    one_sided = RhoSpec.table(E={1: 1})
    assert not heisenberg_irreducibility_probe(laurent_T(one_sided, ModuleAlgebra.E_B1, window=4), 0)


@pytest.mark.unit
def test_heisenberg_probe_checks_declared_level():
    with pytest.raises(ValueError, match="declared level"):
        heisenberg_irreducibility_probe(fock("+", 1, depth=2), 2)


@pytest.mark.unit
def test_ray_support_check():
    rows = ray_support_check([(-1, 0), (0, 0), (1, 0), (-1, -1), (1, -1)], window_hi=2)
    assert rows[0] == (0, -1, 1, True, True)
    assert rows[1].contiguous is False


@pytest.mark.unit
def test_support_check_passes_on_full_region(zero_rho):
    mod = hat_V(zero_rho, trunc=SMALL)
    full = {(x1, x2): 1 for x1 in range(-2, 3) for x2 in (-1, 0)}
    report = support_properties_check(mod, dims=full)
    assert report.verdict == PASS
    assert report.violations == []
    assert [r.contiguous for r in report.rays] == [True, True]


@pytest.mark.unit
def test_support_check_flags_corrupted_table(zero_rho):
    mod = hat_V(zero_rho, trunc=SMALL)
    holed = {(x1, x2): 1 for x1 in range(-2, 3) for x2 in (-1, 0)}
    holed[(0, -1)] = 0
    report = support_properties_check(mod, dims=holed)
    assert report.verdict == FAIL
    rules = {rule for rule, key, _ in report.violations}
    assert rules == {"complement-up", "support-down"}
    assert all(key == (0, -1) for _, key, _ in report.violations)
    assert report.to_json()["verdict"] == FAIL


@pytest.mark.unit
def test_support_check_in_other_coordinates(zero_rho, skew_basis):
    mod = hat_V(zero_rho, trunc=SMALL)
    report = support_properties_check(mod, b=skew_basis)
    assert len(report.support) == 5


@pytest.mark.unit
@pytest.mark.parametrize("fixture, r", [("shift_rho", 1), ("even_rho", 2)])
def test_decomposition_into_w_summands(fixture, r, request):
    rho = request.getfixturevalue(fixture)
    report = decomposition_check(rho, trunc=Truncation(depth=1, window=4))
    assert report.r == r
    assert len(report.slice_tables) == r
    assert report.disjoint
    assert report.sums_match
    assert report.tables_match
    assert report.verdict == PASS
    assert len(report.rows()) == sum(len(t.rows()) for t in report.slice_tables)


@pytest.mark.unit
def test_decomposition_into_three_summands():
    report = decomposition_check(RhoSpec.table(E={3: 1, -3: 1}))
    assert report.r == 3
    assert report.disjoint
    assert report.sums_match
    assert report.tables_match


@pytest.mark.unit
def test_decomposition_needs_nonzero_rho(zero_rho):
    with pytest.raises(ValueError, match="r >= 1"):
        decomposition_check(zero_rho, trunc=SMALL)


@pytest.mark.unit
def test_ghw_scan_on_trivial_loop_module(zero_rho):
    mod = hat_V(zero_rho, trunc=SMALL)
    hits = ghw_scan(mod, [STANDARD_BASIS])
    assert sorted(h.key for h in hits) == [(-2, 0), (-1, 0), (0, 0), (1, 0)]
    assert all(h.dim == 1 and h.basis == STANDARD_BASIS for h in hits)


@pytest.mark.unit
def test_ghw_scan_finds_top_only_after_change_of_basis():
    mod = induced_laurent(RhoSpec.table(E={1: 1, -1: 1}))
    changed = ghw_scan(mod, [ghw_basis(STANDARD_BASIS)])
    standard = ghw_scan(mod, [STANDARD_BASIS])

    assert ((0, 0), 1) in [(h.key, h.dim) for h in changed]
    assert (0, 0) not in [h.key for h in standard]


@pytest.mark.unit
def test_ghw_scan_needs_full_lattice_action():
    with pytest.raises(ValueError):
        ghw_scan(fock("+", 1, depth=2), [BasisPair(b1=(1, 1), b2=(1, 2))])


@pytest.mark.unit
def test_uniform_bound_on_exp_polynomial_rho(linear_rho):
    rows = uniform_bound_check(hat_V(linear_rho, trunc=SMALL))
    assert [r.key for r in rows] == [(x1, -1) for x1 in range(-2, 3)]
    assert all(r.dim == 2 and r.bound == 3 and r.holds for r in rows)


@pytest.mark.unit
def test_lowering_generators_act_nontrivially(linear_rho):
    mod = hat_V(linear_rho, trunc=SMALL)
    v = {(((), "v0"), 0): Fraction(1)}
    assert lowering_nonvanishing_check(mod, v) == []
