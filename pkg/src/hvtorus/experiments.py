"""
Experiment drivers.

Each driver builds truncated modules, measures dimensions, and returns a report
carrying the full tables next to its verdict. A finite sweep cannot settle an
infinite statement, so sweep verdicts are three-valued: ``stabilized``,
``growing`` or ``inconclusive``.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from hvtorus.constructions import (
    LevelTuple,
    classify_T_rho,
    extend_to_L0,
    hat_V,
    highest_weight_V_rho,
    induce,
    induced_verma,
    verma_H,
    w_slice,
)
from hvtorus.errors import CaseMismatchError
from hvtorus.exactla import SparseMatrix, kernel_basis, rank
from hvtorus.exppoly import RhoSpec
from hvtorus.gradmod import (
    DimensionTable,
    GradeKey,
    Label,
    ModuleAlgebra,
    TruncatedModule,
    Truncation,
    check_support_closure,
    dimension_table,
    generated_submodule,
    interior_keys,
    radical,
    require_two_dimensional,
    top_space_seeds,
)
from hvtorus.hvr2 import SymbolKind, graded_sym
from hvtorus.lattice import STANDARD_BASIS, BasisPair, ConeMode, cone_contains, coords, from_coords
from hvtorus.runtime import get_context

logger = logging.getLogger(__name__)

STABILIZED = "stabilized"
GROWING = "growing"
INCONCLUSIVE = "inconclusive"
PASS = "pass"
FAIL = "fail"


# ==================== Sweep reports ====================


@dataclass(frozen=True)
class SweepReport:
    """
    Tables measured along a parameter sweep.

    ``series[i]`` holds the observed dimensions at setting ``values[i]`` (one per
    level or sampled key); the verdict is derived from the series.
    """

    parameter: str
    values: List[int]
    tables: List[DimensionTable]
    series: List[List[int]]
    verdict: str
    stabilized_at: Optional[int] = None
    stable_value: Optional[List[int]] = None

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError(f"sweep values must be strictly increasing, got {self.values}")
        if not (len(self.values) == len(self.tables) == len(self.series)):
            raise ValueError("tables and series must align with the sweep values")

    def to_json(self) -> Dict[str, Any]:
        return {
            "parameter": self.parameter,
            "values": list(self.values),
            "series": [list(s) for s in self.series],
            "verdict": self.verdict,
            "stabilized_at": self.stabilized_at,
            "stable_value": self.stable_value,
            "tables": [t.to_json() for t in self.tables],
        }

    def rows(self) -> List[Tuple[int, int, int, int]]:
        """``(setting, offset_b1, offset_b2, dim)`` rows for CSV output."""
        return [(v,) + row for v, t in zip(self.values, self.tables) for row in t.rows()]


def sweep_verdict(series: Sequence[Sequence[int]]) -> Tuple[str, Optional[int]]:
    """
    Classify a sweep.

    Returns:
        ``(STABILIZED, index)`` when the last three settings agree everywhere
        (``index`` is the first of the three), ``(GROWING, None)`` when some
        coordinate strictly increases across every setting, and
        ``(INCONCLUSIVE, None)`` otherwise.
    """
    rows = [tuple(s) for s in series]
    if len(rows) >= 3 and rows[-1] == rows[-2] == rows[-3]:
        return STABILIZED, len(rows) - 3
    if len(rows) >= 2:
        for pos in range(len(rows[0])):
            column = [r[pos] for r in rows]
            if all(b > a for a, b in zip(column, column[1:])):
                return GROWING, None
    return INCONCLUSIVE, None


def _report(
    parameter: str,
    values: Sequence[int],
    measured: Sequence[Tuple[DimensionTable, List[int]]],
) -> SweepReport:
    series = [s for _, s in measured]
    verdict, at = sweep_verdict(series)
    logger.info("%s sweep %s: %s", parameter, list(values), verdict)
    return SweepReport(
        parameter=parameter,
        values=list(values),
        tables=[t for t, _ in measured],
        series=series,
        verdict=verdict,
        stabilized_at=values[at] if at is not None else None,
        stable_value=list(series[at]) if at is not None else None,
    )


def _check_sweep(sweep: Sequence[int], minimum: int = 3) -> List[int]:
    values = list(sweep)
    if len(values) < minimum:
        raise ValueError(f"a sweep needs at least {minimum} settings, got {len(values)}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"sweep must be strictly increasing, got {values}")
    return values


def stabilization_experiment(
    rho: RhoSpec,
    b: BasisPair = STANDARD_BASIS,
    levels: int = 1,
    sweep: Sequence[int] = (4, 8, 12, 16),
) -> SweepReport:
    """
    Quotient dimensions of ``V(rho)`` at levels -1..-levels as the window grows.

    Exp-polynomial rho gives finite weight spaces, so the dimensions stabilize;
    other rho make them grow with the window.
    """
    values = _check_sweep(sweep)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")

    def measure(window: int) -> Tuple[DimensionTable, List[int]]:
        module = highest_weight_V_rho(rho, b, Truncation(depth=levels, window=window))
        dims = [module.dim((0, -lvl)) for lvl in range(1, levels + 1)]
        logger.info("V(rho) at window %d: level dims %s", window, dims)
        return dimension_table(module), dims

    return _report("window", values, get_context().map_ordered(measure, values))


def growth_experiment(
    c: LevelTuple,
    epsilon: str = "+",
    b: BasisPair = STANDARD_BASIS,
    sweep: Sequence[int] = (2, 4, 6, 8),
    lam: Tuple[Any, Any] = (0, 0),
    key: GradeKey = (0, -1),
) -> SweepReport:
    """
    Dimension of the ``lam - b2`` weight of ``M(b1, b2, V^eps(c, lam))`` per window.

    Raises:
        CaseMismatchError: If ``c1 = c2 = 0``
    """
    values = _check_sweep(sweep)
    if Fraction(c[0]) == 0 and Fraction(c[1]) == 0:
        raise CaseMismatchError(
            "growth needs c1 != 0 or c2 != 0; level zero on H_b1 is the T_rho case",
            case="case (3)",
        )

    def measure(window: int) -> Tuple[DimensionTable, List[int]]:
        module = induced_verma(c, epsilon, lam, b, Truncation(depth=1, window=window))
        logger.info("growth at window %d: dim %s = %d", window, key, module.dim(key))
        return dimension_table(module), [module.dim(key)]

    return _report("window", values, get_context().map_ordered(measure, values))


def witness_family_rank(
    window: int,
    n: int,
    c: LevelTuple = (0, 1, 0, 0),
    epsilon: str = "+",
    b: BasisPair = STANDARD_BASIS,
) -> int:
    """
    Rank modulo the radical of ``E(k b1 - b2) t^{-k b1} v0`` for ``k = 1..n``.

    Signs of ``k`` are mirrored for ``epsilon = -``. All vectors sit at the
    ``-b2`` weight.
    """
    if not 1 <= n <= window:
        raise ValueError(f"need 1 <= n <= window, got n={n}, window={window}")
    eps = 1 if epsilon == "+" else -1
    trunc = Truncation(depth=1, window=window)
    inner = verma_H(c, epsilon, b, window)
    module = induce(b, extend_to_L0(inner, (0, 0), b), trunc)
    rows, _ = radical(module).constraint_rows((0, -1))
    vectors = []
    for k in range(1, n + 1):
        lowering = graded_sym(SymbolKind.E, from_coords(eps * k, -1, b))
        label = ((lowering,), ((1, k),))
        vectors.append(module.to_dense((0, -1), {label: Fraction(1)}))
    images = [rows.matvec(v) for v in vectors]
    return rank(SparseMatrix.from_rows(images)) if images else 0


# ==================== Probes ====================


def _f_b1(mod: TruncatedModule) -> Fraction:
    k = mod.levels
    return mod.basis.b1.m1 * k[2] + mod.basis.b1.m2 * k[3]


def heisenberg_irreducibility_probe(mod: TruncatedModule, a: Any) -> bool:
    """
    Irreducibility witness within truncation.

    For ``a != 0`` the radical must vanish and the top space must generate the
    module. For ``a = 0`` (a Laurent module) every basis vector must generate the
    whole truncation.

    Raises:
        ValueError: If ``a`` differs from the level ``f(b1)`` the module carries
    """
    a = Fraction(a)
    if _f_b1(mod) != a:
        raise ValueError(f"{mod.name} has f(b1) = {_f_b1(mod)}, not the declared level {a}")
    total = mod.total_dim()
    if a == 0 and all(mod.level(k) == 0 for k in mod.keys()):
        for key in mod.keys():
            for label in mod.space(key):
                piece = generated_submodule(mod, [mod.basis_vector(label)])
                if piece.total_dim() != total:
                    logger.info("%s: %r generates %d of %d", mod.name, label, piece.total_dim(), total)
                    return False
        return True
    rad = radical(mod)
    if any(rad.dim_at(k) for k in mod.keys()):
        return False
    return generated_submodule(mod, top_space_seeds(mod)).total_dim() == total


class RayRow(NamedTuple):
    level: int
    lo: int
    hi: int
    contiguous: bool
    bounded_above: bool


@dataclass(frozen=True)
class SupportReport:
    violations: List[Tuple[str, GradeKey, GradeKey]]
    rays: List[RayRow]
    support: List[GradeKey]

    @property
    def verdict(self) -> str:
        return PASS if not self.violations and all(r.contiguous for r in self.rays) else FAIL

    def to_json(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "violations": [
                {"rule": rule, "key": list(k), "witness": list(w)} for rule, k, w in self.violations
            ],
            "rays": [r._asdict() for r in self.rays],
            "support": [list(k) for k in self.support],
        }


def ray_support_check(support_keys: Sequence[GradeKey], window_hi: int) -> List[RayRow]:
    """Per-level runs of the support: gap-free, and whether they stop inside the window."""
    by_level: Dict[int, List[int]] = {}
    for x1, x2 in support_keys:
        by_level.setdefault(x2, []).append(x1)
    rows = []
    for level in sorted(by_level, reverse=True):
        xs = sorted(by_level[level])
        contiguous = xs == list(range(xs[0], xs[-1] + 1))
        rows.append(RayRow(level, xs[0], xs[-1], contiguous, xs[-1] < window_hi))
    return rows


def _region_keys(mod: TruncatedModule) -> List[GradeKey]:
    r = mod.region
    return [(x1, x2) for x1 in range(r.x1_lo, r.x1_hi + 1) for x2 in range(r.x2_lo, r.x2_hi + 1)]


def support_properties_check(
    mod: TruncatedModule,
    b: Optional[BasisPair] = None,
    dims: Optional[Mapping[GradeKey, int]] = None,
) -> SupportReport:
    """
    Lower-set properties of the support over the truncation region.

    Keys are re-expressed in the coordinates of ``b`` (default: the module's
    basis). ``dims`` overrides the module's own dimensions.
    """
    basis = b or mod.basis
    table = dims if dims is not None else {k: mod.dim(k) for k in mod.keys()}

    def recoord(key: GradeKey) -> GradeKey:
        return coords(from_coords(key[0], key[1], mod.basis), basis)

    region = [recoord(k) for k in _region_keys(mod)]
    supp = [recoord(k) for k in _region_keys(mod) if table.get(k, 0)]
    violations = check_support_closure(supp, region)
    if violations:
        logger.info("%s: %d support violations", mod.name, len(violations))
    return SupportReport(
        violations=[(v.rule, v.key, v.witness) for v in violations],
        rays=ray_support_check(sorted(supp), max(k[0] for k in region)) if supp else [],
        support=sorted(supp),
    )


@dataclass(frozen=True)
class DecompositionReport:
    r: int
    slice_tables: List[DimensionTable]
    total: DimensionTable
    disjoint: bool
    sums_match: bool
    tables_match: bool

    @property
    def verdict(self) -> str:
        return PASS if self.disjoint and self.sums_match and self.tables_match else FAIL

    def to_json(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "r": self.r,
            "disjoint": self.disjoint,
            "sums_match": self.sums_match,
            "tables_match": self.tables_match,
            "total": self.total.to_json(),
            "slices": [t.to_json() for t in self.slice_tables],
        }

    def rows(self) -> List[Tuple[int, int, int, int]]:
        return [(i,) + row for i, t in enumerate(self.slice_tables) for row in t.rows()]


def decomposition_check(
    rho: RhoSpec, b: BasisPair = STANDARD_BASIS, trunc: Optional[Truncation] = None
) -> DecompositionReport:
    """
    Split ``hat V(rho)`` into ``W(0), ..., W(r-1)`` within truncation.

    Checks pairwise trivial intersections, that slice dimensions add up to the
    whole per weight, and that the ``W(i)`` tables agree after shifting by ``i``.

    Raises:
        ValueError: If rho classifies with ``r = 0``
    """
    trunc = trunc or Truncation(depth=1, window=4)
    r = classify_T_rho(rho, ModuleAlgebra.H_B1, b, trunc.window).r
    if r < 1:
        raise ValueError("decomposition needs r >= 1; rho = 0 gives the trivial T_0")
    loop = hat_V(rho, b, trunc)
    slices = [w_slice(loop, rho, i) for i in range(r)]
    disjoint = all(
        slices[i].intersect(slices[j]).is_zero() for i in range(r) for j in range(i + 1, r)
    )
    sums_match = all(sum(s.dim_at(k) for s in slices) == loop.dim(k) for k in loop.keys())
    tables = [DimensionTable(s.dims(), loop.base) for s in slices]
    n = trunc.window
    tables_match = True
    for i, table in enumerate(tables[1:], start=1):
        shifted = table.shifted(-i)
        keys = [k for k in loop.keys() if -n <= k[0] <= n - i]
        if any(shifted.at(k) != tables[0].at(k) for k in keys):
            tables_match = False
    logger.info("decomposition r=%d: disjoint=%s sums=%s tables=%s", r, disjoint, sums_match, tables_match)
    return DecompositionReport(
        r=r,
        slice_tables=tables,
        total=dimension_table(loop),
        disjoint=disjoint,
        sums_match=sums_match,
        tables_match=tables_match,
    )


class GhwHit(NamedTuple):
    key: GradeKey
    basis: BasisPair
    dim: int


def ghw_scan(mod: TruncatedModule, bases: Sequence[BasisPair]) -> List[GhwHit]:
    """
    Weight spaces with a nonzero common kernel of ``E(b1'), E(b2'), t^{b1'}``.

    Raises:
        ValueError: If the module is not over the full lattice
    """
    require_two_dimensional(mod)
    hits = []
    for candidate in bases:
        symbols = [
            graded_sym(SymbolKind.E, candidate.b1),
            graded_sym(SymbolKind.E, candidate.b2),
            graded_sym(SymbolKind.T, candidate.b1),
        ]
        for key in interior_keys(mod, symbols):
            n = mod.dim(key)
            blocks = [mod.action_matrix(g, key) for g in symbols]
            kernel = kernel_basis(SparseMatrix.vstack(blocks, cols=n))
            if kernel:
                hits.append(GhwHit(key, candidate, len(kernel)))
    logger.info("ghw scan of %s: %d hits", mod.name, len(hits))
    return hits


class BoundRow(NamedTuple):
    key: GradeKey
    dim: int
    bound: int
    holds: bool


def uniform_bound_check(mod: TruncatedModule) -> List[BoundRow]:
    """
    Instances of ``dim V(m1, m2) <= 2 dim V(0, m2 + 1) + dim V(1, m2 + 1)``.

    Only region keys whose comparison keys are in the region are reported.
    """
    rows = []
    region = mod.region
    for key in mod.keys():
        up0, up1 = (0, key[1] + 1), (1, key[1] + 1)
        if not (region.contains(key) and region.contains(up0) and region.contains(up1)):
            continue
        bound = 2 * mod.dim(up0) + mod.dim(up1)
        rows.append(BoundRow(key, mod.dim(key), bound, mod.dim(key) <= bound))
    return rows


def lowering_nonvanishing_check(
    mod: TruncatedModule, v: Mapping[Label, Fraction], b: Optional[BasisPair] = None
) -> List[GradeKey]:
    """
    Lattice vectors ``m`` in the strict positive cone with ``E(-m) v = 0``.

    Only ``m`` whose image weight is retained inside the region are tested; an
    empty result means every tested lowering acts nontrivially.
    """
    require_two_dimensional(mod)
    basis = b or mod.basis
    failures = []
    for key in mod.split(v):
        for g in mod.symbols_from(key):
            if g.kind is not SymbolKind.E or not cone_contains(basis, -g.m, ConeMode.STRICT_POS):
                continue
            if not mod.region.contains(mod.target(g, key)):
                continue
            if not mod.act_symbol(g, v):
                failures.append(coords(-g.m, basis))
    return sorted(set(failures))
