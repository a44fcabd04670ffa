"""
Concrete truncated modules.

Level-zero Laurent modules ``T_rho`` over H_b1 and its subalgebras, Heisenberg
Fock modules ``M^eps(a)``, Verma-type modules ``V^eps(c)``, the case (2)
tensor product, extension to L0, induction to the full algebra, irreducible
quotients, the highest-weight modules ``V(rho)`` and the loop module
``hat V(rho)`` with its summands ``W(i)``.
"""

import logging
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from hvtorus.config import ConstructionDescriptor, ConstructionName
from hvtorus.errors import CaseMismatchError
from hvtorus.exactla import RationalLike, to_rational
from hvtorus.exppoly import RhoKind, RhoSpec
from hvtorus.gradmod import (
    GradeKey,
    Label,
    Levels,
    ModuleAlgebra,
    Region,
    SubmoduleSlice,
    TruncatedModule,
    Truncation,
    generated_submodule,
    quotient_module,
    radical,
    restrict,
)
from hvtorus.hvr2 import (
    BasisSymbol,
    PBWOrder,
    SymbolKind,
    bracket_terms,
    graded_sym,
)
from hvtorus.lattice import STANDARD_BASIS, BasisPair, coords, from_coords, inverse_basis

logger = logging.getLogger(__name__)

LevelTuple = Tuple[RationalLike, RationalLike, RationalLike, RationalLike]


def levels_from_c(c: LevelTuple, b: BasisPair = STANDARD_BASIS) -> Levels:
    """
    K1..K4 values for the level ``c = (f(b1), h(b1), f(b2), h(b2))``.

    Inverts ``h(b_i) = b_i1 K1 + b_i2 K2`` and ``f(b_i) = b_i1 K3 + b_i2 K4``.
    """
    c1, c2, c3, c4 = (to_rational(x) for x in c)
    inv = inverse_basis(b)
    return (
        inv.p1 * c2 + inv.q1 * c4,
        inv.p2 * c2 + inv.q2 * c4,
        inv.p1 * c1 + inv.q1 * c3,
        inv.p2 * c1 + inv.q2 * c3,
    )


def _central_value(x: BasisSymbol, y: BasisSymbol, levels: Levels) -> Fraction:
    """Scalar by which the central part of ``[x, y]`` acts at the given levels."""
    total = Fraction(0)
    for s, c in bracket_terms(x, y):
        if s.kind is SymbolKind.K:
            total += c * levels[s.index - 1]
    return total


def _b1_symbol(kind: SymbolKind, k: int, b: BasisPair) -> BasisSymbol:
    return graded_sym(kind, from_coords(k, 0, b))


def _sign(epsilon: str) -> int:
    if epsilon not in ("+", "-"):
        raise ValueError(f"epsilon must be '+' or '-', got {epsilon!r}")
    return 1 if epsilon == "+" else -1


# ==================== Level zero ====================


def trivial_module(b: BasisPair = STANDARD_BASIS) -> TruncatedModule:
    """The one-dimensional trivial module of the full algebra."""
    return TruncatedModule(
        basis=b,
        spaces={(0, 0): ["v"]},
        provider=lambda symbol, label: {},
        algebra=ModuleAlgebra.LTILDE,
        region=Region(0, 0, 0, 0),
        name="trivial",
    )


class TClassification(NamedTuple):
    r: int
    irreducible: bool


def _rho_support(rho: RhoSpec, alg: ModuleAlgebra, window: int) -> List[int]:
    use_e = alg in (ModuleAlgebra.H_B1, ModuleAlgebra.E_B1)
    use_t = alg in (ModuleAlgebra.H_B1, ModuleAlgebra.T_B1)
    if rho.kind is RhoKind.TABLE:
        keys = set(rho.E) if use_e else set()
        keys |= set(rho.t) if use_t else set()
        bound = max((abs(k) for k in keys), default=0)
    else:
        bound = 2 * window
    return [
        k
        for k in range(-bound, bound + 1)
        if k and ((use_e and rho.e_value(k)) or (use_t and rho.t_value(k)))
    ]


def classify_T_rho(
    rho: RhoSpec,
    alg: ModuleAlgebra = ModuleAlgebra.H_B1,
    b: BasisPair = STANDARD_BASIS,
    window: int = 8,
) -> TClassification:
    """
    Decide whether ``T_rho`` is ``T_r = C[t^r, t^-r]``.

    The support ``K`` of rho generates an additive monoid; it is the group ``rZ``
    with ``r = gcd(K)`` exactly when ``K`` is empty or has elements of both signs.
    """
    support = _rho_support(rho, ModuleAlgebra(alg), window)
    r = 0
    for k in support:
        r = gcd(r, abs(k))
    irreducible = not support or (min(support) < 0 < max(support))
    return TClassification(r, irreducible)


def laurent_T(
    rho: RhoSpec,
    alg: ModuleAlgebra = ModuleAlgebra.H_B1,
    b: BasisPair = STANDARD_BASIS,
    window: int = 8,
    generated: bool = False,
) -> TruncatedModule:
    """
    The Laurent module ``T_rho`` on ``{t^n : |n| <= window}``.

    ``E(k b1) t^n = rho(E(k b1)) t^{n+k}`` and ``t^{k b1} t^n = rho(t^{k b1}) t^{n+k}``;
    ``f(b2)``, ``h(b2)`` act by ``rho(f(b2))``, ``rho(h(b2))`` and ``f(b1)``, ``h(b1)`` by 0.
    Over ``E_b1`` or ``t_b1`` only the corresponding generators act. With
    ``generated=True`` the module is cut down to the submodule generated by ``t^0``.
    """
    alg = ModuleAlgebra(alg)
    if alg not in (ModuleAlgebra.H_B1, ModuleAlgebra.E_B1, ModuleAlgebra.T_B1):
        raise ValueError(f"T_rho is a module over H_b1, E_b1 or t_b1, not {alg.value}")
    rho.check_basis(b)

    def provider(symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        _, n = label  # type: ignore[misc]
        k = coords(symbol.m, b)[0]
        value = rho.e_value(k) if symbol.kind is SymbolKind.E else rho.t_value(k)
        return {("t", n + k): value} if value else {}

    levels = levels_from_c(rho.level_values(), b)
    if alg is ModuleAlgebra.T_B1:
        levels = (Fraction(0),) * 4  # type: ignore[assignment]
    module = TruncatedModule(
        basis=b,
        spaces={(n, 0): [("t", n)] for n in range(-window, window + 1)},
        provider=provider,
        algebra=alg,
        levels=levels,
        truncation=Truncation(depth=0, window=window),
        name=f"T_rho({alg.value})",
    )
    if not generated:
        return module
    piece = generated_submodule(module, [module.basis_vector(("t", 0))])
    return restrict(module, piece, name=f"T_rho({alg.value})<t^0>")


# ==================== Heisenberg modules ====================

Partition = Tuple[Tuple[int, int], ...]


def _multisets(parts: Sequence[Tuple[int, int]], depth: int) -> List[Partition]:
    """Sorted multisets of ``(kind_rank, j)`` parts with total ``j`` at most ``depth``."""
    out: List[Partition] = [()]

    def extend(prefix: Partition, start: int, budget: int) -> None:
        for idx in range(start, len(parts)):
            part = parts[idx]
            if part[1] <= budget:
                mono = prefix + (part,)
                out.append(mono)
                extend(mono, idx, budget - part[1])

    extend((), 0, depth)
    return out


def _heisenberg_module(
    kinds: Sequence[SymbolKind],
    levels: Levels,
    epsilon: str,
    b: BasisPair,
    depth: int,
    algebra: ModuleAlgebra,
    name: str,
) -> TruncatedModule:
    """
    Module induced from a line killed by the ``eps``-positive half of an abelian-modulo-center algebra.

    Creators ``X(-eps j b1)`` commute, so monomials are multisets of ``(kind, j)``.
    An annihilator ``X(eps j b1)`` removes one matching creator, scaled by the
    multiplicity and the central value of the bracket.
    """
    eps = _sign(epsilon)
    ranks = {SymbolKind.E: 0, SymbolKind.T: 1}
    parts = sorted((ranks[kind], j) for kind in kinds for j in range(1, depth + 1))
    kind_of = {0: SymbolKind.E, 1: SymbolKind.T}
    spaces: Dict[GradeKey, List[Label]] = {}
    for mono in _multisets(parts, depth):
        grade = -eps * sum(j for _, j in mono)
        spaces.setdefault((grade, 0), []).append(mono)

    def provider(symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        mono: Partition = label  # type: ignore[assignment]
        k = coords(symbol.m, b)[0]
        if eps * k < 0:
            part = (ranks[symbol.kind], abs(k))
            return {tuple(sorted(mono + (part,))): Fraction(1)}
        out: Dict[Label, Fraction] = {}
        for part in sorted(set(mono)):
            partner = _b1_symbol(kind_of[part[0]], -eps * part[1], b)
            value = _central_value(symbol, partner, levels)
            if value:
                rest = list(mono)
                rest.remove(part)
                out[tuple(rest)] = mono.count(part) * value
        return out

    return TruncatedModule(
        basis=b,
        spaces=spaces,
        provider=provider,
        algebra=algebra,
        levels=levels,
        truncation=Truncation(depth=depth, window=depth),
        axis=1,
        orientation=eps,
        name=name,
    )


def fock(
    epsilon: str = "+", a: RationalLike = 1, b: BasisPair = STANDARD_BASIS, depth: int = 5
) -> TruncatedModule:
    """
    The Fock module ``M^eps(a)`` over ``E_b1``.

    Basis ``E(-k1 b1)...E(-kj b1) v_a`` with ``sum k_i <= depth`` (signs mirrored
    for ``eps = -``); ``f(b1)`` acts by ``a``.
    """
    levels = levels_from_c((a, 0, 0, 0), b)
    return _heisenberg_module(
        [SymbolKind.E], levels, epsilon, b, depth, ModuleAlgebra.E_B1, f"M^{epsilon}({a})"
    )


def verma_H(
    c: LevelTuple, epsilon: str = "+", b: BasisPair = STANDARD_BASIS, depth: int = 4
) -> TruncatedModule:
    """
    The Verma-type module ``V^eps(c)`` over ``H_b1``.

    Induced from a line killed by ``E(eps k b1)``, ``t^{eps k b1}`` (k > 0) on which
    ``f(b1), h(b1), f(b2), h(b2)`` act by ``c1..c4``.
    """
    levels = levels_from_c(c, b)
    label = ",".join(str(to_rational(x)) for x in c)
    return _heisenberg_module(
        [SymbolKind.E, SymbolKind.T],
        levels,
        epsilon,
        b,
        depth,
        ModuleAlgebra.H_B1,
        f"V^{epsilon}({label})",
    )


def tensor_M_rho(
    rho: RhoSpec,
    epsilon: str = "+",
    c1: RationalLike = 1,
    b: BasisPair = STANDARD_BASIS,
    depth: int = 4,
    window: int = 4,
) -> TruncatedModule:
    """
    ``T_rho(t_b1) (x) M^eps(c1)``, the level ``(c1, 0, c3, c4)`` modules of case (2).

    E generators act on the Fock factor, t generators shift the Laurent factor.
    The Laurent factor is ``T_r`` cut to ``|n| <= window``; ``c3``, ``c4`` are
    ``rho(f(b2))``, ``rho(h(b2))``.

    Raises:
        CaseMismatchError: If ``c1 = 0`` or rho has E-values
    """
    c1 = to_rational(c1)
    if c1 == 0:
        raise CaseMismatchError("tensor_M_rho needs c1 != 0", case="case (2)")
    if rho.has_e_values(2 * window) or any(rho.E.values()):
        raise CaseMismatchError("rho must be supported on t_b1 only", case="case (2)")
    eps = _sign(epsilon)
    r = classify_T_rho(rho, ModuleAlgebra.T_B1, b, window).r
    exponents = [n for n in range(-window, window + 1) if (n == 0 if r == 0 else n % r == 0)]
    levels = levels_from_c((c1, 0, rho.f_b2_value(), rho.h_b2_value()), b)
    fock_part = fock(epsilon, c1, b, depth)

    spaces: Dict[GradeKey, List[Label]] = {}
    for n in exponents:
        for key in fock_part.keys():
            for w in fock_part.space(key):
                spaces.setdefault((n + key[0], 0), []).append((n, w))

    def provider(symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        n, w = label  # type: ignore[misc]
        if symbol.kind is SymbolKind.E:
            return {(n, out): c for out, c in fock_part.image(symbol, w).items()}
        k = coords(symbol.m, b)[0]
        value = rho.t_value(k)
        return {(n + k, w): value} if value else {}

    return TruncatedModule(
        basis=b,
        spaces=spaces,
        provider=provider,
        algebra=ModuleAlgebra.H_B1,
        levels=levels,
        truncation=Truncation(depth=depth, window=window),
        axis=1,
        orientation=eps,
        name=f"T_rho(t_b1)xM^{epsilon}({c1})",
    )


def extend_to_L0(
    h_mod: TruncatedModule, lam: Tuple[RationalLike, RationalLike] = (0, 0), b: Optional[BasisPair] = None
) -> TruncatedModule:
    """
    Add ``d1, d2`` acting on grade ``j`` by ``lam + j b1``.

    Raises:
        ValueError: If the module is not graded along b1 or not an H_b1-module
    """
    if h_mod.algebra is not ModuleAlgebra.H_B1:
        raise ValueError(f"extend_to_L0 needs an H_b1-module, got {h_mod.algebra.value}")
    if any(key[1] != 0 for key in h_mod.keys()):
        raise ValueError(f"{h_mod.name} is not Z-graded along b1")
    basis = b or h_mod.basis
    if basis != h_mod.basis:
        raise ValueError("extend_to_L0 must use the basis the module is graded by")
    return TruncatedModule(
        basis=basis,
        spaces={k: h_mod.space(k) for k in h_mod.keys()},
        provider=h_mod.image,
        algebra=ModuleAlgebra.L0,
        levels=h_mod.levels,
        truncation=h_mod.truncation,
        base=(to_rational(lam[0]), to_rational(lam[1])),
        axis=h_mod.axis,
        orientation=h_mod.orientation,
        region=h_mod.region,
        name=f"{h_mod.name}@L0",
    )


# ==================== Induction ====================

Monomial = Tuple[BasisSymbol, ...]
InnerImage = Callable[[BasisSymbol, Label], Mapping[Label, Fraction]]


class InducedAction:
    """
    Action on ``mono (x) w`` in a module induced from the non-negative part.

    ``x . (y rest) w = y (x . rest w) + [x, y] . rest w``; lowering ``x`` is
    inserted by PBW straightening, zero-part ``x`` reaching the top acts through
    the inner module and raising ``x`` kills the top. Results are memoized.

    Args:
        order: PBW order of the lowering generators
        level: Grading of symbols; negative means lowering
        inner: Action of zero-part symbols on inner labels
        levels: K1..K4 values
    """

    def __init__(
        self,
        order: PBWOrder,
        level: Callable[[BasisSymbol], int],
        inner: InnerImage,
        levels: Levels,
    ):
        self.order = order
        self.level = level
        self.inner = inner
        self.levels = levels
        self._memo: Dict[Tuple[BasisSymbol, Monomial, Label], Dict[Label, Fraction]] = {}

    def __call__(self, symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        mono, w = label  # type: ignore[misc]
        return self.act(symbol, mono, w)

    def act(self, x: BasisSymbol, mono: Monomial, w: Label) -> Dict[Label, Fraction]:
        memo_key = (x, mono, w)
        cached = self._memo.get(memo_key)
        if cached is not None:
            return cached
        out: Dict[Label, Fraction] = {}
        if x.kind is SymbolKind.K:
            value = self.levels[x.index - 1]
            if value:
                out[(mono, w)] = value
        elif self.level(x) < 0:
            for m2, c in self.order.left_multiply(x, mono).items():
                out[(m2, w)] = c
        elif not mono:
            if self.level(x) == 0:
                for w2, c in self.inner(x, w).items():
                    out[((), w2)] = Fraction(c)
        else:
            y, rest = mono[0], mono[1:]
            for (m2, w2), c in self.act(x, rest, w).items():
                for m3, c3 in self.order.left_multiply(y, m2).items():
                    out[(m3, w2)] = out.get((m3, w2), Fraction(0)) + c * c3
            for z, cz in bracket_terms(x, y):
                for lab, c in self.act(z, rest, w).items():
                    out[lab] = out.get(lab, Fraction(0)) + cz * c
            out = {k: c for k, c in out.items() if c}
        self._memo[memo_key] = out
        return out

    def memo_size(self) -> int:
        return len(self._memo)


def _lowering_generators(
    b: BasisPair, trunc: Truncation, kinds: Sequence[SymbolKind]
) -> List[BasisSymbol]:
    out = []
    for level in range(-1, -trunc.depth - 1, -1):
        for x1 in range(-trunc.window, trunc.window + 1):
            m = from_coords(x1, level, b)
            for kind in kinds:
                out.append(graded_sym(kind, m))
    return out


def _pbw_monomials(
    generators: Sequence[BasisSymbol], order: PBWOrder, depth: int
) -> List[Monomial]:
    gens = sorted(generators, key=order.key)
    out: List[Monomial] = [()]

    def extend(prefix: Monomial, start: int, budget: int) -> None:
        for idx in range(start, len(gens)):
            g = gens[idx]
            cost = -order.level(g)
            if cost <= budget:
                mono = prefix + (g,)
                out.append(mono)
                extend(mono, idx, budget - cost)

    extend((), 0, depth)
    return out


def induce(
    b: BasisPair,
    v0_mod: TruncatedModule,
    trunc: Truncation,
    algebra: ModuleAlgebra = ModuleAlgebra.LTILDE,
    grading: str = "lattice",
    name: Optional[str] = None,
) -> TruncatedModule:
    """
    Induce from ``L_+ + L_0`` (with ``L_+`` acting by zero) to the full algebra.

    The basis is every PBW monomial in lowering generators of levels -1..-depth
    and b1-coordinates in [-window, window], of total level at least -depth,
    applied to every basis vector of ``v0_mod``.
    """
    if grading == "lattice" and b != v0_mod.basis:
        raise ValueError("the inner module must be graded by the same basis")
    order = PBWOrder(b, axis=2)
    engine = InducedAction(order, order.level, v0_mod.image, v0_mod.levels)
    monomials = _pbw_monomials(
        _lowering_generators(b, trunc, (SymbolKind.E, SymbolKind.T)), order, trunc.depth
    )
    spaces: Dict[GradeKey, List[Label]] = {}
    for mono in monomials:
        x1 = sum(coords(g.m, b)[0] for g in mono)
        x2 = sum(order.level(g) for g in mono)
        for key in v0_mod.keys():
            target = (0, x2) if grading == "level" else (x1 + key[0], x2 + key[1])
            for w in v0_mod.space(key):
                spaces.setdefault(target, []).append((mono, w))
    region = (
        Region(0, 0, -trunc.depth, 0)
        if grading == "level"
        else Region(-trunc.window, trunc.window, -trunc.depth, 0)
    )
    module = TruncatedModule(
        basis=b,
        spaces=spaces,
        provider=engine,
        algebra=algebra,
        levels=v0_mod.levels,
        truncation=trunc,
        base=v0_mod.base,
        grading=grading,
        region=region,
        name=name or f"Ind({v0_mod.name})",
        widen=lambda wider: induce(b, v0_mod, wider, algebra, grading, name),
    )
    logger.debug("induced %s: %d basis vectors", module.name, module.total_dim())
    return module


def irreducible_quotient(induced: TruncatedModule, name: Optional[str] = None) -> TruncatedModule:
    """Quotient by the radical, re-based per weight."""
    return quotient_module(induced, radical(induced), name=name or f"M({induced.name})")


# ==================== Highest-weight modules V(rho) ====================


def _rho_line(rho: RhoSpec, b: BasisPair) -> TruncatedModule:
    rho.check_basis(b)

    def provider(symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        k = coords(symbol.m, b)[0]
        value = rho.e_value(k) if symbol.kind is SymbolKind.E else rho.t_value(k)
        return {"v0": value} if value else {}

    return TruncatedModule(
        basis=b,
        spaces={(0, 0): ["v0"]},
        provider=provider,
        algebra=ModuleAlgebra.H_B1,
        levels=levels_from_c(rho.level_values(), b),
        grading="level",
        name="C v0",
    )


def verma_V_rho(rho: RhoSpec, b: BasisPair = STANDARD_BASIS, trunc: Optional[Truncation] = None) -> TruncatedModule:
    """The induced module ``Ind(C v0)`` before quotienting, graded by b2-level only."""
    trunc = trunc or Truncation(depth=1, window=4)
    return induce(
        b, _rho_line(rho, b), trunc, algebra=ModuleAlgebra.L, grading="level", name="Vbar(rho)"
    )


def highest_weight_V_rho(
    rho: RhoSpec, b: BasisPair = STANDARD_BASIS, trunc: Optional[Truncation] = None
) -> TruncatedModule:
    """
    ``V(rho)``: H_b1 acts on ``v0`` through rho, the positive part kills it, and the
    maximal graded submodule is divided out.
    """
    return irreducible_quotient(verma_V_rho(rho, b, trunc), name="V(rho)")


def _loop_module(v_rho: TruncatedModule, b: BasisPair, window: int) -> TruncatedModule:
    spaces: Dict[GradeKey, List[Label]] = {}
    for key in v_rho.keys():
        for q in v_rho.space(key):
            for k in range(-window, window + 1):
                spaces.setdefault((k, key[1]), []).append((q, k))

    def provider(symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        q, k = label  # type: ignore[misc]
        shift = coords(symbol.m, b)[0]
        return {(out, k + shift): c for out, c in v_rho.image(symbol, q).items()}

    return TruncatedModule(
        basis=b,
        spaces=spaces,
        provider=provider,
        algebra=ModuleAlgebra.LTILDE,
        levels=v_rho.levels,
        truncation=v_rho.truncation,
        region=Region(-window, window, -v_rho.truncation.depth, 0),
        name="hatV(rho)",
    )


def hat_V(
    rho: RhoSpec,
    b: BasisPair = STANDARD_BASIS,
    trunc: Optional[Truncation] = None,
    i: Optional[int] = None,
) -> TruncatedModule:
    """
    ``V(rho) (x) C[t, t^-1]`` with ``x . (v (x) t^k) = (x . v) (x) t^{k + m1}``.

    The twisted derivations act on ``v (x) t^k`` at level ``j`` by ``k`` and ``j``.
    With ``i`` given, the result is the submodule ``W(i)`` generated by ``v0 (x) t^i``.
    """
    trunc = trunc or Truncation(depth=1, window=4)
    module = _loop_module(highest_weight_V_rho(rho, b, trunc), b, trunc.window)
    if i is None:
        return module
    return restrict(module, w_slice(module, rho, i), name=f"W({i})")


def normalize_w_index(rho: RhoSpec, i: int, window: int, b: BasisPair = STANDARD_BASIS) -> int:
    r = classify_T_rho(rho, ModuleAlgebra.H_B1, b, window).r
    return i % r if r >= 1 else i


def w_slice(loop: TruncatedModule, rho: RhoSpec, i: int) -> SubmoduleSlice:
    """Slice of ``W(i)`` inside the loop module; ``i`` is taken mod r when r >= 1."""
    i = normalize_w_index(rho, i, loop.truncation.window, loop.basis)
    return generated_submodule(loop, [loop.basis_vector((((), "v0"), i))])


# ==================== Modules M(b1, b2, V) ====================


def induced_laurent(
    rho: RhoSpec,
    lam: Tuple[RationalLike, RationalLike] = (0, 0),
    b: BasisPair = STANDARD_BASIS,
    trunc: Optional[Truncation] = None,
) -> TruncatedModule:
    """``M(b1, b2, T_rho(H_b1))``: the irreducible quotient induced from the cyclic Laurent module."""
    trunc = trunc or Truncation(depth=1, window=4)
    top = extend_to_L0(laurent_T(rho, ModuleAlgebra.H_B1, b, trunc.window, generated=True), lam, b)
    return irreducible_quotient(induce(b, top, trunc), name="M(T_rho)")


def induced_verma(
    c: LevelTuple,
    epsilon: str = "+",
    lam: Tuple[RationalLike, RationalLike] = (0, 0),
    b: BasisPair = STANDARD_BASIS,
    trunc: Optional[Truncation] = None,
    quotient: bool = True,
) -> TruncatedModule:
    """
    ``M(b1, b2, V)`` for a nonzero-level top ``V``.

    ``c2 != 0`` uses ``V^eps(c)`` (case (1)); ``c2 = 0 != c1`` uses
    ``T_0(t_b1) (x) M^eps(c1)`` (case (2)). The inner module is kept to depth ``window``.

    Raises:
        CaseMismatchError: If ``c1 = c2 = 0``
    """
    trunc = trunc or Truncation(depth=1, window=4)
    c1, c2, c3, c4 = (to_rational(x) for x in c)
    if c2 != 0:
        inner = verma_H((c1, c2, c3, c4), epsilon, b, trunc.window)
    elif c1 != 0:
        zero_rho = RhoSpec.table(f_b2=c3, h_b2=c4)
        inner = tensor_M_rho(zero_rho, epsilon, c1, b, trunc.window, trunc.window)
    else:
        raise CaseMismatchError(
            "c1 = c2 = 0 has level zero on H_b1; use the T_rho construction",
            case="case (3)",
        )
    induced = induce(b, extend_to_L0(inner, lam, b), trunc)
    return irreducible_quotient(induced) if quotient else induced


def generic_verma_H(
    c: LevelTuple, epsilon: str = "+", b: BasisPair = STANDARD_BASIS, depth: int = 4
) -> TruncatedModule:
    """``V^eps(c)`` built by the general induction engine, graded along b1."""
    eps = _sign(epsilon)
    levels = levels_from_c(c, b)
    order = PBWOrder(b, axis=1)

    def level(symbol: BasisSymbol) -> int:
        return eps * coords(symbol.m, b)[0] if symbol.is_graded() else 0

    engine = InducedAction(order, level, lambda symbol, label: {}, levels)
    gens = [
        _b1_symbol(kind, -eps * j, b)
        for j in range(1, depth + 1)
        for kind in (SymbolKind.E, SymbolKind.T)
    ]
    gens.sort(key=order.key)
    monomials: List[Monomial] = [()]

    def extend(prefix: Monomial, start: int, budget: int) -> None:
        for idx in range(start, len(gens)):
            cost = -level(gens[idx])
            if cost <= budget:
                mono = prefix + (gens[idx],)
                monomials.append(mono)
                extend(mono, idx, budget - cost)

    extend((), 0, depth)
    spaces: Dict[GradeKey, List[Label]] = {}
    for mono in monomials:
        grade = sum(coords(g.m, b)[0] for g in mono)
        spaces.setdefault((grade, 0), []).append((mono, "v"))
    return TruncatedModule(
        basis=b,
        spaces=spaces,
        provider=engine,
        algebra=ModuleAlgebra.H_B1,
        levels=levels,
        truncation=Truncation(depth=depth, window=depth),
        axis=1,
        orientation=eps,
        name=f"V^{epsilon}(c) generic",
    )


# ==================== Dispatch ====================


def build(descriptor: ConstructionDescriptor) -> TruncatedModule:
    """
    Build the module a descriptor names.

    Raises:
        CaseMismatchError: When the parameters fall outside the construction's case
    """
    d = descriptor
    b = d.basis
    trunc = d.truncation
    name = d.construction
    rho = d.rho if d.rho is not None else RhoSpec.zero()
    logger.info("building %s", name.value)

    if name is ConstructionName.TRIVIAL:
        return trivial_module(b)
    if name is ConstructionName.LAURENT_T:
        return laurent_T(rho, d.algebra, b, trunc.window, generated=d.generated)
    if name is ConstructionName.FOCK:
        module = fock(d.epsilon or "+", d.a, b, trunc.depth)
    elif name is ConstructionName.VERMA_H:
        module = verma_H(d.level_tuple(), d.epsilon or "+", b, trunc.depth)
    elif name is ConstructionName.GENERIC_VERMA_H:
        module = generic_verma_H(d.level_tuple(), d.epsilon or "+", b, trunc.depth)
    elif name is ConstructionName.TENSOR_M_RHO:
        return tensor_M_rho(rho, d.epsilon or "+", d.level_tuple()[0], b, trunc.depth, trunc.window)
    elif name is ConstructionName.VERMA_V_RHO:
        return verma_V_rho(rho, b, trunc)
    elif name is ConstructionName.V_RHO:
        return highest_weight_V_rho(rho, b, trunc)
    elif name is ConstructionName.HAT_V:
        return hat_V(rho, b, trunc, d.index)
    elif name is ConstructionName.INDUCED_LAURENT:
        return induced_laurent(rho, d.lam, b, trunc)
    elif name is ConstructionName.INDUCED_VERMA:
        return induced_verma(d.level_tuple(), d.epsilon or "+", d.lam, b, trunc)
    else:  # pragma: no cover
        raise ValueError(f"unknown construction {name}")
    return irreducible_quotient(module) if d.quotient else module
