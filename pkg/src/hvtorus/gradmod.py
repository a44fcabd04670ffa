"""
Truncated graded weight modules.

A :class:`TruncatedModule` holds finitely many weight spaces, each an ordered
list of hashable labels, keyed by the basis coordinates ``(x1, x2)`` of the
weight offset. Generators act through a provider callable; images leaving the
retained spaces are dropped, so every computation here is an approximation
parametrized by the :class:`Truncation`.

Module vectors are plain ``{label: Fraction}`` mappings.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import (
    Any,
    Callable,
    Deque,
    Dict,
    Hashable,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from pydantic import model_validator

from hvtorus.errors import UnknownGeneratorError
from hvtorus.exactla import (
    SparseMatrix,
    Subspace,
    kernel_basis,
    rref,
    subspace_intersect,
    subspace_sum,
)
from hvtorus.hvr2 import (
    BasisSymbol,
    LieElement,
    SymbolKind,
    bracket,
    graded_sym,
)
from hvtorus.lattice import (
    STANDARD_BASIS,
    BasisPair,
    ConeMode,
    LatticeVector,
    cone_contains,
    coords,
    from_coords,
)
from hvtorus.model import FrozenModel, RationalValue

logger = logging.getLogger(__name__)

GradeKey = Tuple[int, int]
Label = Hashable
ModVector = Dict[Label, Fraction]
Provider = Callable[[BasisSymbol, Label], Mapping[Label, Fraction]]
Levels = Tuple[Fraction, Fraction, Fraction, Fraction]

ZERO_LEVELS: Levels = (Fraction(0), Fraction(0), Fraction(0), Fraction(0))


class Weight(FrozenModel):
    """
    Rational base point plus lattice offset.

    Two weights are equal when ``base + offset`` agree componentwise.
    """

    base: Tuple[RationalValue, RationalValue] = (Fraction(0), Fraction(0))
    offset: LatticeVector = LatticeVector(0, 0)

    @property
    def value(self) -> Tuple[Fraction, Fraction]:
        return (self.base[0] + self.offset.m1, self.base[1] + self.offset.m2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Weight):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(self.value)


class Truncation(FrozenModel):
    """
    Finite approximation policy.

    ``depth`` D keeps b2-levels 0..-D, ``window`` N keeps b1-coordinates in
    [-N, N], and ``raising_bound`` S (default 2N) caps the b1-coordinate of the
    raising generators used by the radical recursion.
    """

    depth: int
    window: int
    raising_bound: int

    @model_validator(mode="before")
    @classmethod
    def _default_raising_bound(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("raising_bound") is None:
            data = dict(data)
            data["raising_bound"] = 2 * int(data.get("window", 0))
        return data

    @model_validator(mode="after")
    def _check_bounds(self) -> "Truncation":
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if self.window < 0:
            raise ValueError(f"window must be >= 0, got {self.window}")
        if self.raising_bound < self.window:
            raise ValueError(
                f"raising_bound {self.raising_bound} must be >= window {self.window}"
            )
        return self


class ModuleAlgebra(str, Enum):
    """The algebra a module is a module over; decides which generators act."""

    H_B1 = "H_b1"
    E_B1 = "E_b1"
    T_B1 = "t_b1"
    L0 = "L0"
    L = "L"
    LTILDE = "Ltilde"

    @property
    def two_dimensional(self) -> bool:
        return self in (ModuleAlgebra.L, ModuleAlgebra.LTILDE)

    @property
    def has_derivations(self) -> bool:
        return self in (ModuleAlgebra.L0, ModuleAlgebra.LTILDE)

    def kinds(self) -> Tuple[SymbolKind, ...]:
        if self is ModuleAlgebra.E_B1:
            return (SymbolKind.E,)
        if self is ModuleAlgebra.T_B1:
            return (SymbolKind.T,)
        return (SymbolKind.E, SymbolKind.T)


class Region(NamedTuple):
    """Rectangle of grade keys inside which a module is trusted."""

    x1_lo: int
    x1_hi: int
    x2_lo: int
    x2_hi: int

    def contains(self, key: GradeKey) -> bool:
        return self.x1_lo <= key[0] <= self.x1_hi and self.x2_lo <= key[1] <= self.x2_hi


class TruncatedModule:
    """
    A weight-indexed family of finite ordered bases with exact generator actions.

    Args:
        basis: Basis ``{b1, b2}`` whose coordinates index the weight spaces
        spaces: Grade key -> ordered labels; empty spaces are dropped
        provider: ``(symbol, label) -> {label: coefficient}`` for E and t symbols
        algebra: Which generators act
        levels: Values of K1..K4
        truncation: Policy the module was built under
        base: The rational base weight ``(lambda1, lambda2)``
        grading: ``"lattice"`` (keys are full coordinates) or ``"level"``
            (keys are ``(0, level)`` and generators shift only the level)
        axis: 1 or 2, the coordinate that carries the level
        orientation: +1 when lower levels are negative, -1 for mirrored modules
        region: Keys inside the truncation proper; defaults to every key
        name: Display name used in logs and reports
        widen: Rebuilds the same module under another truncation; lets the
            radical follow raising images past the window
    """

    def __init__(
        self,
        *,
        basis: BasisPair,
        spaces: Mapping[GradeKey, Sequence[Label]],
        provider: Provider,
        algebra: ModuleAlgebra,
        levels: Levels = ZERO_LEVELS,
        truncation: Optional[Truncation] = None,
        base: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0)),
        grading: str = "lattice",
        axis: int = 2,
        orientation: int = 1,
        region: Optional[Region] = None,
        name: str = "module",
        widen: Optional[Callable[[Truncation], "TruncatedModule"]] = None,
    ):
        if grading not in ("lattice", "level"):
            raise ValueError(f"grading must be 'lattice' or 'level', got {grading!r}")
        if axis not in (1, 2) or orientation not in (1, -1):
            raise ValueError("axis must be 1 or 2 and orientation +1 or -1")
        self.basis = basis
        self.provider = provider
        self.algebra = ModuleAlgebra(algebra)
        self.levels: Levels = tuple(Fraction(v) for v in levels)  # type: ignore[assignment]
        self.truncation = truncation or Truncation(depth=0, window=0)
        self.base = (Fraction(base[0]), Fraction(base[1]))
        self.grading = grading
        self.axis = axis
        self.orientation = orientation
        self.name = name
        self.widen = widen

        self._spaces: Dict[GradeKey, Tuple[Label, ...]] = {}
        self._index: Dict[Label, Tuple[GradeKey, int]] = {}
        for key, labels in spaces.items():
            labels = tuple(labels)
            if not labels:
                continue
            key = (int(key[0]), int(key[1]))
            self._spaces[key] = labels
            for pos, label in enumerate(labels):
                if label in self._index:
                    raise ValueError(f"label {label!r} appears twice in {name}")
                self._index[label] = (key, pos)
        if region is None:
            xs = [k[0] for k in self._spaces] or [0]
            ys = [k[1] for k in self._spaces] or [0]
            region = Region(min(xs), max(xs), min(ys), max(ys))
        self.region = region

        self._images: Dict[Tuple[BasisSymbol, Label], ModVector] = {}
        self._matrices: Dict[Tuple[BasisSymbol, GradeKey], SparseMatrix] = {}
        self._candidates: Optional[List[BasisSymbol]] = None
        self._outgoing: Dict[GradeKey, List[BasisSymbol]] = {}

    def __repr__(self) -> str:
        return f"TruncatedModule({self.name!r}, keys={len(self._spaces)}, dim={self.total_dim()})"

    # ---- bases -------------------------------------------------------------

    def keys(self) -> List[GradeKey]:
        """Grade keys, top level first."""
        return sorted(self._spaces, key=lambda k: (-self.level(k), k))

    def space(self, key: GradeKey) -> Tuple[Label, ...]:
        return self._spaces.get(tuple(key), ())  # type: ignore[arg-type]

    def dim(self, key: GradeKey) -> int:
        return len(self.space(key))

    def total_dim(self) -> int:
        return len(self._index)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def locate(self, label: Label) -> Tuple[GradeKey, int]:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"{label!r} is not a basis label of {self.name}") from None

    def level(self, key: GradeKey) -> int:
        return self.orientation * key[self.axis - 1]

    def level_keys(self, level: int) -> List[GradeKey]:
        return [k for k in self.keys() if self.level(k) == level]

    def weight(self, key: GradeKey) -> Weight:
        offset = from_coords(key[0], key[1], self.basis)
        return Weight(base=self.base, offset=offset)

    def basis_vector(self, label: Label) -> ModVector:
        self.locate(label)
        return {label: Fraction(1)}

    def to_dense(self, key: GradeKey, v: Mapping[Label, Fraction]) -> List[Fraction]:
        out = [Fraction(0)] * self.dim(key)
        for label, c in v.items():
            k, pos = self.locate(label)
            if k != key:
                raise ValueError(f"{label!r} lies in {k}, not in {key}")
            out[pos] += c
        return out

    def from_dense(self, key: GradeKey, dense: Sequence[Fraction]) -> ModVector:
        labels = self.space(key)
        return {labels[i]: Fraction(c) for i, c in enumerate(dense) if c}

    def split(self, v: Mapping[Label, Fraction]) -> Dict[GradeKey, List[Fraction]]:
        """Homogeneous components of ``v`` as dense vectors."""
        parts: Dict[GradeKey, List[Fraction]] = {}
        for label, c in v.items():
            if not c:
                continue
            key, pos = self.locate(label)
            parts.setdefault(key, [Fraction(0)] * self.dim(key))[pos] += c
        return {k: d for k, d in parts.items() if any(d)}

    # ---- generators --------------------------------------------------------

    def shift(self, symbol: BasisSymbol) -> GradeKey:
        if not symbol.is_graded():
            return (0, 0)
        x1, x2 = coords(symbol.m, self.basis)
        return (0, x2) if self.grading == "level" else (x1, x2)

    def target(self, symbol: BasisSymbol, key: GradeKey) -> GradeKey:
        s = self.shift(symbol)
        return (key[0] + s[0], key[1] + s[1])

    def supports(self, symbol: BasisSymbol) -> bool:
        if symbol.kind is SymbolKind.K:
            return True
        if symbol.kind is SymbolKind.D:
            return self.algebra.has_derivations
        if symbol.kind not in self.algebra.kinds():
            return False
        return self.algebra.two_dimensional or coords(symbol.m, self.basis)[1] == 0

    def _check_symbol(self, symbol: BasisSymbol) -> None:
        if not self.supports(symbol):
            raise UnknownGeneratorError(
                f"{symbol} does not act on {self.name} (a module over {self.algebra.value})"
            )

    def image(self, symbol: BasisSymbol, label: Label) -> ModVector:
        """Image of one basis vector, restricted to retained labels (cached)."""
        cache_key = (symbol, label)
        cached = self._images.get(cache_key)
        if cached is not None:
            return cached
        self._check_symbol(symbol)
        key, _ = self.locate(label)
        if symbol.kind is SymbolKind.K:
            c = self.levels[symbol.index - 1]
            result = {label: c} if c else {}
        elif symbol.kind is SymbolKind.D:
            if self.grading == "level":
                raise UnknownGeneratorError(f"{self.name} carries no derivation action")
            offset = from_coords(key[0], key[1], self.basis)
            eigen = self.base[symbol.index - 1] + offset[symbol.index - 1]
            result = {label: eigen} if eigen else {}
        else:
            result = {}
            for out, c in self.provider(symbol, label).items():
                if c and out in self._index:
                    result[out] = result.get(out, Fraction(0)) + Fraction(c)
            result = {k: c for k, c in result.items() if c}
        self._images[cache_key] = result
        return result

    def action_matrix(self, symbol: BasisSymbol, key: GradeKey) -> SparseMatrix:
        """Matrix of ``symbol`` from the space at ``key`` to the space at its target (cached)."""
        cache_key = (symbol, key)
        cached = self._matrices.get(cache_key)
        if cached is not None:
            return cached
        target = self.target(symbol, key)
        source_labels = self.space(key)
        entries: Dict[Tuple[int, int], Fraction] = {}
        if target in self._spaces:
            for j, label in enumerate(source_labels):
                for out, c in self.image(symbol, label).items():
                    entries[(self._index[out][1], j)] = c
        else:
            self._check_symbol(symbol)
        matrix = SparseMatrix(self.dim(target), len(source_labels), entries)
        self._matrices[cache_key] = matrix
        return matrix

    def act_symbol(self, symbol: BasisSymbol, v: Mapping[Label, Fraction]) -> ModVector:
        out: ModVector = {}
        for label, c in v.items():
            if not c:
                continue
            for w, d in self.image(symbol, label).items():
                out[w] = out.get(w, Fraction(0)) + c * d
        return {k: c for k, c in out.items() if c}

    def candidate_symbols(self) -> List[BasisSymbol]:
        """E and t symbols that can map some retained space into another one."""
        if self._candidates is not None:
            return self._candidates
        keys = list(self._spaces)
        if self.algebra.two_dimensional:
            x2_values = sorted({b[1] - a[1] for a in keys for b in keys})
        else:
            x2_values = [0]
        if self.grading == "level":
            bound = self.truncation.raising_bound
            x1_values = list(range(-bound, bound + 1))
        else:
            x1_values = sorted({b[0] - a[0] for a in keys for b in keys})
        symbols = []
        for x2 in x2_values:
            for x1 in x1_values:
                if x1 == 0 and x2 == 0:
                    continue
                m = from_coords(x1, x2, self.basis)
                for kind in self.algebra.kinds():
                    symbols.append(graded_sym(kind, m))
        self._candidates = symbols
        return symbols

    def symbols_from(self, key: GradeKey) -> List[BasisSymbol]:
        cached = self._outgoing.get(key)
        if cached is None:
            cached = [g for g in self.candidate_symbols() if self.target(g, key) in self._spaces]
            self._outgoing[key] = cached
        return cached

    def raising_symbols(self, key: GradeKey, bound: Optional[int] = None) -> List[BasisSymbol]:
        """Generators raising ``key`` by 1..-level(key) levels, other coordinate within S."""
        lvl = self.level(key)
        if bound is None:
            bound = self.truncation.raising_bound
        others = range(-bound, bound + 1) if self.algebra.two_dimensional else range(0, 1)
        out = []
        for j in range(1, -lvl + 1):
            for other in others:
                x = (other, j * self.orientation) if self.axis == 2 else (j * self.orientation, other)
                if x == (0, 0):
                    continue
                m = from_coords(x[0], x[1], self.basis)
                for kind in self.algebra.kinds():
                    out.append(graded_sym(kind, m))
        return out

    def cache_info(self) -> Dict[str, int]:
        return {"images": len(self._images), "matrices": len(self._matrices)}


def act(mod: TruncatedModule, x: LieElement, v: Mapping[Label, Fraction]) -> ModVector:
    """
    Apply an algebra element to a module vector.

    Components leaving the retained spaces are dropped.

    Raises:
        UnknownGeneratorError: If a symbol of ``x`` does not act on ``mod``
        ValueError: If ``v`` has a label outside the module
    """
    for label in v:
        mod.locate(label)
    out: ModVector = {}
    for symbol, c in x.items():
        for w, d in mod.act_symbol(symbol, v).items():
            out[w] = out.get(w, Fraction(0)) + c * d
    return {k: c for k, c in out.items() if c}


def commutator_defect(
    mod: TruncatedModule, x: LieElement, y: LieElement, v: Mapping[Label, Fraction]
) -> ModVector:
    """``[x,y].v - (x.(y.v) - y.(x.v))``; zero wherever no image left the truncation."""
    lhs = act(mod, bracket(x, y), v)
    xy = act(mod, x, act(mod, y, v))
    yx = act(mod, y, act(mod, x, v))
    out = dict(lhs)
    for w, c in xy.items():
        out[w] = out.get(w, Fraction(0)) - c
    for w, c in yx.items():
        out[w] = out.get(w, Fraction(0)) + c
    return {k: c for k, c in out.items() if c}


# ==================== Slices ====================


class SubmoduleSlice:
    """A subspace of every retained weight space of one module."""

    def __init__(self, module: TruncatedModule, subspaces: Optional[Mapping[GradeKey, Subspace]] = None):
        self.module = module
        self._subspaces: Dict[GradeKey, Subspace] = dict(subspaces or {})

    def subspace(self, key: GradeKey) -> Subspace:
        s = self._subspaces.get(key)
        return s if s is not None else Subspace.zero(self.module.dim(key))

    def dim_at(self, key: GradeKey) -> int:
        return self.subspace(key).dim

    def dims(self) -> Dict[GradeKey, int]:
        return {k: self.dim_at(k) for k in self.module.keys()}

    def total_dim(self) -> int:
        return sum(self.dims().values())

    def contains(self, key: GradeKey, dense: Sequence[Fraction]) -> bool:
        return self.subspace(key).contains(dense)

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.dims().values())

    def is_full(self) -> bool:
        return all(self.dim_at(k) == self.module.dim(k) for k in self.module.keys())

    def intersect(self, other: "SubmoduleSlice") -> "SubmoduleSlice":
        return SubmoduleSlice(
            self.module,
            {k: subspace_intersect(self.subspace(k), other.subspace(k)) for k in self.module.keys()},
        )

    def __add__(self, other: "SubmoduleSlice") -> "SubmoduleSlice":
        return SubmoduleSlice(
            self.module,
            {k: subspace_sum(self.subspace(k), other.subspace(k)) for k in self.module.keys()},
        )


class RadicalSlice(SubmoduleSlice):
    """
    The maximal graded submodule meeting the top level trivially, within truncation.

    A vector at level l < 0 lies in the radical iff every raising generator of
    1..-l levels maps it into the radical. Each key stores the reduced
    constraint rows ``R`` whose kernel is the radical there; ``rank(R)`` is the
    quotient dimension. Keys are resolved lazily and memoized.

    Raising a vector two or more levels below the top can leave the window
    before it reaches the top. When the module can be widened, targets above
    the bottom are resolved in a rebuilt module whose window holds every such
    image: ``depth * N + (depth - 1) * S``.

    Args:
        module: Module whose radical is computed
        bound: Cap on the other coordinate of raising generators; defaults to
            the module's ``raising_bound``
        widen: Whether to resolve targets in a widened rebuild of the module
    """

    def __init__(self, module: TruncatedModule, bound: Optional[int] = None, widen: bool = True):
        super().__init__(module)
        bad = [k for k in module.keys() if module.level(k) > 0]
        if bad:
            raise ValueError(f"{module.name} has keys above its top level: {bad[:3]}")
        self.bound = module.truncation.raising_bound if bound is None else bound
        self._rows: Dict[GradeKey, Tuple[SparseMatrix, Tuple[int, ...]]] = {}
        self._ambient: Optional[RadicalSlice] = None
        depth = -min((module.level(k) for k in module.keys()), default=0)
        if widen and module.widen is not None and depth >= 2:
            window = depth * module.truncation.window + (depth - 1) * self.bound
            wider = module.widen(Truncation(depth=depth - 1, window=window))
            logger.debug("radical of %s resolves targets at window %d", module.name, window)
            self._ambient = RadicalSlice(wider, bound=self.bound, widen=False)

    def _target_rows(
        self, g: BasisSymbol, key: GradeKey
    ) -> Optional[Tuple[SparseMatrix, SparseMatrix]]:
        """Constraint rows at the target of ``g`` and the action matrix into that space."""
        mod = self.module
        target = mod.target(g, key)
        if self._ambient is None:
            if not mod.dim(target):
                return None
            rows_t = self.constraint_rows(target)[0]
            return (rows_t, mod.action_matrix(g, key)) if rows_t.rows else None
        wider = self._ambient.module
        if not wider.dim(target):
            return None
        rows_t = self._ambient.constraint_rows(target)[0]
        if rows_t.rows == 0:
            return None
        entries: Dict[Tuple[int, int], Fraction] = {}
        for j, label in enumerate(mod.space(key)):
            for out, c in mod.provider(g, label).items():
                if c and out in wider:
                    k, pos = wider.locate(out)
                    if k == target:
                        entries[(pos, j)] = entries.get((pos, j), Fraction(0)) + Fraction(c)
        return rows_t, SparseMatrix(wider.dim(target), mod.dim(key), entries)

    def constraint_rows(self, key: GradeKey) -> Tuple[SparseMatrix, Tuple[int, ...]]:
        """Reduced rows (rank x dim) whose kernel is the radical at ``key``, and their pivots."""
        cached = self._rows.get(key)
        if cached is not None:
            return cached
        mod = self.module
        n = mod.dim(key)
        if mod.level(key) == 0:
            result = (SparseMatrix.identity(n), tuple(range(n)))
        else:
            blocks = []
            for g in mod.raising_symbols(key, self.bound):
                pair = self._target_rows(g, key)
                if pair is None:
                    continue
                rows_t, a = pair
                if rows_t.rows == 0 or a.nnz() == 0:
                    continue
                block = rows_t.matmul(a)
                if block.nnz():
                    blocks.append(block)
            stacked = SparseMatrix.vstack(blocks, cols=n)
            reduced, pivots, r = rref(stacked)
            kept = SparseMatrix.from_row_dicts([reduced.row(i) for i in range(r)], n)
            result = (kept, pivots)
            logger.debug("radical at %s in %s: dim %d, rank %d", key, mod.name, n, r)
        self._rows[key] = result
        return result

    def quotient_dim(self, key: GradeKey) -> int:
        return len(self.constraint_rows(key)[1])

    def dim_at(self, key: GradeKey) -> int:
        return self.module.dim(key) - self.quotient_dim(key)

    def subspace(self, key: GradeKey) -> Subspace:
        cached = self._subspaces.get(key)
        if cached is None:
            rows, _ = self.constraint_rows(key)
            cached = Subspace.span(kernel_basis(rows), self.module.dim(key))
            self._subspaces[key] = cached
        return cached

    def contains(self, key: GradeKey, dense: Sequence[Fraction]) -> bool:
        rows, _ = self.constraint_rows(key)
        return not any(rows.matvec(dense))


def radical(mod: TruncatedModule) -> RadicalSlice:
    return RadicalSlice(mod)


def generated_submodule(
    mod: TruncatedModule,
    seeds: Iterable[Mapping[Label, Fraction]],
    symbols: Optional[Sequence[BasisSymbol]] = None,
) -> SubmoduleSlice:
    """
    Smallest action-closed slice containing the homogeneous components of ``seeds``.

    Args:
        mod: Module to work in
        seeds: Module vectors
        symbols: Generators to close under; defaults to every retained E/t symbol
    """
    allowed = set(symbols) if symbols is not None else None
    spaces: Dict[GradeKey, Subspace] = {}
    queue: Deque[Tuple[GradeKey, Tuple[Fraction, ...]]] = deque()

    def add(key: GradeKey, dense: Sequence[Fraction]) -> None:
        current = spaces.get(key) or Subspace.zero(mod.dim(key))
        remainder = current.reduce(dense)
        if not any(remainder):
            return
        spaces[key] = Subspace.span(current.basis + (remainder,), mod.dim(key))
        queue.append((key, remainder))

    for seed in seeds:
        for key, dense in mod.split(seed).items():
            add(key, dense)
    while queue:
        key, vec = queue.popleft()
        for g in mod.symbols_from(key):
            if allowed is not None and g not in allowed:
                continue
            image = mod.action_matrix(g, key).matvec(vec)
            if any(image):
                add(mod.target(g, key), image)
    logger.debug(
        "closure in %s: %d of %d dimensions",
        mod.name,
        sum(s.dim for s in spaces.values()),
        mod.total_dim(),
    )
    return SubmoduleSlice(mod, spaces)


def top_space_seeds(mod: TruncatedModule) -> List[ModVector]:
    return [mod.basis_vector(label) for key in mod.level_keys(0) for label in mod.space(key)]


# ==================== Quotients and restrictions ====================


def quotient_module(mod: TruncatedModule, rad: RadicalSlice, name: Optional[str] = None) -> TruncatedModule:
    """
    The module ``mod / rad``, re-based per key on the labels at the constraint pivots.

    A quotient basis label stands for the class of the original basis vector.
    """
    spaces = {}
    for key in mod.keys():
        _, pivots = rad.constraint_rows(key)
        labels = mod.space(key)
        spaces[key] = [labels[p] for p in pivots]

    def provider(symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        key, _ = mod.locate(label)
        image = mod.image(symbol, label)
        if not image:
            return {}
        target = mod.target(symbol, key)
        rows, pivots = rad.constraint_rows(target)
        target_labels = mod.space(target)
        dense: Dict[int, Fraction] = {mod.locate(w)[1]: c for w, c in image.items()}
        reduced = rows.apply_sparse(dense)
        return {target_labels[pivots[i]]: c for i, c in reduced.items()}

    return TruncatedModule(
        basis=mod.basis,
        spaces=spaces,
        provider=provider,
        algebra=mod.algebra,
        levels=mod.levels,
        truncation=mod.truncation,
        base=mod.base,
        grading=mod.grading,
        axis=mod.axis,
        orientation=mod.orientation,
        region=mod.region,
        name=name or f"{mod.name}/rad",
    )


def restrict(mod: TruncatedModule, piece: SubmoduleSlice, name: Optional[str] = None) -> TruncatedModule:
    """
    The module structure on a submodule slice.

    Each key is re-based on the slice's echelon basis; the new label at a key is
    the original label at the corresponding pivot column.
    """
    spaces: Dict[GradeKey, List[Label]] = {}
    vectors: Dict[Label, Tuple[GradeKey, Tuple[Fraction, ...]]] = {}
    for key in mod.keys():
        sub = piece.subspace(key)
        labels = mod.space(key)
        spaces[key] = [labels[p] for p in sub.pivots]
        for row, p in zip(sub.basis, sub.pivots):
            vectors[labels[p]] = (key, row)

    def provider(symbol: BasisSymbol, label: Label) -> Dict[Label, Fraction]:
        key, row = vectors[label]
        target = mod.target(symbol, key)
        if not mod.dim(target):
            return {}
        image = mod.action_matrix(symbol, key).matvec(row)
        target_labels = mod.space(target)
        sub = piece.subspace(target)
        return {target_labels[p]: image[p] for p in sub.pivots if image[p]}

    return TruncatedModule(
        basis=mod.basis,
        spaces=spaces,
        provider=provider,
        algebra=mod.algebra,
        levels=mod.levels,
        truncation=mod.truncation,
        base=mod.base,
        grading=mod.grading,
        axis=mod.axis,
        orientation=mod.orientation,
        region=mod.region,
        name=name or f"{mod.name}|slice",
    )


# ==================== Dimension tables ====================


@dataclass(frozen=True)
class DimensionTable:
    """Per-key dimensions with the base weight they are offsets of."""

    dims: Mapping[GradeKey, int] = field(default_factory=dict)
    base: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def at(self, key: GradeKey) -> int:
        return self.dims.get(tuple(key), 0)  # type: ignore[arg-type]

    def rows(self) -> List[Tuple[int, int, int]]:
        """``(offset_b1, offset_b2, dim)`` rows, top level first then by b1-offset."""
        return sorted(((k[0], k[1], d) for k, d in self.dims.items()), key=lambda r: (-r[1], r[0]))

    def level_dims(self, depth: int, axis: int = 2, orientation: int = 1) -> List[int]:
        """Dimension sums over levels 0, -1, ..., -depth."""
        sums = [0] * (depth + 1)
        for k, d in self.dims.items():
            lvl = -orientation * k[axis - 1]
            if 0 <= lvl <= depth:
                sums[lvl] += d
        return sums

    def restricted(self, keys: Iterable[GradeKey]) -> "DimensionTable":
        wanted = set(keys)
        return DimensionTable({k: d for k, d in self.dims.items() if k in wanted}, self.base)

    def shifted(self, dx1: int) -> "DimensionTable":
        return DimensionTable({(k[0] + dx1, k[1]): d for k, d in self.dims.items()}, self.base)

    def support(self) -> Set[GradeKey]:
        return {k for k, d in self.dims.items() if d}

    def to_json(self) -> Dict[str, Any]:
        return {
            "base": [str(self.base[0]), str(self.base[1])],
            "rows": [{"offset_b1": a, "offset_b2": b, "dim": d} for a, b, d in self.rows()],
        }


def dimension_table(mod: TruncatedModule) -> DimensionTable:
    return DimensionTable({k: mod.dim(k) for k in mod.keys()}, mod.base)


def quotient_dims(mod: TruncatedModule, rad: SubmoduleSlice) -> DimensionTable:
    """Per-key ``dim V - dim rad``."""
    return DimensionTable({k: mod.dim(k) - rad.dim_at(k) for k in mod.keys()}, mod.base)


def support(mod: TruncatedModule, rad: Optional[SubmoduleSlice] = None) -> Set[Weight]:
    """Weights with nonzero quotient dimension inside the truncation region."""
    table = quotient_dims(mod, rad) if rad is not None else dimension_table(mod)
    return {mod.weight(k) for k in table.support() if mod.region.contains(k)}


def support_keys(mod: TruncatedModule, rad: Optional[SubmoduleSlice] = None) -> Set[GradeKey]:
    table = quotient_dims(mod, rad) if rad is not None else dimension_table(mod)
    return {k for k in table.support() if mod.region.contains(k)}


# ==================== GHW and support checks ====================


def require_two_dimensional(mod: TruncatedModule) -> None:
    if not mod.algebra.two_dimensional:
        raise ValueError(
            f"{mod.name} is a module over {mod.algebra.value}; "
            "generalized highest weight checks need the full lattice action"
        )


def interior_keys(mod: TruncatedModule, symbols: Sequence[BasisSymbol]) -> List[GradeKey]:
    """Keys whose image under every symbol lands in the region or above the top level."""
    out = []
    for key in mod.keys():
        if not mod.region.contains(key):
            continue
        if all(
            mod.region.contains(t) or mod.level(t) > 0
            for t in (mod.target(g, key) for g in symbols)
        ):
            out.append(key)
    return out


def is_ghw_vector(
    mod: TruncatedModule, v: Mapping[Label, Fraction], b: BasisPair = STANDARD_BASIS
) -> bool:
    """True iff ``E(m) v = t^m v = 0`` for every retained ``m != 0`` in the cone Z+ b1 + Z+ b2."""
    require_two_dimensional(mod)
    for key in mod.split(v):
        for g in mod.symbols_from(key):
            if cone_contains(b, g.m, ConeMode.NONNEG) and mod.act_symbol(g, v):
                return False
    return True


def annihilation_bound(
    mod: TruncatedModule, v: Mapping[Label, Fraction], b: Optional[BasisPair] = None
) -> Optional[int]:
    """
    Smallest ``p >= 1`` with ``E(i b1 + j b2) v = t^{i b1 + j b2} v = 0`` for all retained ``(i, j) >= (p, p)``.

    Returns None when no such ``p`` exists among the retained generators.
    """
    require_two_dimensional(mod)
    basis = b or mod.basis
    parts = mod.split(v)
    if not parts:
        return 1
    symbols = {g for key in parts for g in mod.symbols_from(key)}
    living = [coords(g.m, basis) for g in symbols if mod.act_symbol(g, v)]
    if not living:
        return 1
    reach = max(max(abs(c) for c in coords(g.m, basis)) for g in mod.candidate_symbols())
    # p fails iff some living (i, j) has i >= p and j >= p
    p = max(1, max(min(i, j) for i, j in living) + 1)
    return p if p <= reach else None


class SupportViolation(NamedTuple):
    rule: str
    key: GradeKey
    witness: GradeKey


def check_support_closure(
    support_set: Iterable[GradeKey],
    region: Iterable[GradeKey],
    steps: Sequence[GradeKey] = ((1, 0), (0, 1)),
) -> List[SupportViolation]:
    """
    Check that a support is a lower set of the region in the coordinatewise order.

    ``complement-up``: a region key outside the support must have every
    single-step successor (by ``steps``) outside the support as well.
    ``support-down``: every region key below a support key lies in the support.
    """
    supp = set(support_set)
    keys = set(region)
    violations = []
    for k in sorted(keys - supp):
        for s in steps:
            nxt = (k[0] + s[0], k[1] + s[1])
            if nxt in supp:
                violations.append(SupportViolation("complement-up", k, nxt))
    for i in sorted(supp & keys):
        for k in sorted(keys - supp):
            if k[0] <= i[0] and k[1] <= i[1]:
                violations.append(SupportViolation("support-down", k, i))
    return violations
