"""
Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`. Row reduction is delegated to sympy's
sparse domain matrices over ``QQ``; everything returned to callers is converted
back to plain ``Fraction`` values so that the rest of the package never sees
sympy ground types.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices.sdm import SDM

from hvtorus.errors import DimensionMismatchError

logger = logging.getLogger(__name__)

Rational = Fraction
Vector = Tuple[Fraction, ...]
RowDict = Dict[int, Fraction]

# Below this many columns the reduction runs on the dense representation.
DENSE_CUTOFF = 64

RationalLike = Union[Fraction, int, str]


def to_rational(value: RationalLike) -> Fraction:
    """
    Convert an int, Fraction or "p/q" string into a Fraction.

    Args:
        value: Value to convert

    Returns:
        The value in lowest terms

    Raises:
        ValueError: If a string is not a rational literal
        TypeError: For unsupported input types
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational values")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not a rational literal: {value!r}: {e}") from e
    raise TypeError(f"Cannot interpret {type(value).__name__} as a rational")


def format_rational(value: Fraction) -> str:
    """Render ``p/q``, or ``p`` when the denominator is 1."""
    return str(Fraction(value))


def _to_qq(value: Fraction) -> object:
    return QQ(value.numerator, value.denominator)


def _from_qq(value: object) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))  # type: ignore[attr-defined]


class SparseMatrix:
    """
    Immutable sparse rational matrix stored row-wise.

    Zero entries are never stored. Row and column indices are zero-based.
    """

    __slots__ = ("_rows", "_shape")

    def __init__(
        self,
        rows: int,
        cols: int,
        entries: Optional[Mapping[Tuple[int, int], RationalLike]] = None,
    ):
        if rows < 0 or cols < 0:
            raise DimensionMismatchError(f"Negative matrix shape ({rows}, {cols})")
        data: Dict[int, RowDict] = {}
        for (i, j), raw in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionMismatchError(f"Entry ({i}, {j}) outside shape ({rows}, {cols})")
            value = to_rational(raw)
            if value:
                data.setdefault(i, {})[j] = value
        self._rows = data
        self._shape = (rows, cols)

    @classmethod
    def _from_row_dicts_unchecked(
        cls, rows: int, cols: int, data: Dict[int, RowDict]
    ) -> "SparseMatrix":
        m = cls.__new__(cls)
        m._rows = {i: r for i, r in data.items() if r}
        m._shape = (rows, cols)
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "SparseMatrix":
        """Build from a dense list of rows."""
        ncols = len(rows[0]) if rows else 0
        entries: Dict[Tuple[int, int], RationalLike] = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionMismatchError("Ragged rows")
            for j, value in enumerate(row):
                entries[(i, j)] = value
        return cls(len(rows), ncols, entries)

    @classmethod
    def from_row_dicts(cls, row_dicts: Sequence[Mapping[int, Fraction]], cols: int) -> "SparseMatrix":
        """Build from one ``{column: value}`` mapping per row."""
        data: Dict[int, RowDict] = {}
        for i, row in enumerate(row_dicts):
            clean = {}
            for j, value in row.items():
                if not 0 <= j < cols:
                    raise DimensionMismatchError(f"Column {j} outside width {cols}")
                if value:
                    clean[j] = Fraction(value)
            if clean:
                data[i] = clean
        return cls._from_row_dicts_unchecked(len(row_dicts), cols, data)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls._from_row_dicts_unchecked(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self._shape

    @property
    def rows(self) -> int:
        return self._shape[0]

    @property
    def cols(self) -> int:
        return self._shape[1]

    @property
    def entries(self) -> Dict[Tuple[int, int], Fraction]:
        """Copy of the nonzero entries keyed by (row, col)."""
        return {(i, j): v for i, row in self._rows.items() for j, v in row.items()}

    def row(self, i: int) -> RowDict:
        return dict(self._rows.get(i, {}))

    def row_dicts(self) -> List[RowDict]:
        return [dict(self._rows.get(i, {})) for i in range(self.rows)]

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for i, row in self._rows.items():
            for j, v in row.items():
                out[i][j] = v
        return out

    def matvec(self, v: Sequence[Fraction]) -> Vector:
        """Return ``self @ v`` for a dense vector."""
        if len(v) != self.cols:
            raise DimensionMismatchError(f"Vector of length {len(v)} for {self.cols} columns")
        out = [Fraction(0)] * self.rows
        for i, row in self._rows.items():
            acc = Fraction(0)
            for j, a in row.items():
                x = v[j]
                if x:
                    acc += a * x
            out[i] = acc
        return tuple(out)

    def apply_sparse(self, v: Mapping[int, Fraction]) -> RowDict:
        """Return ``self @ v`` for a sparse column vector, as a sparse mapping."""
        out: RowDict = {}
        for i, row in self._rows.items():
            acc = Fraction(0)
            for j, a in row.items():
                x = v.get(j)
                if x:
                    acc += a * x
            if acc:
                out[i] = acc
        return out

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"Cannot multiply {self.shape} by {other.shape}")
        data: Dict[int, RowDict] = {}
        for i, row in self._rows.items():
            acc: RowDict = {}
            for k, a in row.items():
                for j, b in other._rows.get(k, {}).items():
                    acc[j] = acc.get(j, Fraction(0)) + a * b
            data[i] = {j: x for j, x in acc.items() if x}
        return SparseMatrix._from_row_dicts_unchecked(self.rows, other.cols, data)

    def transpose(self) -> "SparseMatrix":
        data: Dict[int, RowDict] = {}
        for i, row in self._rows.items():
            for j, v in row.items():
                data.setdefault(j, {})[i] = v
        return SparseMatrix._from_row_dicts_unchecked(self.cols, self.rows, data)

    @staticmethod
    def vstack(blocks: Sequence["SparseMatrix"], cols: Optional[int] = None) -> "SparseMatrix":
        """Stack matrices vertically; ``cols`` is required when ``blocks`` is empty."""
        width = blocks[0].cols if blocks else cols
        if width is None:
            raise DimensionMismatchError("Width required to stack zero blocks")
        data: Dict[int, RowDict] = {}
        offset = 0
        for block in blocks:
            if block.cols != width:
                raise DimensionMismatchError(f"Cannot stack width {block.cols} under {width}")
            for i, row in block._rows.items():
                data[offset + i] = dict(row)
            offset += block.rows
        return SparseMatrix._from_row_dicts_unchecked(offset, width, data)

    def _to_sdm(self) -> SDM:
        elements = {i: {j: _to_qq(v) for j, v in row.items()} for i, row in self._rows.items()}
        return SDM(elements, self._shape, QQ)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self._shape == other._shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._shape, tuple(sorted(self.entries.items()))))

    def __repr__(self) -> str:
        return f"SparseMatrix(shape={self._shape}, nnz={self.nnz()})"


def rref(m: SparseMatrix) -> Tuple[SparseMatrix, Tuple[int, ...], int]:
    """
    Reduced row-echelon form.

    Args:
        m: Matrix to reduce

    Returns:
        Tuple of (reduced matrix with the same shape, pivot columns, rank).
        Nonzero rows come first, ordered by pivot column.
    """
    if not m._rows:
        return SparseMatrix.zero(m.rows, m.cols), (), 0

    sdm = m._to_sdm()
    if m.cols < DENSE_CUTOFF:
        reduced_ddm, _ = sdm.to_ddm().rref()
        raw_rows = [
            {j: x for j, x in enumerate(row) if x} for row in reduced_ddm
        ]
    else:
        reduced_sdm, _ = sdm.rref()
        raw_rows = [dict(row) for _, row in sorted(reduced_sdm.items())]

    converted = []
    for row in raw_rows:
        if not row:
            continue
        converted.append({j: _from_qq(x) for j, x in row.items() if x})
    converted.sort(key=min)
    pivots = tuple(min(row) for row in converted)
    data = dict(enumerate(converted))
    return SparseMatrix._from_row_dicts_unchecked(m.rows, m.cols, data), pivots, len(pivots)


def rank(m: SparseMatrix) -> int:
    return rref(m)[2]


def kernel_basis(m: SparseMatrix) -> List[Vector]:
    """
    Basis of the null space ``{v : m @ v = 0}``.

    One vector per non-pivot column, in increasing column order; the vector for a
    free column ``f`` has a 1 in position ``f``.
    """
    reduced, pivots, r = rref(m)
    pivot_set = set(pivots)
    basis: List[Vector] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for i, p in enumerate(pivots):
            coefficient = reduced._rows.get(i, {}).get(free)
            if coefficient:
                v[p] = -coefficient
        basis.append(tuple(v))
    logger.debug("kernel of %s: rank %d, nullity %d", m.shape, r, len(basis))
    return basis


@dataclass(frozen=True)
class Subspace:
    """
    Subspace of ``QQ^ambient_dim`` stored by its reduced row-echelon basis.

    Use :meth:`span` rather than the constructor; the constructor trusts its input.
    """

    ambient_dim: int
    basis: Tuple[Vector, ...] = ()
    pivots: Tuple[int, ...] = ()

    @classmethod
    def span(cls, vectors: Iterable[Sequence[RationalLike]], ambient_dim: int) -> "Subspace":
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatchError(
                    f"Vector of length {len(v)} in ambient dimension {ambient_dim}"
                )
            rows.append({j: to_rational(x) for j, x in enumerate(v) if to_rational(x)})
        return cls._from_row_dicts(rows, ambient_dim)

    @classmethod
    def _from_row_dicts(cls, rows: Sequence[Mapping[int, Fraction]], ambient_dim: int) -> "Subspace":
        if not any(rows):
            return cls.zero(ambient_dim)
        reduced, pivots, r = rref(SparseMatrix.from_row_dicts(rows, ambient_dim))
        basis = []
        for i in range(r):
            dense = [Fraction(0)] * ambient_dim
            for j, x in reduced._rows[i].items():
                dense[j] = x
            basis.append(tuple(dense))
        return cls(ambient_dim, tuple(basis), pivots)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        basis = tuple(
            tuple(Fraction(int(i == j)) for j in range(ambient_dim)) for i in range(ambient_dim)
        )
        return cls(ambient_dim, basis, tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _check(self, v: Sequence[Fraction]) -> None:
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError(
                f"Vector of length {len(v)} in ambient dimension {self.ambient_dim}"
            )

    def reduce(self, v: Sequence[RationalLike]) -> Vector:
        """Remainder of ``v`` after eliminating every pivot coordinate."""
        self._check(v)
        out = [to_rational(x) for x in v]
        for row, p in zip(self.basis, self.pivots):
            c = out[p]
            if c:
                for j, x in enumerate(row):
                    if x:
                        out[j] -= c * x
        return tuple(out)

    def contains(self, v: Sequence[RationalLike]) -> bool:
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence[RationalLike]) -> Vector:
        """Coordinates of a member vector with respect to the echelon basis."""
        if not self.contains(v):
            raise ValueError("Vector is not in the subspace")
        return tuple(to_rational(v[p]) for p in self.pivots)

    def __contains__(self, v: object) -> bool:
        return self.contains(v)  # type: ignore[arg-type]


def subspace_contains(s: Subspace, v: Sequence[RationalLike]) -> bool:
    return s.contains(v)


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"Ambient dimensions differ: {a.ambient_dim} and {b.ambient_dim}"
        )


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return Subspace.span(a.basis + b.basis, a.ambient_dim)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """
    Exact intersection of two subspaces.

    Solves ``x @ A = y @ B`` through the kernel of ``[A^T | -B^T]``.
    """
    _check_same_ambient(a, b)
    n = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n)
    k = a.dim
    entries: Dict[Tuple[int, int], RationalLike] = {}
    for c, row in enumerate(a.basis):
        for j, x in enumerate(row):
            if x:
                entries[(j, c)] = x
    for c, row in enumerate(b.basis):
        for j, x in enumerate(row):
            if x:
                entries[(j, k + c)] = -x
    system = SparseMatrix(n, k + b.dim, entries)
    vectors = []
    for sol in kernel_basis(system):
        v = [Fraction(0)] * n
        for c in range(k):
            if sol[c]:
                for j, x in enumerate(a.basis[c]):
                    if x:
                        v[j] += sol[c] * x
        vectors.append(v)
    return Subspace.span(vectors, n)
