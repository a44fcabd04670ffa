"""
The lattice Gamma = Z e1 + Z e2, its Z-bases and cones.

Vectors are written in standard coordinates. Basis-dependent notions take an
explicit :class:`BasisPair`.
"""

from enum import Enum
from typing import NamedTuple, Optional, Tuple

from pydantic import model_validator

from hvtorus.model import FrozenModel


class LatticeVector(NamedTuple):
    """Integer vector ``m1*e1 + m2*e2``; serializes as ``[m1, m2]``."""

    m1: int
    m2: int

    def __add__(self, other: "LatticeVector") -> "LatticeVector":  # type: ignore[override]
        return LatticeVector(self.m1 + other[0], self.m2 + other[1])

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(self.m1 - other[0], self.m2 - other[1])

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(-self.m1, -self.m2)

    def __mul__(self, k: int) -> "LatticeVector":  # type: ignore[override]
        return LatticeVector(k * self.m1, k * self.m2)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.m1 == 0 and self.m2 == 0


ZERO = LatticeVector(0, 0)


def det2(b1: Tuple[int, int], b2: Tuple[int, int]) -> int:
    """Determinant of the 2x2 matrix with rows ``b1`` and ``b2``."""
    return b1[0] * b2[1] - b1[1] * b2[0]


def is_zbasis(b1: Tuple[int, int], b2: Tuple[int, int]) -> bool:
    return abs(det2(b1, b2)) == 1


class BasisPair(FrozenModel):
    """
    A Z-basis ``{b1, b2}`` of the lattice.

    Example:
        b = BasisPair(b1=(2, 1), b2=(1, 1))
        coords(LatticeVector(3, 2), b)  # (1, 1)
    """

    b1: LatticeVector
    b2: LatticeVector

    @model_validator(mode="after")
    def _check_unimodular(self) -> "BasisPair":
        if not is_zbasis(self.b1, self.b2):
            raise ValueError(
                f"{tuple(self.b1)}, {tuple(self.b2)} is not a Z-basis "
                f"(determinant {det2(self.b1, self.b2)}, expected +1 or -1)"
            )
        return self

    @property
    def det(self) -> int:
        return det2(self.b1, self.b2)

    def to_json(self) -> dict:
        return {"b1": list(self.b1), "b2": list(self.b2)}


STANDARD_BASIS = BasisPair(b1=LatticeVector(1, 0), b2=LatticeVector(0, 1))


def coords(v: Tuple[int, int], b: BasisPair) -> Tuple[int, int]:
    """Coordinates ``(x1, x2)`` with ``v = x1*b1 + x2*b2``."""
    d = b.det
    x1 = (v[0] * b.b2.m2 - v[1] * b.b2.m1) * d
    x2 = (b.b1.m1 * v[1] - b.b1.m2 * v[0]) * d
    return x1, x2


def from_coords(x1: int, x2: int, b: BasisPair) -> LatticeVector:
    return LatticeVector(x1 * b.b1.m1 + x2 * b.b2.m1, x1 * b.b1.m2 + x2 * b.b2.m2)


class ConeMode(str, Enum):
    """Cones spanned by a basis: Z+ x Z+, N x N, and Z x N (the positive triangular part)."""

    NONNEG = "nonneg"
    STRICT_POS = "strict-pos"
    MIXED_Z_N = "mixed-Z-N"


def cone_contains(b: BasisPair, v: Tuple[int, int], mode: ConeMode = ConeMode.NONNEG) -> bool:
    x1, x2 = coords(v, b)
    mode = ConeMode(mode)
    if mode is ConeMode.NONNEG:
        return x1 >= 0 and x2 >= 0
    if mode is ConeMode.STRICT_POS:
        return x1 > 0 and x2 > 0
    return x2 > 0


class InverseBasisMatrix(NamedTuple):
    """Entries of the inverse of the row matrix ``(b1; b2)``, laid out as ``[[p1, q1], [p2, q2]]``."""

    p1: int
    p2: int
    q1: int
    q2: int


def inverse_basis(b: BasisPair) -> InverseBasisMatrix:
    d = b.det
    (b11, b12), (b21, b22) = b.b1, b.b2
    return InverseBasisMatrix(p1=b22 * d, p2=-b21 * d, q1=-b12 * d, q2=b11 * d)


def strictly_greater(x: Tuple[int, int], y: Tuple[int, int]) -> bool:
    """``x > y`` in the product order: both coordinates strictly larger."""
    return x[0] > y[0] and x[1] > y[1]


def greater_or_equal(x: Tuple[int, int], y: Tuple[int, int]) -> bool:
    return x[0] >= y[0] and x[1] >= y[1]


def compare(x: Tuple[int, int], y: Tuple[int, int]) -> Optional[int]:
    """
    Compare coordinate pairs in the partial order.

    Returns:
        0 when equal, 1 when ``x > y``, -1 when ``y > x``, None otherwise
        (including ties in a single coordinate).
    """
    if tuple(x) == tuple(y):
        return 0
    if strictly_greater(x, y):
        return 1
    if strictly_greater(y, x):
        return -1
    return None


def ghw_basis(b: BasisPair) -> BasisPair:
    """The basis ``{b1 + b2, b1 + 2 b2}`` under which induced irreducible quotients are GHW."""
    return BasisPair(b1=b.b1 + b.b2, b2=b.b1 + 2 * b.b2)


def basis_change_witness(b: BasisPair) -> BasisPair:
    """
    The basis ``{2 b1 + b2, 3 b1 + b2}``.

    A vector killed by E(b1), E(b2) and t^{b1} is killed by the whole positive
    cone of this basis.
    """
    return BasisPair(b1=2 * b.b1 + b.b2, b2=3 * b.b1 + b.b2)
