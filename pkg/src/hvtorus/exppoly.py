"""
Exp-polynomial functions, linear recurrences and linear functions on H_b1.

A linear function rho on ``H_b1 = <E(k b1), t^{k b1}, K_i>`` with
``rho(f(b1)) = rho(h(b1)) = 0`` is encoded by the two sequences

    g1(m) = m * rho(E(m b1)),   g2(m) = m * rho(t^{m b1})   (m != 0)
    g1(0) = det(b1; b2) * rho(f(b2)),   g2(0) = det(b1; b2) * rho(h(b2))

and the highest-weight module V(rho) has finite-dimensional weight spaces
exactly when both sequences are exp-polynomial, i.e. satisfy one common
recurrence with nonzero extreme coefficients.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import sympy
from pydantic import Field, model_validator

from hvtorus.exactla import SparseMatrix, kernel_basis, to_rational
from hvtorus.lattice import STANDARD_BASIS, BasisPair
from hvtorus.model import FrozenModel, RationalValue

logger = logging.getLogger(__name__)

Evaluator = Callable[[int], Fraction]

_X = sympy.Symbol("x")


class ExpTerm(FrozenModel):
    """One term ``c * n**m * a**n``."""

    c: RationalValue
    m: int = Field(ge=0)
    a: RationalValue

    @model_validator(mode="after")
    def _check_nonzero(self) -> "ExpTerm":
        if self.c == 0:
            raise ValueError("exp-polynomial coefficient c must be nonzero")
        if self.a == 0:
            raise ValueError("exponential base a must be nonzero")
        return self


class ExpPolynomial(FrozenModel):
    """
    Finite sum ``f(n) = sum c * n**m * a**n``; the empty sum is the zero function.

    Accepts a bare list of terms when validated from JSON.

    Example:
        f = ExpPolynomial.of((1, 1, 2))   # n * 2**n
        f(-1)                              # Fraction(-1, 2)
    """

    terms: Tuple[ExpTerm, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _accept_list(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            return {"terms": list(data)}
        return data

    @model_validator(mode="after")
    def _check_distinct(self) -> "ExpPolynomial":
        seen = set()
        for term in self.terms:
            key = (term.m, term.a)
            if key in seen:
                raise ValueError(f"duplicate (m, a) pair {term.m}, {term.a} in exp-polynomial")
            seen.add(key)
        return self

    @classmethod
    def of(cls, *triples: Tuple[Any, int, Any]) -> "ExpPolynomial":
        return cls(terms=tuple(ExpTerm(c=c, m=m, a=a) for c, m, a in triples))

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, n: int) -> Fraction:
        return evaluate(self, n)

    def to_json(self) -> List[Dict[str, Any]]:
        return [term.model_dump(mode="json") for term in self.terms]


def evaluate(f: ExpPolynomial, n: int) -> Fraction:
    """Exact value of ``f`` at ``n``; negative ``n`` uses rational powers of ``a``."""
    total = Fraction(0)
    for term in f.terms:
        total += term.c * Fraction(n) ** term.m * term.a**n
    return total


class Recurrence(FrozenModel):
    """
    Coefficients ``a_0..a_n`` of ``sum a_i g(m + i) = 0`` with ``a_0 * a_n != 0``.
    """

    coeffs: Tuple[RationalValue, ...]

    @model_validator(mode="after")
    def _check_extremes(self) -> "Recurrence":
        if len(self.coeffs) < 2:
            raise ValueError("a recurrence needs order at least 1")
        if self.coeffs[0] == 0 or self.coeffs[-1] == 0:
            raise ValueError("recurrence requires a_0 * a_n != 0")
        return self

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def annihilates(self, g: Evaluator, lo: int, hi: int) -> bool:
        return satisfies_recurrence(g, self, lo, hi)

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]


def _sympy_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _poly_to_recurrence(poly: sympy.Poly) -> Recurrence:
    ascending = [sympy.Rational(c) for c in reversed(poly.all_coeffs())]
    return Recurrence(coeffs=tuple(Fraction(int(c.p), int(c.q)) for c in ascending))


def _recurrence_to_poly(rec: Recurrence) -> sympy.Poly:
    descending = [_sympy_rational(c) for c in reversed(rec.coeffs)]
    return sympy.Poly(descending, _X, domain=sympy.QQ)


def characteristic_recurrence(f: ExpPolynomial) -> Recurrence:
    """
    Recurrence with characteristic polynomial ``prod over bases a of (x - a)**(max m + 1)``.

    Raises:
        ValueError: For the zero function
    """
    if f.is_zero():
        raise ValueError("the zero function has no characteristic recurrence")
    multiplicity: Dict[Fraction, int] = {}
    for term in f.terms:
        multiplicity[term.a] = max(multiplicity.get(term.a, 0), term.m + 1)
    poly = sympy.Poly(1, _X, domain=sympy.QQ)
    for a in sorted(multiplicity):
        poly = poly * sympy.Poly(_X - _sympy_rational(a), _X, domain=sympy.QQ) ** multiplicity[a]
    return _poly_to_recurrence(poly)


def merge_recurrences(r: Recurrence, s: Recurrence) -> Recurrence:
    """Recurrence whose characteristic polynomial is the product of both."""
    return _poly_to_recurrence(_recurrence_to_poly(r) * _recurrence_to_poly(s))


def satisfies_recurrence(g: Evaluator, rec: Recurrence, lo: int, hi: int) -> bool:
    """True iff ``sum a_i g(m + i) = 0`` for every ``m`` with ``[m, m + n]`` inside ``[lo, hi]``."""
    n = rec.order
    values = {k: to_rational(g(k)) for k in range(lo, hi + 1)}
    for m in range(lo, hi - n + 1):
        if sum((a * values[m + i] for i, a in enumerate(rec.coeffs)), Fraction(0)) != 0:
            return False
    return True


class RhoKind(str, Enum):
    TABLE = "table"
    EXPPOLY = "exppoly"


class RhoSpec(FrozenModel):
    """
    A linear function rho on H_b1 with ``rho(f(b1)) = rho(h(b1)) = 0``.

    Table kind stores finitely many values ``rho(E(k b1))`` (``E``) and
    ``rho(t^{k b1})`` (``t``) plus ``rho(f(b2))`` and ``rho(h(b2))``; unlisted
    values are zero. Exp-polynomial kind stores ``g1`` and ``g2``; the central
    values are derived from ``g1(0)``, ``g2(0)`` and ``orientation``, the
    determinant of the basis the function is meant for.

    Example:
        RhoSpec.model_validate({"kind": "table", "E": {"2": "1", "-2": "1"}})
        RhoSpec.model_validate({"kind": "exppoly", "g1": [{"c": "1", "m": 1, "a": "1"}]})
    """

    kind: RhoKind
    E: Dict[int, RationalValue] = Field(default_factory=dict)
    t: Dict[int, RationalValue] = Field(default_factory=dict)
    f_b2: Optional[RationalValue] = None
    h_b2: Optional[RationalValue] = None
    g1: ExpPolynomial = Field(default_factory=ExpPolynomial)
    g2: ExpPolynomial = Field(default_factory=ExpPolynomial)
    orientation: int = 1

    @model_validator(mode="after")
    def _check_kind(self) -> "RhoSpec":
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {self.orientation}")
        if self.kind is RhoKind.TABLE:
            if self.g1.terms or self.g2.terms:
                raise ValueError("table-kind rho does not take g1/g2")
            if 0 in self.E or 0 in self.t:
                raise ValueError("table keys are the nonzero multiples k of b1")
            return self
        if self.E or self.t:
            raise ValueError("exppoly-kind rho is given by g1/g2, not by tables")
        derived_f = self.g1(0) * self.orientation
        derived_h = self.g2(0) * self.orientation
        if self.f_b2 is not None and self.f_b2 != derived_f:
            raise ValueError(
                f"f_b2 = {self.f_b2} is inconsistent with g1(0)/det = {derived_f}"
            )
        if self.h_b2 is not None and self.h_b2 != derived_h:
            raise ValueError(
                f"h_b2 = {self.h_b2} is inconsistent with g2(0)/det = {derived_h}"
            )
        return self

    @classmethod
    def zero(cls) -> "RhoSpec":
        return cls(kind=RhoKind.TABLE)

    @classmethod
    def table(
        cls,
        E: Optional[Dict[int, Any]] = None,
        t: Optional[Dict[int, Any]] = None,
        f_b2: Any = 0,
        h_b2: Any = 0,
    ) -> "RhoSpec":
        return cls(kind=RhoKind.TABLE, E=E or {}, t=t or {}, f_b2=f_b2, h_b2=h_b2)

    @classmethod
    def from_exp(
        cls,
        g1: Optional[ExpPolynomial] = None,
        g2: Optional[ExpPolynomial] = None,
        orientation: int = 1,
    ) -> "RhoSpec":
        return cls(
            kind=RhoKind.EXPPOLY,
            g1=g1 or ExpPolynomial(),
            g2=g2 or ExpPolynomial(),
            orientation=orientation,
        )

    def e_value(self, k: int) -> Fraction:
        """``rho(E(k b1))``; zero at ``k = 0``."""
        if k == 0:
            return Fraction(0)
        if self.kind is RhoKind.TABLE:
            return self.E.get(k, Fraction(0))
        return self.g1(k) / k

    def t_value(self, k: int) -> Fraction:
        if k == 0:
            return Fraction(0)
        if self.kind is RhoKind.TABLE:
            return self.t.get(k, Fraction(0))
        return self.g2(k) / k

    def f_b2_value(self) -> Fraction:
        if self.kind is RhoKind.TABLE:
            return self.f_b2 if self.f_b2 is not None else Fraction(0)
        return self.g1(0) * self.orientation

    def h_b2_value(self) -> Fraction:
        if self.kind is RhoKind.TABLE:
            return self.h_b2 if self.h_b2 is not None else Fraction(0)
        return self.g2(0) * self.orientation

    def level_values(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """``(rho(f(b1)), rho(h(b1)), rho(f(b2)), rho(h(b2)))``."""
        return (Fraction(0), Fraction(0), self.f_b2_value(), self.h_b2_value())

    def check_basis(self, b: BasisPair) -> None:
        """
        Raises:
            ValueError: If an exp-polynomial rho was written for a basis of the other orientation
        """
        if self.kind is RhoKind.EXPPOLY and self.orientation != b.det:
            raise ValueError(
                f"rho has orientation {self.orientation} but the basis has determinant {b.det}"
            )

    def support(self, bound: int) -> List[int]:
        """Nonzero ``k`` with ``|k| <= bound`` where ``E(k b1)`` or ``t^{k b1}`` acts nontrivially."""
        return [
            k
            for k in range(-bound, bound + 1)
            if k and (self.e_value(k) or self.t_value(k))
        ]

    def has_e_values(self, bound: int) -> bool:
        return any(self.e_value(k) for k in range(-bound, bound + 1))

    def is_zero(self, bound: int) -> bool:
        return not self.support(bound) and not self.f_b2_value() and not self.h_b2_value()

    def to_json(self) -> Dict[str, Any]:
        if self.kind is RhoKind.TABLE:
            return {
                "kind": "table",
                "E": {str(k): str(v) for k, v in sorted(self.E.items())},
                "t": {str(k): str(v) for k, v in sorted(self.t.items())},
                "f_b2": str(self.f_b2_value()),
                "h_b2": str(self.h_b2_value()),
            }
        return {
            "kind": "exppoly",
            "g1": self.g1.to_json(),
            "g2": self.g2.to_json(),
            "orientation": self.orientation,
        }


class GPair(NamedTuple):
    g1: Evaluator
    g2: Evaluator


def rho_to_g(rho: RhoSpec, b: BasisPair = STANDARD_BASIS) -> GPair:
    """The sequences ``g1(m) = m rho(E(m b1))``, ``g2(m) = m rho(t^{m b1})`` with their m = 0 values."""
    rho.check_basis(b)
    det = b.det

    def g1(m: int) -> Fraction:
        return det * rho.f_b2_value() if m == 0 else m * rho.e_value(m)

    def g2(m: int) -> Fraction:
        return det * rho.h_b2_value() if m == 0 else m * rho.t_value(m)

    return GPair(g1, g2)


def g_to_rho(g1: ExpPolynomial, g2: ExpPolynomial, b: BasisPair = STANDARD_BASIS) -> RhoSpec:
    """Exp-polynomial-kind rho with ``rho(E(m b1)) = g1(m)/m`` and ``f_b2 = g1(0)/det``."""
    return RhoSpec.from_exp(g1, g2, orientation=b.det)


def table_from_functions(
    g1: Evaluator, g2: Evaluator, b: BasisPair = STANDARD_BASIS, bound: int = 0
) -> RhoSpec:
    """Table-kind rho reproducing ``g1``, ``g2`` on ``[-bound, bound]`` and zero outside."""
    det = b.det
    E: Dict[int, Fraction] = {}
    t: Dict[int, Fraction] = {}
    for k in range(-bound, bound + 1):
        if k == 0:
            continue
        e = to_rational(g1(k)) / k
        if e:
            E[k] = e
        v = to_rational(g2(k)) / k
        if v:
            t[k] = v
    return RhoSpec.table(E=E, t=t, f_b2=to_rational(g1(0)) * det, h_b2=to_rational(g2(0)) * det)


class ExpVerdict(NamedTuple):
    status: str  # "yes" or "undetermined"
    witness: Optional[Recurrence] = None

    @property
    def found(self) -> bool:
        return self.status == "yes"


def _pick_witness(kernel: Sequence[Sequence[Fraction]]) -> Optional[Tuple[Fraction, ...]]:
    """A kernel combination with nonzero first and last coefficient, if one exists."""
    size = len(kernel)
    width = len(kernel[0])
    # a_0 and a_n of sum j**i v_i are polynomials in j of degree < size
    for j in range(2 * size):
        v = [Fraction(0)] * width
        for i, vec in enumerate(kernel):
            weight = Fraction(j) ** i
            for col, x in enumerate(vec):
                v[col] += weight * x
        if v[0] and v[-1]:
            last = v[-1]
            return tuple(x / last for x in v)
    return None


def is_exp_polynomial_over_H(
    rho: RhoSpec,
    b: BasisPair = STANDARD_BASIS,
    order_bound: int = 4,
    lo: int = -12,
    hi: int = 12,
) -> ExpVerdict:
    """
    Search for one recurrence of order at most ``order_bound`` annihilating both g1 and g2.

    The search solves the Hankel-style system ``sum a_i g(m + i) = 0`` over every
    window position in ``[lo, hi]``, for g1 and g2 jointly, order by order.

    Returns:
        ``ExpVerdict("yes", witness)`` normalized to ``a_n = 1``, otherwise
        ``ExpVerdict("undetermined")``. Absence within a finite range is never reported as "no".

    Raises:
        ValueError: If the range is shorter than ``3 * order_bound``
    """
    if order_bound < 1:
        raise ValueError("order_bound must be at least 1")
    if hi - lo + 1 < 3 * order_bound:
        raise ValueError(
            f"range [{lo}, {hi}] is shorter than 3 * order_bound = {3 * order_bound}"
        )
    g1, g2 = rho_to_g(rho, b)
    tables = [[g1(k) for k in range(lo, hi + 1)], [g2(k) for k in range(lo, hi + 1)]]
    length = hi - lo + 1

    for n in range(1, order_bound + 1):
        rows = [
            [table[s + i] for i in range(n + 1)]
            for table in tables
            for s in range(length - n)
        ]
        kernel = kernel_basis(SparseMatrix.from_rows(rows))
        logger.debug("recurrence search order %d: kernel dimension %d", n, len(kernel))
        if not kernel:
            continue
        witness = _pick_witness(kernel)
        if witness is not None:
            return ExpVerdict("yes", Recurrence(coeffs=witness))
    return ExpVerdict("undetermined")
