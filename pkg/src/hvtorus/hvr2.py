"""
The rank-two Heisenberg-Virasoro algebra with its two degree derivations.

Basis symbols are ``E(m)``, ``t^m`` (``m`` a nonzero lattice vector), the
central elements ``K1..K4`` and the derivations ``d1, d2``. Brackets:

    [t^m, t^n] = 0
    [t^m, E(n)] = det(n; m) t^(m+n) + delta(m+n, 0) h(m)
    [E(m), E(n)] = det(n; m) E(m+n) + delta(m+n, 0) f(m)
    [d_i, E(m)] = m_i E(m),  [d_i, t^m] = m_i t^m

with ``h(m) = m1 K1 + m2 K2`` and ``f(m) = m1 K3 + m2 K4``.
"""

import logging
import re
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import (
    Any,
    Callable,
    Dict,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

from hvtorus.errors import ElementParseError
from hvtorus.exactla import RationalLike, format_rational, to_rational
from hvtorus.lattice import (
    STANDARD_BASIS,
    ZERO,
    BasisPair,
    LatticeVector,
    coords,
    det2,
    inverse_basis,
)

logger = logging.getLogger(__name__)


class SymbolKind(str, Enum):
    E = "E"
    T = "t"
    K = "K"
    D = "d"


_KIND_RANK = {SymbolKind.E: 0, SymbolKind.T: 1, SymbolKind.K: 2, SymbolKind.D: 3}


class BasisSymbol(NamedTuple):
    """
    One basis element of the algebra.

    ``m`` is used by E and t symbols, ``index`` by K (1..4) and d (1..2).
    Build instances with :func:`e_sym`, :func:`t_sym`, :func:`k_sym`, :func:`d_sym`.
    """

    kind: SymbolKind
    m: LatticeVector = ZERO
    index: int = 0

    def sort_key(self) -> Tuple[int, int, int, int]:
        return (_KIND_RANK[self.kind], self.m.m1, self.m.m2, self.index)

    def is_graded(self) -> bool:
        return self.kind is SymbolKind.E or self.kind is SymbolKind.T

    def __str__(self) -> str:
        if self.is_graded():
            return f"{self.kind.value}[{self.m.m1},{self.m.m2}]"
        return f"{self.kind.value}{self.index}"


def e_sym(m: Tuple[int, int]) -> BasisSymbol:
    if m[0] == 0 and m[1] == 0:
        raise ValueError("E(0) is not a basis symbol")
    return BasisSymbol(SymbolKind.E, LatticeVector(*m))


def t_sym(m: Tuple[int, int]) -> BasisSymbol:
    if m[0] == 0 and m[1] == 0:
        raise ValueError("t^0 is not a basis symbol")
    return BasisSymbol(SymbolKind.T, LatticeVector(*m))


def k_sym(i: int) -> BasisSymbol:
    if i not in (1, 2, 3, 4):
        raise ValueError(f"K index must be 1..4, got {i}")
    return BasisSymbol(SymbolKind.K, ZERO, i)


def d_sym(i: int) -> BasisSymbol:
    if i not in (1, 2):
        raise ValueError(f"d index must be 1 or 2, got {i}")
    return BasisSymbol(SymbolKind.D, ZERO, i)


def graded_sym(kind: SymbolKind, m: Tuple[int, int]) -> BasisSymbol:
    return e_sym(m) if kind is SymbolKind.E else t_sym(m)


class LieElement:
    """
    Finite rational linear combination of basis symbols.

    Zero coefficients are never stored and E(0), t^0 are dropped on construction.

    Example:
        x = E(1, 0) + Fraction(3, 2) * T(0, -1)
        bracket(x, D(1))
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[BasisSymbol, RationalLike]] = None):
        clean: Dict[BasisSymbol, Fraction] = {}
        for symbol, raw in (terms or {}).items():
            if symbol.is_graded() and symbol.m.is_zero():
                continue
            value = to_rational(raw)
            if value:
                clean[symbol] = value
        self._terms = clean

    @classmethod
    def _wrap(cls, terms: Dict[BasisSymbol, Fraction]) -> "LieElement":
        x = cls.__new__(cls)
        x._terms = {s: c for s, c in terms.items() if c}
        return x

    @classmethod
    def zero(cls) -> "LieElement":
        return cls._wrap({})

    @classmethod
    def of(cls, symbol: BasisSymbol, coefficient: RationalLike = 1) -> "LieElement":
        return cls({symbol: coefficient})

    def items(self) -> List[Tuple[BasisSymbol, Fraction]]:
        """Terms in canonical order."""
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    @property
    def terms(self) -> Dict[BasisSymbol, Fraction]:
        return dict(self._terms)

    def coefficient(self, symbol: BasisSymbol) -> Fraction:
        return self._terms.get(symbol, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[BasisSymbol]:
        return iter(sorted(self._terms, key=BasisSymbol.sort_key))

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "LieElement") -> "LieElement":
        out = dict(self._terms)
        for s, c in other._terms.items():
            out[s] = out.get(s, Fraction(0)) + c
        return LieElement._wrap(out)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __neg__(self) -> "LieElement":
        return LieElement._wrap({s: -c for s, c in self._terms.items()})

    def __mul__(self, scalar: RationalLike) -> "LieElement":
        k = to_rational(scalar)
        return LieElement._wrap({s: k * c for s, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"LieElement({format_element(self)!r})"

    def __str__(self) -> str:
        return format_element(self)


def E(m1: int, m2: int) -> LieElement:
    return LieElement({BasisSymbol(SymbolKind.E, LatticeVector(m1, m2)): 1})


def T(m1: int, m2: int) -> LieElement:
    return LieElement({BasisSymbol(SymbolKind.T, LatticeVector(m1, m2)): 1})


def K(i: int) -> LieElement:
    return LieElement.of(k_sym(i))


def D(i: int) -> LieElement:
    return LieElement.of(d_sym(i))


def h_of(m: Tuple[int, int]) -> LieElement:
    return LieElement({k_sym(1): m[0], k_sym(2): m[1]})


def f_of(m: Tuple[int, int]) -> LieElement:
    return LieElement({k_sym(3): m[0], k_sym(4): m[1]})


Terms = Tuple[Tuple[BasisSymbol, Fraction], ...]


@lru_cache(maxsize=None)
def bracket_terms(a: BasisSymbol, b: BasisSymbol) -> Terms:
    """Bracket of two basis symbols as a tuple of ``(symbol, coefficient)`` pairs."""
    ka, kb = a.kind, b.kind
    if ka is SymbolKind.K or kb is SymbolKind.K:
        return ()
    if ka is SymbolKind.D:
        if kb is SymbolKind.D:
            return ()
        c = b.m[a.index - 1]
        return ((b, Fraction(c)),) if c else ()
    if kb is SymbolKind.D:
        c = a.m[b.index - 1]
        return ((a, Fraction(-c)),) if c else ()
    if ka is SymbolKind.T and kb is SymbolKind.T:
        return ()
    if ka is SymbolKind.E and kb is SymbolKind.T:
        return tuple((s, -c) for s, c in bracket_terms(b, a))

    m, n = a.m, b.m
    total = m + n
    if not total.is_zero():
        c = det2(n, m)
        return ((BasisSymbol(ka, total), Fraction(c)),) if c else ()
    central = h_of(m) if ka is SymbolKind.T else f_of(m)
    return tuple(central.items())


def bracket(x: LieElement, y: LieElement) -> LieElement:
    out: Dict[BasisSymbol, Fraction] = {}
    for a, ca in x._terms.items():
        for b, cb in y._terms.items():
            for s, c in bracket_terms(a, b):
                out[s] = out.get(s, Fraction(0)) + ca * cb * c
    return LieElement._wrap(out)


BracketFn = Callable[[LieElement, LieElement], LieElement]


def jacobi_defect(
    x: LieElement, y: LieElement, z: LieElement, bracket_fn: BracketFn = bracket
) -> LieElement:
    """``[x,[y,z]] + [y,[z,x]] + [z,[x,y]]``; zero for a Lie bracket."""
    return (
        bracket_fn(x, bracket_fn(y, z))
        + bracket_fn(y, bracket_fn(z, x))
        + bracket_fn(z, bracket_fn(x, y))
    )


def bidegree(symbol: BasisSymbol, b: BasisPair = STANDARD_BASIS) -> Tuple[int, int]:
    """Coordinates of the symbol's degree in basis ``b``; K and d have degree zero."""
    if not symbol.is_graded():
        return (0, 0)
    return coords(symbol.m, b)


def level_of(symbol: BasisSymbol, b: BasisPair = STANDARD_BASIS) -> int:
    """The b2-coordinate of the symbol's degree."""
    return bidegree(symbol, b)[1]


class TriangularSplit(NamedTuple):
    plus: LieElement
    zero: LieElement
    minus: LieElement


def triangular_part(x: LieElement, b: BasisPair = STANDARD_BASIS) -> TriangularSplit:
    parts: Tuple[Dict[BasisSymbol, Fraction], ...] = ({}, {}, {})
    for s, c in x._terms.items():
        lvl = level_of(s, b)
        parts[0 if lvl > 0 else (2 if lvl < 0 else 1)][s] = c
    return TriangularSplit(*(LieElement._wrap(p) for p in parts))


class Subalgebra(str, Enum):
    H_B1 = "H_b1"
    E_B1 = "E_b1"
    T_B1 = "t_b1"
    E_SCRIPT = "E_script"
    HEIS_PLUS = "heis_plus"
    HEIS_MINUS = "heis_minus"


def _central_coefficients(x: LieElement) -> Tuple[Fraction, ...]:
    return tuple(x.coefficient(k_sym(i)) for i in (1, 2, 3, 4))


def in_subalgebra(x: LieElement, which: Subalgebra, b: BasisPair = STANDARD_BASIS) -> bool:
    """
    Membership test against the spanning sets of the named subalgebra.

    ``H_b1`` = <E(kb1), t^{kb1}, K_i>; ``E_b1`` = <E(kb1), f(b1)>; ``t_b1`` = <t^{kb1}>;
    ``E_script`` = <E(m), K3, K4>; ``heis_plus`` = <E(kb1), t^{-kb1}, h(b1) : k > 0> and
    ``heis_minus`` the same with the signs swapped.
    """
    which = Subalgebra(which)
    c1, c2, c3, c4 = _central_coefficients(x)
    (b11, b12) = b.b1

    for s in x._terms:
        if s.kind is SymbolKind.D:
            return False
        if s.kind is SymbolKind.K:
            continue
        k, lvl = coords(s.m, b)
        if which is Subalgebra.E_SCRIPT:
            if s.kind is not SymbolKind.E:
                return False
            continue
        if lvl != 0:
            return False
        if which is Subalgebra.E_B1 and s.kind is not SymbolKind.E:
            return False
        if which is Subalgebra.T_B1 and s.kind is not SymbolKind.T:
            return False
        if which is Subalgebra.HEIS_PLUS and (k > 0) != (s.kind is SymbolKind.E):
            return False
        if which is Subalgebra.HEIS_MINUS and (k < 0) != (s.kind is SymbolKind.E):
            return False

    if which is Subalgebra.H_B1:
        return True
    if which is Subalgebra.E_B1:
        return c1 == 0 and c2 == 0 and c3 * b12 - c4 * b11 == 0
    if which is Subalgebra.T_B1:
        return not any((c1, c2, c3, c4))
    if which is Subalgebra.E_SCRIPT:
        return c1 == 0 and c2 == 0
    return c3 == 0 and c4 == 0 and c1 * b12 - c2 * b11 == 0


def twisted_derivation(i: int, b: BasisPair = STANDARD_BASIS) -> LieElement:
    """
    The derivation reading off the ``i``-th coordinate in basis ``b``.

    ``[twisted_derivation(1, b), E(x1 b1 + x2 b2)] = x1 E(...)``, likewise for 2.
    """
    inv = inverse_basis(b)
    if i == 1:
        return LieElement({d_sym(1): inv.p1, d_sym(2): inv.p2})
    if i == 2:
        return LieElement({d_sym(1): inv.q1, d_sym(2): inv.q2})
    raise ValueError(f"twisted derivation index must be 1 or 2, got {i}")


Monomial = Tuple[BasisSymbol, ...]
Polynomial = Dict[Monomial, Fraction]


class PBWOrder:
    """
    Generator order for PBW monomials along one grading axis of a basis.

    Symbols sort by axis level descending (level -1 before -2), then by the
    other coordinate ascending, then E before t. ``left_multiply`` inserts a
    symbol into a sorted monomial by straightening and caches every result.

    Args:
        basis: Basis whose coordinates define the levels
        axis: 2 to grade by the b2-coordinate, 1 to grade by the b1-coordinate
    """

    def __init__(self, basis: BasisPair = STANDARD_BASIS, axis: int = 2):
        if axis not in (1, 2):
            raise ValueError(f"axis must be 1 or 2, got {axis}")
        self.basis = basis
        self.axis = axis
        self._keys: Dict[BasisSymbol, Tuple[int, int, int, int]] = {}
        self._products: Dict[Tuple[BasisSymbol, Monomial], Polynomial] = {}

    def key(self, s: BasisSymbol) -> Tuple[int, int, int, int]:
        cached = self._keys.get(s)
        if cached is None:
            x1, x2 = bidegree(s, self.basis)
            level, other = (x2, x1) if self.axis == 2 else (x1, x2)
            cached = (-level, other, _KIND_RANK[s.kind], s.index)
            self._keys[s] = cached
        return cached

    def level(self, s: BasisSymbol) -> int:
        return -self.key(s)[0]

    def left_multiply(self, y: BasisSymbol, mono: Monomial) -> Polynomial:
        """Normal form of ``y * mono`` for a sorted monomial ``mono``."""
        cache_key = (y, mono)
        cached = self._products.get(cache_key)
        if cached is not None:
            return cached
        if not mono or self.key(y) <= self.key(mono[0]):
            result: Polynomial = {(y,) + mono: Fraction(1)}
        else:
            z, rest = mono[0], mono[1:]
            acc: Polynomial = {}
            for m2, c2 in self.left_multiply(y, rest).items():
                for m3, c3 in self.left_multiply(z, m2).items():
                    acc[m3] = acc.get(m3, Fraction(0)) + c2 * c3
            for s, c in bracket_terms(y, z):
                for m2, c2 in self.left_multiply(s, rest).items():
                    acc[m2] = acc.get(m2, Fraction(0)) + c * c2
            result = {m: c for m, c in acc.items() if c}
        self._products[cache_key] = result
        return result

    def cache_size(self) -> int:
        return len(self._products)


def _check_nilpotent_word(word: Sequence[BasisSymbol], b: BasisPair) -> None:
    signs = set()
    for s in word:
        if not s.is_graded():
            raise ValueError(
                f"non-terminating input class: {s} lies outside the nilpotent parts"
            )
        lvl = level_of(s, b)
        signs.add((lvl > 0) - (lvl < 0))
    if 0 in signs or len(signs) > 1:
        raise ValueError(
            "non-terminating input class: symbols from mixed triangular parts"
        )


def pbw_normal_form(
    word: Sequence[BasisSymbol],
    order: Optional[Callable[[BasisSymbol], Any]] = None,
    basis: BasisPair = STANDARD_BASIS,
    schedule: str = "leftmost",
) -> Polynomial:
    """
    Straighten a word of symbols into sorted monomials.

    Args:
        word: Symbols, all in the positive part or all in the negative part of ``basis``
        order: Sort key for symbols; defaults to :class:`PBWOrder` over ``basis``
        basis: Basis defining the triangular parts
        schedule: ``"leftmost"`` or ``"rightmost"`` choice of the inversion to resolve
            first, or ``"insertion"`` to fold the word right to left with
            :meth:`PBWOrder.left_multiply`

    Returns:
        Mapping from sorted monomials to nonzero coefficients

    Raises:
        ValueError: For words mixing triangular parts or containing K or d
    """
    _check_nilpotent_word(word, basis)
    if schedule == "insertion":
        if order is not None:
            raise ValueError("insertion schedule uses the default PBWOrder")
        pbw = PBWOrder(basis)
        poly: Polynomial = {(): Fraction(1)}
        for s in reversed(word):
            nxt: Polynomial = {}
            for mono, c in poly.items():
                for m2, c2 in pbw.left_multiply(s, mono).items():
                    nxt[m2] = nxt.get(m2, Fraction(0)) + c * c2
            poly = {m: c for m, c in nxt.items() if c}
        return poly
    if schedule not in ("leftmost", "rightmost"):
        raise ValueError(f"unknown straightening schedule {schedule!r}")

    key = order if order is not None else PBWOrder(basis).key
    result: Polynomial = {}
    work: Polynomial = {tuple(word): Fraction(1)}
    while work:
        w, c = work.popitem()
        if not c:
            continue
        inversions = [i for i in range(len(w) - 1) if key(w[i]) > key(w[i + 1])]
        if not inversions:
            result[w] = result.get(w, Fraction(0)) + c
            continue
        i = inversions[0] if schedule == "leftmost" else inversions[-1]
        a, b = w[i], w[i + 1]
        swapped = w[:i] + (b, a) + w[i + 2 :]
        work[swapped] = work.get(swapped, Fraction(0)) + c
        for s, cs in bracket_terms(a, b):
            shorter = w[:i] + (s,) + w[i + 2 :]
            work[shorter] = work.get(shorter, Fraction(0)) + c * cs
    return {m: c for m, c in result.items() if c}


def symbol_pool(window: int) -> List[BasisSymbol]:
    """All basis symbols with coordinates in ``[-window, window]``."""
    pool: List[BasisSymbol] = []
    for m1 in range(-window, window + 1):
        for m2 in range(-window, window + 1):
            if m1 or m2:
                pool.append(e_sym((m1, m2)))
                pool.append(t_sym((m1, m2)))
    pool.extend(k_sym(i) for i in (1, 2, 3, 4))
    pool.extend(d_sym(i) for i in (1, 2))
    return pool


# ==================== Text syntax ====================

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<sym>[EtKd])|(?P<op>[-+*/\[\],]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if match is None:
                offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ElementParseError(f"unexpected character {text[offset]!r}", offset)
            kind = match.lastgroup or ""
            self.tokens.append((kind, match.group(kind), match.start(kind)))
            pos = match.end()
        self.i = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ElementParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, text, pos = self.take()
        if text != value:
            raise ElementParseError(f"expected {value!r}, found {text!r}", pos)

    def integer(self) -> int:
        sign = 1
        tok = self.peek()
        if tok is not None and tok[1] in "+-" and tok[0] == "op":
            sign = -1 if tok[1] == "-" else 1
            self.i += 1
        kind, text, pos = self.take()
        if kind != "num":
            raise ElementParseError(f"expected an integer, found {text!r}", pos)
        return sign * int(text)

    def coefficient(self) -> Fraction:
        _, text, _ = self.take()
        value = Fraction(int(text))
        tok = self.peek()
        if tok is not None and tok[1] == "/":
            self.i += 1
            kind, den, pos = self.take()
            if kind != "num" or int(den) == 0:
                raise ElementParseError("expected a nonzero denominator", pos)
            value /= int(den)
        return value

    def symbol(self) -> BasisSymbol:
        kind, text, pos = self.take()
        if kind != "sym":
            raise ElementParseError(f"expected a symbol, found {text!r}", pos)
        if text in ("E", "t"):
            self.expect("[")
            m1 = self.integer()
            self.expect(",")
            m2 = self.integer()
            self.expect("]")
            if m1 == 0 and m2 == 0:
                raise ElementParseError(f"{text}[0,0] is not a basis symbol", pos)
            return graded_sym(SymbolKind(text), (m1, m2))
        _, digits, dpos = self.take()
        if not digits.isdigit():
            raise ElementParseError(f"expected an index after {text!r}", dpos)
        try:
            return k_sym(int(digits)) if text == "K" else d_sym(int(digits))
        except ValueError as e:
            raise ElementParseError(str(e), dpos) from e

    def term(self, sign: int) -> Tuple[Optional[BasisSymbol], Fraction]:
        tok = self.peek()
        if tok is None:
            raise ElementParseError("expected a term", len(self.text))
        coefficient = Fraction(sign)
        if tok[0] == "num":
            coefficient *= self.coefficient()
            nxt = self.peek()
            if nxt is None or nxt[1] != "*":
                return None, coefficient
            self.i += 1
        return self.symbol(), coefficient

    def element(self) -> LieElement:
        out: Dict[BasisSymbol, Fraction] = {}
        sign = 1
        first = True
        while True:
            tok = self.peek()
            if tok is not None and tok[0] == "op" and tok[1] in "+-":
                sign = -1 if tok[1] == "-" else 1
                self.i += 1
            elif not first:
                if tok is None:
                    break
                raise ElementParseError(f"expected '+' or '-', found {tok[1]!r}", tok[2])
            start = self.peek()
            symbol, coefficient = self.term(sign)
            if symbol is None:
                if coefficient != 0:
                    pos = start[2] if start else 0
                    raise ElementParseError("bare scalar terms are not algebra elements", pos)
            else:
                out[symbol] = out.get(symbol, Fraction(0)) + coefficient
            first = False
            sign = 1
            if self.peek() is None:
                break
        return LieElement(out)


def parse_element(text: str) -> LieElement:
    """
    Parse the element syntax ``3/2*E[1,0] - t[0,-1] + K3 + d1``.

    Raises:
        ElementParseError: With the character position of the first bad token
    """
    if not text.strip():
        raise ElementParseError("empty expression", 0)
    return _Parser(text).element()


def format_element(x: LieElement) -> str:
    """Render in canonical term order, e.g. ``-1*t[1,1]`` or ``2*K1 - 1*K4``; zero is ``0``."""
    items = x.items()
    if not items:
        return "0"
    parts = []
    for i, (s, c) in enumerate(items):
        if i == 0:
            parts.append(f"{format_rational(c)}*{s}")
        elif c < 0:
            parts.append(f" - {format_rational(-c)}*{s}")
        else:
            parts.append(f" + {format_rational(c)}*{s}")
    return "".join(parts)
