"""Polynomials in two idempotent non-commuting variables ``x`` and ``y``.

Every reduced word in ``x, y`` (with ``x*x = x`` and ``y*y = y``) alternates
between the two letters, so it is determined by its first letter and its
length.  A polynomial is a finite map from such words to complex
coefficients.  Coefficients are kept exact (pairs of ``Fraction``) whenever
they come from rational literals, so that membership in the kernel of the
abelianization map is an exact equality test.

>>> f = parse("x*y - y*x")
>>> str(f * f)
'-x*y*x - y*x*y + (x*y)^2 + (y*x)^2'
>>> in_ker_T(f)
True
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from .errors import ParseError

__all__ = [
    "Scalar",
    "Word",
    "UNIT",
    "NcPoly",
    "Decomposition",
    "AbelianImage",
    "parse",
    "mul",
    "star",
    "decompose",
    "abelianize",
    "in_ker_T",
]

_OTHER = {"x": "y", "y": "x"}


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


def _as_real(v):
    if isinstance(v, (Fraction, int)):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise TypeError(f"unsupported real component {v!r}")


@dataclass(frozen=True)
class Scalar:
    """Complex number with rational (exact) or float components."""

    re: Fraction | float = Fraction(0)
    im: Fraction | float = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _as_real(self.re))
        object.__setattr__(self, "im", _as_real(self.im))

    @classmethod
    def of(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a coefficient")
        if isinstance(value, (int, Fraction, float)):
            return cls(value, 0)
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        if isinstance(value, Number):
            return cls(float(value.real), float(value.imag))
        raise TypeError(f"cannot use {value!r} as a coefficient")

    @property
    def exact(self) -> bool:
        return isinstance(self.re, Fraction) and isinstance(self.im, Fraction)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __add__(self, other):
        o = Scalar.of(other)
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = Scalar.of(other)
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return Scalar.of(other) - self

    def __mul__(self, other):
        o = Scalar.of(other)
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Scalar({_fmt_real(self.re)}, {_fmt_real(self.im)})"


def _fmt_real(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def _fmt_coeff(c: Scalar) -> tuple[str, str]:
    """Split a coefficient into a sign and a body printable by the grammar."""
    if c.im == 0:
        sign = "-" if c.re < 0 else "+"
        return sign, _fmt_real(abs(c.re))
    if c.re == 0:
        sign = "-" if c.im < 0 else "+"
        mag = abs(c.im)
        return sign, "i" if mag == 1 else f"{_fmt_real(mag)}*i"
    op = "-" if c.im < 0 else "+"
    mag = abs(c.im)
    imag = "i" if mag == 1 else f"{_fmt_real(mag)}*i"
    re_s = _fmt_real(c.re) if c.re >= 0 else "-" + _fmt_real(-c.re)
    return "+", f"({re_s}{op}{imag})"


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------


class Word(NamedTuple):
    """Reduced alternating word, packed as (first letter, length).

    The unit word is ``Word("", 0)``.
    """

    first: str
    length: int

    @classmethod
    def from_letters(cls, letters: Iterable[str]) -> "Word":
        w = UNIT
        for ch in letters:
            if ch not in _OTHER:
                raise ValueError(f"invalid letter {ch!r}")
            w = w * Word(ch, 1)
        return w

    @property
    def last(self) -> str:
        if self.length == 0:
            return ""
        return self.first if self.length % 2 else _OTHER[self.first]

    @property
    def letters(self) -> str:
        if self.length == 0:
            return ""
        pair = self.first + _OTHER[self.first]
        return (pair * (self.length // 2 + 1))[: self.length]

    def reversed(self) -> "Word":
        return Word(self.last, self.length)

    def __mul__(self, other: "Word") -> "Word":  # type: ignore[override]
        if self.length == 0:
            return other
        if other.length == 0:
            return self
        if self.last == other.first:
            return Word(self.first, self.length + other.length - 1)
        return Word(self.first, self.length + other.length)

    def sort_key(self):
        return (self.length, self.first)

    def __str__(self):
        if self.length == 0:
            return "1"
        a, b = self.first, _OTHER[self.first]
        k, odd = divmod(self.length, 2)
        if k == 0:
            return a
        if k == 1:
            body = f"{a}*{b}"
        else:
            body = f"({a}*{b})^{k}"
        return body + (f"*{a}" if odd else "")


UNIT = Word("", 0)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class NcPoly:
    """Element of the algebra generated by idempotents ``x`` and ``y``.

    Instances are immutable.  Arithmetic accepts other polynomials and plain
    numbers; results are always word-reduced and carry no zero coefficients.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, object] | None = None):
        clean: dict[Word, Scalar] = {}
        for w, c in (terms or {}).items():
            if not isinstance(w, Word):
                w = Word.from_letters(w)
            s = Scalar.of(c)
            if w in clean:
                s = clean[w] + s
            if s.is_zero():
                clean.pop(w, None)
            else:
                clean[w] = s
        self._terms = MappingProxyType(dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key())))
        self._hash = None

    # constructors -----------------------------------------------------------
    @classmethod
    def constant(cls, c) -> "NcPoly":
        return cls({UNIT: c})

    @classmethod
    def x(cls) -> "NcPoly":
        return cls({Word("x", 1): 1})

    @classmethod
    def y(cls) -> "NcPoly":
        return cls({Word("y", 1): 1})

    @classmethod
    def from_letters(cls, terms: Mapping[str, object]) -> "NcPoly":
        """Build from ``{"xy": 1, "yx": -1}``-style letter strings (``""`` is the unit)."""
        return cls({Word.from_letters(k): v for k, v in terms.items()})

    # inspection -------------------------------------------------------------
    @property
    def terms(self) -> Mapping[Word, Scalar]:
        return self._terms

    @property
    def exact(self) -> bool:
        """True when every coefficient is an exact rational-complex number."""
        return all(c.exact for c in self._terms.values())

    @property
    def degree(self) -> int:
        return max((w.length for w in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, word) -> Scalar:
        if not isinstance(word, Word):
            word = Word.from_letters(word)
        return self._terms.get(word, Scalar())

    def letter_terms(self) -> dict[str, complex]:
        return {w.letters: complex(c) for w, c in self._terms.items()}

    # arithmetic -------------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "NcPoly":
        if isinstance(other, NcPoly):
            return other
        return NcPoly.constant(other)

    def __add__(self, other):
        o = self._coerce(other)
        merged = dict(self._terms)
        for w, c in o._terms.items():
            merged[w] = merged[w] + c if w in merged else c
        return NcPoly(merged)

    __radd__ = __add__

    def __neg__(self):
        return NcPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return mul(self, self._coerce(other))

    def __rmul__(self, other):
        return mul(self._coerce(other), self)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = NcPoly.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, NcPoly):
            return dict(self._terms) == dict(other._terms)
        if isinstance(other, Number):
            return self == NcPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for w, c in self._terms.items():
            sign, body = _fmt_coeff(c)
            if w.length == 0:
                text = body
            elif body == "1":
                text = str(w)
            else:
                text = f"{body}*{w}"
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self):
        return f"NcPoly({str(self)!r})"


def mul(f: NcPoly, g: NcPoly) -> NcPoly:
    """Product in the algebra; adjacent equal letters merge (``x*x = x``)."""
    acc: dict[Word, Scalar] = {}
    for w1, c1 in f.terms.items():
        for w2, c2 in g.terms.items():
            w = w1 * w2
            c = c1 * c2
            acc[w] = acc[w] + c if w in acc else c
    return NcPoly(acc)


def star(f: NcPoly) -> NcPoly:
    """Involution: reverse every word and conjugate its coefficient."""
    return NcPoly({w.reversed(): c.conjugate() for w, c in f.terms.items()})


# ---------------------------------------------------------------------------
# canonical decomposition and abelianization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """``f = a0 + f1(xy)xy + f2(yx)yx + f3(xy)x + f4(yx)y``.

    The ``f*`` fields are coefficient tuples in ascending degree; an empty
    tuple is the zero polynomial.
    """

    a0: Scalar
    f1: tuple[Scalar, ...]
    f2: tuple[Scalar, ...]
    f3: tuple[Scalar, ...]
    f4: tuple[Scalar, ...]

    def to_poly(self) -> NcPoly:
        terms: dict[Word, Scalar] = {UNIT: self.a0}
        for coeffs, first, odd in ((self.f1, "x", 0), (self.f2, "y", 0), (self.f3, "x", 1), (self.f4, "y", 1)):
            for k, c in enumerate(coeffs):
                length = 2 * k + 1 if odd else 2 * (k + 1)
                terms[Word(first, length)] = c
        return NcPoly(terms)

    def complex_coeffs(self):
        """The four univariate polynomials as lists of Python complex numbers."""
        return tuple([complex(c) for c in fl] for fl in (self.f1, self.f2, self.f3, self.f4))


def _trim(coeffs: list[Scalar]) -> tuple[Scalar, ...]:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return tuple(coeffs)


def decompose(f: NcPoly) -> Decomposition:
    """Split ``f`` over the five monomial families ``1, (xy)^k xy, (yx)^k yx, (xy)^k x, (yx)^k y``."""
    buckets: dict[str, list[Scalar]] = {"f1": [], "f2": [], "f3": [], "f4": []}
    a0 = Scalar()
    for w, c in f.terms.items():
        if w.length == 0:
            a0 = c
            continue
        if w.length % 2 == 0:
            name, k = ("f1" if w.first == "x" else "f2"), w.length // 2 - 1
        else:
            name, k = ("f3" if w.first == "x" else "f4"), w.length // 2
        lst = buckets[name]
        lst.extend([Scalar()] * (k + 1 - len(lst)))
        lst[k] = c
    return Decomposition(a0, *(_trim(buckets[k]) for k in ("f1", "f2", "f3", "f4")))


_ABEL_BASIS = (frozenset(), frozenset("z"), frozenset("w"), frozenset("zw"))


@dataclass(frozen=True)
class AbelianImage:
    """``c1 + cz*z + cw*w + czw*z*w`` in C[z, w] modulo ``z^2 = z, w^2 = w``."""

    c1: Scalar
    cz: Scalar
    cw: Scalar
    czw: Scalar

    def as_tuple(self):
        return (self.c1, self.cz, self.cw, self.czw)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.as_tuple())

    def __mul__(self, other: "AbelianImage") -> "AbelianImage":
        acc = {b: Scalar() for b in _ABEL_BASIS}
        for b1, c1 in zip(_ABEL_BASIS, self.as_tuple()):
            for b2, c2 in zip(_ABEL_BASIS, other.as_tuple()):
                acc[b1 | b2] = acc[b1 | b2] + c1 * c2
        return AbelianImage(*(acc[b] for b in _ABEL_BASIS))


def _at(coeffs: tuple[Scalar, ...], t: int) -> Scalar:
    # evaluation at t in {0, 1} stays exact
    if t == 0:
        return coeffs[0] if coeffs else Scalar()
    total = Scalar()
    for c in coeffs:
        total = total + c
    return total


def abelianize(f: NcPoly) -> AbelianImage:
    """Image of ``f`` under ``x -> z, y -> w`` in the commutative quotient."""
    d = decompose(f)
    czw = (
        _at(d.f1, 1) + _at(d.f2, 1) + _at(d.f3, 1) - _at(d.f3, 0) + _at(d.f4, 1) - _at(d.f4, 0)
    )
    return AbelianImage(d.a0, _at(d.f3, 0), _at(d.f4, 0), czw)


def in_ker_T(f: NcPoly) -> bool:
    """Whether ``f`` maps to zero under abelianization (exact on exact input)."""
    return abelianize(f).is_zero()


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+/\d+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            found = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> NcPoly:
        out = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {v!r}", pos)
        return out

    def expr(self) -> NcPoly:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> NcPoly:
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> NcPoly:
        kind, value, pos = self.peek()
        base = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            _, _, caret_pos = self.take()
            if kind == "num" or value == "i":
                raise ParseError("'^' applies only to variables and parenthesized expressions", caret_pos)
            ekind, evalue, epos = self.take()
            if ekind != "num" or not evalue.isdigit():
                raise ParseError("exponent must be a positive integer", epos)
            k = int(evalue)
            if k < 1:
                raise ParseError("exponent must be a positive integer", epos)
            base = base**k
        return base

    def base(self) -> NcPoly:
        kind, value, pos = self.take()
        if kind == "num":
            try:
                return NcPoly.constant(Fraction(value))
            except ZeroDivisionError:
                raise ParseError("division by zero in rational literal", pos) from None
        if kind == "ident":
            if value == "x":
                return NcPoly.x()
            if value == "y":
                return NcPoly.y()
            if value == "i":
                return NcPoly.constant(Scalar(0, 1))
            raise ParseError(f"unknown identifier {value!r} (only x, y, i are allowed)", pos)
        if value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {found}", pos)


def parse(text: str) -> NcPoly:
    """Parse the polynomial mini-language into a reduced :class:`NcPoly`.

    Grammar::

        expr   := ['+'|'-'] term (('+'|'-') term)*
        term   := factor ('*' factor)*
        factor := base ('^' uint)?          # only on x, y or '(' expr ')'
        base   := 'x' | 'y' | 'i' | number | '(' expr ')'
        number := decimal | int '/' int

    Decimal literals are read exactly, so ``0.5`` is the rational ``1/2``.
    """
    if not isinstance(text, str):
        raise TypeError("expected a string")
    return _Parser(text).parse()
