"""Exact ordered field Q(w0, ..., w_{L-1}) with w0 << w1 << ... .

Every scale ``w_j`` is larger than every element built from lower scales,
so the field is a tower of ordered extensions "at infinity".  A ``Num`` is
stored as a reduced quotient of polynomials; its *support* (the scales
occurring in the reduced form) decides level membership: ``x`` lies in
level ``S_a`` iff ``support(x)`` is a subset of ``a``.

Level embeddings rename scales along order isomorphisms of labels, and
the shadow at level ``r`` eliminates scales ``w_{L-1}, ..., w_r`` by exact
limits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from . import poly as P
from .errors import (
    DivisionByZero,
    NotInLevel,
    ParseError,
    PoleAtPoint,
    ScaleExhausted,
    SizeMismatch,
    Unlimited,
)
from .labels import DEFAULT_SCALES, Label, LabelLike, as_label, order_iso
from .poly import Poly

NumLike = Union["Num", int, Fraction, str]


class Num:
    """Element of the ordered field, in reduced canonical form.

    The denominator is monic with respect to the lex order that makes the
    highest scale most significant, so equal values have equal
    representations.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, value=0):
        if isinstance(value, Num):
            self.num, self.den = value.num, value.den
        else:
            self.num, self.den = Poly.const(Fraction(value)), P.ONE
        self._hash = None

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "Num":
        x = cls.__new__(cls)
        x.num, x.den, x._hash = num, den, None
        return x

    @classmethod
    def from_polys(cls, num: Poly, den: Poly = P.ONE) -> "Num":
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            return cls._raw(P.ZERO, P.ONE)
        if den.is_const():
            return cls._raw(num.scale(1 / den.const_value()), P.ONE)
        _, num, den = P.cofactors(num, den)
        lc = den.lc()
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return cls._raw(num, den)

    @classmethod
    def scale(cls, i: int, power: int = 1) -> "Num":
        """The scale ``w_i`` raised to an integer power."""
        if power >= 0:
            return cls._raw(Poly.var(i, power), P.ONE)
        return cls._raw(P.ONE, Poly.var(i, -power))

    # queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_rational(self) -> bool:
        return self.den.is_const() and self.num.is_const()

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.num.const_value()

    def support(self) -> Label:
        return Label.of(self.num.variables() | self.den.variables())

    def sign(self) -> int:
        # the denominator's leading coefficient is 1 by normalization
        return self.num.sign()

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            if self.den is P.ONE or self.den == P.ONE:
                return Num._raw(self.num + other.num, P.ONE)
            return Num.from_polys(self.num + other.num, self.den)
        # Henrici: with b = g*b1, d = g*d1 the sum a*d1 + c*b1 is already
        # coprime to b1*d1, so only its gcd with g remains to cancel
        g, b1, d1 = P.cofactors(self.den, other.den)
        num = self.num * d1 + other.num * b1
        if num.is_zero():
            return Num()
        _, num, g = P.cofactors(num, g)
        den = g * b1 * d1
        lc = den.lc()
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return Num._raw(num, den)

    __radd__ = __add__

    def __neg__(self):
        return Num._raw(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.den == P.ONE and other.den == P.ONE:
            return Num._raw(self.num * other.num, P.ONE)
        # a/b * c/d with both reduced: cancel a against d and c against b
        _, a, d = P.cofactors(self.num, other.den)
        _, c, b = P.cofactors(other.num, self.den)
        num, den = a * c, b * d
        if num.is_zero():
            return Num()
        lc = den.lc()
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return Num._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "Num":
        if self.is_zero():
            raise DivisionByZero("division by zero")
        num, den = self.den, self.num
        lc = den.lc()
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return Num._raw(num, den)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return Num._raw(self.num ** n, self.den ** n)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __lt__(self, other):
        return cmp(self, other) < 0

    def __le__(self, other):
        return cmp(self, other) <= 0

    def __gt__(self, other):
        return cmp(self, other) > 0

    def __ge__(self, other):
        return cmp(self, other) >= 0

    def __str__(self):
        return render_number(self)

    def __repr__(self):
        return f"Num({render_number(self)!r})"


def _coerce(x):
    if isinstance(x, Num):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Num(x)
    if isinstance(x, str):
        return parse_number(x)
    return NotImplemented


def num(x: NumLike) -> Num:
    """Coerce an int, Fraction, expression string or Num to a Num."""
    out = _coerce(x)
    if out is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as a Num")
    return out


def w(i: int) -> Num:
    return Num.scale(i)


# field operations as functions

def add(x: NumLike, y: NumLike) -> Num:
    return num(x) + num(y)


def sub(x: NumLike, y: NumLike) -> Num:
    return num(x) - num(y)


def mul(x: NumLike, y: NumLike) -> Num:
    return num(x) * num(y)


def div(x: NumLike, y: NumLike) -> Num:
    return num(x) / num(y)


def cmp(x: NumLike, y: NumLike) -> int:
    """-1, 0 or 1 as ``x`` is less than, equal to or greater than ``y``."""
    x, y = num(x), num(y)
    # both denominators have a positive leading coefficient
    return (x.num * y.den - y.num * x.den).sign()


CMP_NAMES = {-1: "less", 0: "equal", 1: "greater"}


def support(x: NumLike) -> Label:
    return num(x).support()


def in_level(x: NumLike, a: LabelLike) -> bool:
    return num(x).support().issubset(as_label(a))


# parsing and rendering -----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(w)(\d+)|(x)\b|(\^)|([-+*/()]))")


def _tokenize(text: str, allow_x: bool):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        start = m.start(0) + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group(1):
            out.append(("int", int(m.group(1)), start))
        elif m.group(2):
            out.append(("scale", int(m.group(3)), start))
        elif m.group(4):
            if not allow_x:
                raise ParseError("variable x is only allowed in function expressions", start)
            out.append(("x", None, start))
        elif m.group(5):
            out.append(("^", None, start))
        else:
            out.append((m.group(6), None, start))
        pos = m.end(0)
    out.append(("end", None, len(text)))
    return out


class _ExprParser:
    """Recursive descent over ``+ - * / ^`` with integer powers.

    ``ops`` supplies the arithmetic so the same grammar builds either Nums
    or univariate rational functions.
    """

    def __init__(self, text: str, atom, allow_x: bool = False):
        self.toks = _tokenize(text, allow_x)
        self.i = 0
        self.atom = atom

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[0]!r}", tok[2])
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok[0] == "*":
                value = value * rhs
            else:
                try:
                    value = value / rhs
                except ZeroDivisionError:
                    raise DivisionByZero(f"division by zero at position {tok[2]}") from None
        return value

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        if self.peek()[0] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "-":
                self.take()
                sign = -1
            tok = self.take("int")
            try:
                return base ** (sign * tok[1])
            except ZeroDivisionError:
                raise DivisionByZero(f"zero to a negative power at position {tok[2]}") from None
        return base

    def primary(self):
        tok = self.take()
        if tok[0] == "(":
            value = self.expr()
            self.take(")")
            return value
        if tok[0] in ("int", "scale", "x"):
            return self.atom(tok)
        raise ParseError(f"unexpected token {tok[0]!r}", tok[2])


def parse_number(text: str, scales: int = DEFAULT_SCALES) -> Num:
    """Parse an expression such as ``2 + 3/w0 + w1^-1`` into a reduced Num."""

    def atom(tok):
        if tok[0] == "int":
            return Num(tok[1])
        if tok[1] >= scales:
            raise ParseError(f"scale w{tok[1]} exceeds the scale count {scales}", tok[2])
        return Num.scale(tok[1])

    return _ExprParser(text, atom).parse()


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m in sorted(p.terms, key=P.mono_key, reverse=True):
        c = p.terms[m]
        factors = [f"w{i}" if e == 1 else f"w{i}^{e}" for i, e in enumerate(m) if e]
        mag = abs(c)
        if not factors:
            body = _render_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _render_coeff(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def render_number(x: Num) -> str:
    """Canonical text; numerator and denominator are expanded."""
    top = render_poly(x.num)
    if x.den == P.ONE:
        return top
    return f"({top})/({render_poly(x.den)})"


# level embeddings ------------------------------------------------------------

def embed(x: NumLike, a: LabelLike, b: LabelLike, scales: int = DEFAULT_SCALES) -> Num:
    """Rename each scale ``w_s`` (s in ``a``) to ``w_t`` with t the order-isomorphic image."""
    x, a, b = num(x), as_label(a), as_label(b)
    if len(a) != len(b):
        raise SizeMismatch(f"|{a}| != |{b}|")
    if not x.support().issubset(a):
        raise NotInLevel(f"{x} has support {x.support()}, not inside {a}")
    if b.indices and b.indices[-1] >= scales:
        raise ScaleExhausted(f"label {b} needs more than {scales} scales")
    iso = order_iso(a, b)
    if all(s == t for s, t in iso.items()):
        return x
    # an order-preserving renaming keeps the form reduced and the denominator monic
    return Num._raw(x.num.rename(iso), x.den.rename(iso))


# shadows ---------------------------------------------------------------------

def shadow(x: NumLike, r: int, scales: int = DEFAULT_SCALES) -> Num:
    """Standard part relative to level ``r`` = ``{0..r-1}``.

    Scales at index ``r`` and above are sent to infinity one at a time,
    highest first.  Raises ``Unlimited(j)`` if the limit in ``w_j`` diverges.
    """
    x = num(x)
    if not 0 <= r <= scales:
        raise ValueError(f"level {r} outside 0..{scales}")
    while not x.is_zero():
        j = max(x.num.top_var(), x.den.top_var())
        if j < r:
            break
        dn, dd = x.num.degree(j), x.den.degree(j)
        if dn > dd:
            raise Unlimited(j)
        if dn < dd:
            return Num()
        x = Num.from_polys(x.num.lc_in(j), x.den.lc_in(j))
    return x


@dataclass(frozen=True)
class Classification:
    limited: bool
    infinitesimal: bool


def classify(x: NumLike, r: int, scales: int = DEFAULT_SCALES) -> Classification:
    x = num(x)
    try:
        s = shadow(x, r, scales)
    except Unlimited:
        return Classification(limited=False, infinitesimal=False)
    return Classification(limited=True, infinitesimal=(not x.is_zero()) and s.is_zero())


# univariate rational functions over the field ----------------------------------

def _trim_coeffs(cs: list) -> list:
    cs = list(cs)
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _upoly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Num() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return _trim_coeffs(out)


def _upoly_add(a: list, b: list, sign: int = 1) -> list:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else Num()
        y = b[i] if i < len(b) else Num()
        out.append(x + y if sign > 0 else x - y)
    return _trim_coeffs(out)


def _upoly_divmod(a: list, b: list):
    b = _trim_coeffs(b)
    if not b:
        raise DivisionByZero("division by the zero polynomial")
    a = _trim_coeffs(a)
    q = [Num() for _ in range(max(len(a) - len(b) + 1, 0))]
    lead_inv = b[-1].inverse()
    while len(a) >= len(b):
        k = len(a) - len(b)
        c = a[-1] * lead_inv
        q[k] = c
        a = _upoly_add(a, [Num()] * k + [c * y for y in b], -1)
    return _trim_coeffs(q), a


def _upoly_gcd(a: list, b: list) -> list:
    a, b = _trim_coeffs(a), _trim_coeffs(b)
    while b:
        _, r = _upoly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _horner(cs: Sequence[Num], at: Num) -> Num:
    acc = Num()
    for c in reversed(cs):
        acc = acc * at + c
    return acc


class RatFunc:
    """Univariate rational function in ``x`` with Num coefficients, kept reduced."""

    __slots__ = ("num", "den")

    def __init__(self, num_coeffs: Sequence, den_coeffs: Sequence = (1,)):
        n = _trim_coeffs([num(c) for c in num_coeffs])
        d = _trim_coeffs([num(c) for c in den_coeffs])
        if not d:
            raise DivisionByZero("zero denominator")
        if not n:
            self.num, self.den = [], [Num(1)]
            return
        g = _upoly_gcd(n, d)
        if len(g) > 1:
            n, _ = _upoly_divmod(n, g)
            d, _ = _upoly_divmod(d, g)
        inv = d[-1].inverse()
        self.num = [c * inv for c in n]
        self.den = [c * inv for c in d]

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls([c])

    @classmethod
    def x(cls) -> "RatFunc":
        return cls([0, 1])

    def __add__(self, other):
        other = _as_ratfunc(other)
        return RatFunc(_upoly_add(_upoly_mul(self.num, other.den), _upoly_mul(other.num, self.den)),
                       _upoly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc([-c for c in self.num], self.den)

    def __sub__(self, other):
        return self + (-_as_ratfunc(other))

    def __rsub__(self, other):
        return _as_ratfunc(other) - self

    def __mul__(self, other):
        other = _as_ratfunc(other)
        return RatFunc(_upoly_mul(self.num, other.num), _upoly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfunc(other)
        if not other.num:
            raise DivisionByZero("division by the zero function")
        return RatFunc(_upoly_mul(self.num, other.den), _upoly_mul(self.den, other.num))

    def __rtruediv__(self, other):
        return _as_ratfunc(other) / self

    def __pow__(self, n: int):
        if n < 0:
            if not self.num:
                raise DivisionByZero("zero function to a negative power")
            return RatFunc(self.den, self.num) ** (-n)
        out = RatFunc.const(1)
        for _ in range(n):
            out = out * self
        return out

    def coefficients(self) -> list[Num]:
        return [c for c in self.num + self.den]

    def support(self) -> Label:
        out: set = set()
        for c in self.coefficients():
            out.update(c.support())
        return Label.of(out)

    def is_pole(self, at: NumLike) -> bool:
        return _horner(self.den, num(at)).is_zero()

    def __call__(self, at: NumLike) -> Num:
        at = num(at)
        d = _horner(self.den, at)
        if d.is_zero():
            raise PoleAtPoint(f"pole at {at}")
        return _horner(self.num, at) / d

    def __eq__(self, other):
        other = _as_ratfunc(other)
        return self.num == other.num and self.den == other.den

    def __str__(self):
        def upoly(cs):
            parts = []
            for k in range(len(cs) - 1, -1, -1):
                c = cs[k]
                if c.is_zero():
                    continue
                xs = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
                parts.append(f"({c})" + (f"*{xs}" if xs else ""))
            return " + ".join(parts) if parts else "0"

        if len(self.den) == 1 and self.den[0] == 1:
            return upoly(self.num)
        return f"({upoly(self.num)})/({upoly(self.den)})"

    __repr__ = __str__


def _as_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc.const(num(x))


def parse_function(text: str, scales: int = DEFAULT_SCALES) -> RatFunc:
    """Parse a rational expression in ``x`` whose constants may involve scales."""

    def atom(tok):
        if tok[0] == "int":
            return RatFunc.const(tok[1])
        if tok[0] == "x":
            return RatFunc.x()
        if tok[1] >= scales:
            raise ParseError(f"scale w{tok[1]} exceeds the scale count {scales}", tok[2])
        return RatFunc.const(Num.scale(tok[1]))

    return _as_ratfunc(_ExprParser(text, atom, allow_x=True).parse())


def derivative(f: Union[RatFunc, str], a: NumLike, scales: int = DEFAULT_SCALES) -> Num:
    """Derivative of ``f`` at ``a`` as the shadow of a difference quotient.

    The increment is ``1/w_r`` where ``r`` is the first scale above every
    scale used by ``f`` and ``a``; the shadow is taken relative to that level.
    """
    if isinstance(f, str):
        f = parse_function(f, scales)
    a = num(a)
    if f.is_pole(a):
        raise PoleAtPoint(f"{a} is a pole")
    used = set(f.support()) | set(a.support())
    r = max(used) + 1 if used else 0
    if r >= scales:
        raise ScaleExhausted(f"need scale w{r} but only {scales} scales are configured")
    h = Num.scale(r, -1)
    quotient = (f(a + h) - f(a)) / h
    return shadow(quotient, r, scales)


# End Extension check -----------------------------------------------------------

@dataclass
class EndExtensionReport:
    x: Num
    level: int
    branch: str  # "standard", "limited", "unlimited" or "nonpositive"
    results: list  # (sample, passed) pairs

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.results)


def end_extension_check(x: NumLike, a: LabelLike, samples: Iterable[NumLike],
                        scales: int = DEFAULT_SCALES) -> EndExtensionReport:
    """Check that a positive level-``a`` element unlimited at ``min(a)`` exceeds lower samples."""
    x, a = num(x), as_label(a)
    if not a.indices:
        raise ValueError("End Extension needs a nonempty label")
    if not in_level(x, a):
        raise NotInLevel(f"{x} is not in S{a}")
    n = a.min
    samples = [num(y) for y in samples]
    for y in samples:
        if not y.support().issubset(Label(tuple(range(n)))):
            raise NotInLevel(f"sample {y} is not in S{{0..{n - 1}}}")
    if x.support() == Label():
        branch = "standard"
    elif classify(x, n, scales).limited:
        branch = "limited"
    elif x.sign() > 0:
        branch = "unlimited"
    else:
        branch = "nonpositive"
    if branch == "unlimited":
        results = [(y, cmp(x, y) > 0) for y in samples]
    else:
        results = [(y, True) for y in samples]
    return EndExtensionReport(x, n, branch, results)
