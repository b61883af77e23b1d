"""Sparse multivariate polynomials over the rationals.

Internal support for :mod:`stratlab.numbers`.  Variable ``i`` is the scale
``w_i``.  A monomial is a tuple of exponents indexed by variable with
trailing zeros trimmed, so ``()`` is the constant monomial and ``(0, 2)``
is ``w1^2``.

Monomials are ordered lexicographically with the highest variable most
significant; that order drives leading coefficients, the canonical sign
and rendering.  Multivariate gcds are delegated to sympy's sparse
polynomial rings.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from sympy import QQ
from sympy.polys.rings import ring

Monomial = tuple


def _trim(m) -> tuple:
    m = list(m)
    while m and m[-1] == 0:
        m.pop()
    return tuple(m)


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    if len(m1) < len(m2):
        m1, m2 = m2, m1
    if not m2:
        return m1
    out = list(m1)
    for i, e in enumerate(m2):
        out[i] += e
    return tuple(out)


def mono_div(m1: tuple, m2: tuple):
    """``m1 / m2`` if ``m2`` divides ``m1``, else ``None``."""
    if len(m2) > len(m1):
        return None
    out = list(m1)
    for i, e in enumerate(m2):
        out[i] -= e
        if out[i] < 0:
            return None
    return _trim(out)


def mono_key(m: tuple):
    return (len(m), m[::-1])


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        # terms: monomial -> nonzero Fraction; callers own the dict afterwards
        self.terms = terms if terms is not None else {}
        self._hash = None

    # constructors ---------------------------------------------------------

    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def var(cls, i: int, power: int = 1) -> "Poly":
        return cls({(0,) * i + (power,): Fraction(1)}) if power else cls.const(1)

    @classmethod
    def from_terms(cls, items: Iterable) -> "Poly":
        out: dict = {}
        for m, c in items:
            m = _trim(m)
            c = out.get(m, 0) + Fraction(c)
            if c:
                out[m] = c
            else:
                out.pop(m, None)
        return cls(out)

    # basic queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get((), Fraction(0)) if self.is_const() else None

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def top_var(self) -> int:
        return max((len(m) for m in self.terms), default=0) - 1

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            out.update(i for i, e in enumerate(m) if e)
        return out

    def degree(self, v: int) -> int:
        if not self.terms:
            return -1
        return max((m[v] if v < len(m) else 0) for m in self.terms)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def leading(self):
        """(monomial, coefficient) of the lex-leading term."""
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    def lc(self) -> Fraction:
        return self.leading()[1]

    def sign(self) -> int:
        if not self.terms:
            return 0
        return 1 if self.lc() > 0 else -1

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({self.terms!r})"

    # arithmetic -----------------------------------------------------------

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = -c
            else:
                s -= c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(out)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return Poly()
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            if not mb:
                return Poly({m: c * cb for m, c in a.items()})
            return Poly({mono_mul(m, mb): c * cb for m, c in a.items()})
        out: dict = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mono_mul(m1, m2)
                s = out.get(m)
                out[m] = c1 * c2 if s is None else s + c1 * c2
        return Poly({m: c for m, c in out.items() if c})

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly()
        return Poly({m: v * c for m, v in self.terms.items()})

    def mul_mono(self, mono: tuple, c=1) -> "Poly":
        c = Fraction(c)
        return Poly({mono_mul(m, mono): v * c for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        lc = self.lc()
        return self if lc == 1 else self.scale(1 / lc)

    # structure in one variable --------------------------------------------

    def coeffs_in(self, v: int) -> dict:
        """Map exponent of ``w_v`` to the coefficient polynomial."""
        out: dict = {}
        for m, c in self.terms.items():
            e = m[v] if v < len(m) else 0
            if e:
                rest = list(m)
                rest[v] = 0
                rest = _trim(rest)
            else:
                rest = m
            out.setdefault(e, {})[rest] = c
        return {e: Poly(t) for e, t in out.items()}

    def lc_in(self, v: int) -> "Poly":
        d = self.degree(v)
        return self.coeffs_in(v)[d]

    def rename(self, mapping: dict) -> "Poly":
        """Substitute ``w_i -> w_mapping[i]``; unmapped variables must be absent."""
        out = {}
        for m, c in self.terms.items():
            new: dict = {}
            for i, e in enumerate(m):
                if e:
                    new[mapping[i]] = e
            width = max(new, default=-1) + 1
            out[tuple(new.get(i, 0) for i in range(width))] = c
        return Poly(out)

    def evaluate(self, point: dict):
        """Exact value at ``{var: Fraction}``; every variable present must be bound."""
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    t *= Fraction(point[i]) ** e
            total += t
        return total


ZERO = Poly()
ONE = Poly.const(1)


class NotExact(ArithmeticError):
    pass


def divexact(p: Poly, d: Poly) -> Poly:
    """Quotient of ``p`` by ``d`` when ``d`` divides ``p`` exactly."""
    if d.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if len(d.terms) == 1:
        (md, cd), = d.terms.items()
        out = {}
        for m, c in p.terms.items():
            q = mono_div(m, md)
            if q is None:
                raise NotExact(f"{d} does not divide {p}")
            out[q] = c / cd
        return Poly(out)
    ld, cd = d.leading()
    q_terms: dict = {}
    r = p
    while r.terms:
        lr, cr = r.leading()
        t = mono_div(lr, ld)
        if t is None:
            raise NotExact(f"{d} does not divide {p}")
        coef = cr / cd
        q_terms[t] = coef
        r = r - d.mul_mono(t, coef)
    return Poly(q_terms)


def _mono_gcd(m: tuple, p: Poly) -> tuple:
    g = list(m)
    for mm in p.terms:
        for i in range(len(g)):
            e = mm[i] if i < len(mm) else 0
            if e < g[i]:
                g[i] = e
    return _trim(g)


@lru_cache(maxsize=None)
def _ring(width: int):
    return ring(",".join(f"w{i}" for i in range(width)), QQ)[0]


def _to_ring(p: Poly, r, width: int):
    return r.from_dict({m + (0,) * (width - len(m)): QQ(c.numerator, c.denominator)
                        for m, c in p.terms.items()})


def _from_ring(e) -> Poly:
    return Poly({_trim(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in e.items()})


def cofactors(p: Poly, q: Poly):
    """``(g, p/g, q/g)`` with ``g`` the monic gcd of two nonzero polynomials."""
    if p.is_const() or q.is_const():
        return ONE, p, q
    if p.is_monomial() or q.is_monomial():
        mono, other = (p, q) if p.is_monomial() else (q, p)
        m = _mono_gcd(next(iter(mono.terms)), other)
        if not m:
            return ONE, p, q
        g = Poly({m: Fraction(1)})
        return g, divexact(p, g), divexact(q, g)
    if p == q:
        g = p.monic()
        c = p.lc()
        return g, Poly.const(c), Poly.const(c)
    width = max(p.top_var(), q.top_var()) + 1
    r = _ring(width)
    g, a, b = _to_ring(p, r, width).cofactors(_to_ring(q, r, width))
    g, a, b = _from_ring(g), _from_ring(a), _from_ring(b)
    lc = g.lc()
    if lc != 1:
        g, a, b = g.scale(1 / lc), a.scale(lc), b.scale(lc)
    return g, a, b


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor over the rationals."""
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    return cofactors(p, q)[0]
