"""Seeded random generators for property suites and sampling."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .formulas import (
    AtomEmb, AtomEq, AtomInLevel, AtomMem, And, ExistsIn, ForallIn, Formula, Iff, Implies, Not, Or,
)
from .labels import Label
from .numbers import Num, RatFunc
from .poly import Poly


def random_fraction(rng: random.Random, height: int = 9, nonzero: bool = False) -> Fraction:
    while True:
        c = Fraction(rng.randint(-height, height), rng.randint(1, height))
        if c or not nonzero:
            return c


def random_poly(rng: random.Random, variables: Sequence[int], max_degree: int = 4,
                height: int = 9, max_terms: int = 4) -> Poly:
    """Nonzero polynomial in ``variables`` with total degree at most ``max_degree``."""
    variables = sorted(variables)
    width = variables[-1] + 1 if variables else 0
    while True:
        terms = []
        for _ in range(rng.randint(1, max_terms)):
            exps = [0] * width
            budget = rng.randint(0, max_degree)
            for _ in range(budget):
                if variables:
                    exps[rng.choice(variables)] += 1
            terms.append((tuple(exps), random_fraction(rng, height, nonzero=True)))
        p = Poly.from_terms(terms)
        if not p.is_zero():
            return p


def random_num(rng: random.Random, variables: Sequence[int] = (0, 1, 2), max_vars: int = 3,
               max_degree: int = 4, height: int = 9, zero_rate: float = 0.02) -> Num:
    """Random element whose scales come from ``variables`` (at most ``max_vars`` of them)."""
    if rng.random() < zero_rate:
        return Num()
    pool = sorted(variables)
    chosen = sorted(rng.sample(pool, rng.randint(0, min(max_vars, len(pool))))) if pool else []
    numer = random_poly(rng, chosen, max_degree, height)
    denom = random_poly(rng, chosen, max_degree, height) if rng.random() < 0.6 else Poly.const(1)
    return Num.from_polys(numer, denom)


def random_label(rng: random.Random, max_index: int = 5, max_size: int = 3) -> Label:
    size = rng.randint(0, max_size)
    return Label.of(rng.sample(range(max_index + 1), min(size, max_index + 1)))


def random_natural(rng: random.Random, variables: Sequence[int], max_degree: int = 3,
                   height: int = 9) -> Num:
    """A polynomial with integer coefficients over ``variables`` (a sample "natural")."""
    variables = sorted(variables)
    if not variables:
        return Num(rng.randint(0, 10 ** 6))
    width = variables[-1] + 1
    terms = []
    for _ in range(rng.randint(1, 3)):
        exps = [0] * width
        for _ in range(rng.randint(0, max_degree)):
            exps[rng.choice(variables)] += 1
        terms.append((tuple(exps), rng.randint(-height, height)))
    return Num.from_polys(Poly.from_terms(terms))


def random_unlimited_positive(rng: random.Random, n: int, top: int, height: int = 9) -> Num:
    """Positive ``x`` with ``min(support) = n``, unlimited relative to level ``n``.

    The numerator's degree in its top scale exceeds the denominator's, and the
    sign is fixed by flipping if needed.
    """
    others = [i for i in range(n + 1, top + 1)]
    chosen = sorted({n} | set(rng.sample(others, rng.randint(0, min(2, len(others))))))
    j = chosen[-1]
    while True:
        numer = random_poly(rng, chosen, 4, height)
        denom = random_poly(rng, chosen, 3, height) if rng.random() < 0.5 else Poly.const(1)
        if numer.degree(j) <= denom.degree(j):
            numer = numer * Poly.var(j, denom.degree(j) - numer.degree(j) + 1) + numer
        x = Num.from_polys(numer, denom)
        if x.sign() < 0:
            x = -x
        if min(x.support().indices, default=None) == n:
            return x


_VARS = ("u", "v", "x", "y", "z")


def random_formula(rng: random.Random, depth: int = 3, max_index: int = 4,
                   variables: Sequence[str] = _VARS) -> Formula:
    """Random admissible formula; labels are drawn from ``{0..max_index}``."""

    def label(size=None):
        if size is None:
            size = rng.randint(0, 3)
        return Label.of(rng.sample(range(max_index + 1), size))

    def atom():
        kind = rng.randrange(4)
        u, v = rng.choice(variables), rng.choice(variables)
        if kind == 0:
            return AtomEq(u, v)
        if kind == 1:
            return AtomMem(u, v)
        if kind == 2:
            return AtomInLevel(v, label())
        size = rng.randint(0, 3)
        return AtomEmb(label(size), label(size), u, v)

    def go(d):
        if d == 0 or rng.random() < 0.25:
            return atom()
        kind = rng.randrange(7)
        if kind == 0:
            return Not(go(d - 1))
        if kind <= 4:
            cls = (And, Or, Implies, Iff)[kind - 1]
            return cls(go(d - 1), go(d - 1))
        cls = ForallIn if kind == 5 else ExistsIn
        return cls(rng.choice(variables), label(), go(d - 1))

    return go(depth)


def random_ratfunc(rng: random.Random, variables: Sequence[int] = (0,), max_degree: int = 3,
                   height: int = 9) -> RatFunc:
    """Rational function in ``x`` whose coefficients use at most the given scales."""

    def coeffs():
        return [random_num(rng, variables, max_vars=1, max_degree=1, height=height, zero_rate=0.2)
                for _ in range(rng.randint(1, max_degree + 1))]

    while True:
        numer = coeffs()
        denom = coeffs() if rng.random() < 0.5 else [Num(1)]
        if any(not c.is_zero() for c in denom) and any(not c.is_zero() for c in numer):
            return RatFunc(numer, denom)


def random_intset(rng: random.Random, bound: int, density: float | None = None) -> list:
    if density is None:
        density = rng.random()
    return [i for i in range(bound) if rng.random() < density]
