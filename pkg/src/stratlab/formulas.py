"""Admissible formulas: parsing, rendering, level shift and schema instances.

Concrete syntax::

    A x in S{0}. E y in S{0,1}. I{0}{1}(x) = y
    (u = v) <-> (v = u)
    !(x in y)

``A``/``E`` are level-bounded quantifiers.  The unbounded quantifier
``Aall x.`` only appears in Generalized Transfer instances and is rejected
unless the parser runs with ``allow_unbounded=True``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    AdmissibilityError,
    MissingDomain,
    NotPureInFormula,
    ParseError,
    SizeMismatch,
    TypeMismatch,
)
from .labels import DEFAULT_SCALES, Label, LabelLike, as_label, boxplus, numeral, oplus
from .numbers import Num, embed


class Formula:
    """Base class of formula nodes."""

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class AtomEq(Formula):
    u: str
    v: str


@dataclass(frozen=True)
class AtomMem(Formula):
    u: str
    v: str


@dataclass(frozen=True)
class AtomInLevel(Formula):
    v: str
    a: Label


@dataclass(frozen=True)
class AtomEmb(Formula):
    """``I_a^b(u) = v``."""

    a: Label
    b: Label
    u: str
    v: str

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise SizeMismatch(f"embedding I{self.a}{self.b} between labels of different size")


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForallIn(Formula):
    var: str
    a: Label
    body: Formula


@dataclass(frozen=True)
class ExistsIn(Formula):
    var: str
    a: Label
    body: Formula


@dataclass(frozen=True)
class UnboundedForall(Formula):
    """Unbounded universal quantifier; legal only in GT instances."""

    var: str
    body: Formula


BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
_BINARY_BY_OP = {op: cls for cls, op in BINARY.items()}
ATOMS = (AtomEq, AtomMem, AtomInLevel, AtomEmb)


# rendering ---------------------------------------------------------------------

def render(f: Formula) -> str:
    """Canonical text with fully parenthesized binary connectives."""
    if isinstance(f, AtomEq):
        return f"{f.u} = {f.v}"
    if isinstance(f, AtomMem):
        return f"{f.u} in {f.v}"
    if isinstance(f, AtomInLevel):
        return f"{f.v} in S{f.a}"
    if isinstance(f, AtomEmb):
        return f"I{f.a}{f.b}({f.u}) = {f.v}"
    if isinstance(f, Not):
        return f"!({render(f.body)})"
    if type(f) in BINARY:
        return f"({render(f.left)}) {BINARY[type(f)]} ({render(f.right)})"
    if isinstance(f, ForallIn):
        return f"A {f.var} in S{f.a}. {render(f.body)}"
    if isinstance(f, ExistsIn):
        return f"E {f.var} in S{f.a}. {render(f.body)}"
    if isinstance(f, UnboundedForall):
        return f"Aall {f.var}. {render(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


# parsing -----------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><->|->|[&|!().=,{}])"
    r"|(?P<kw>(?:Aall|A|E|I|in)(?![A-Za-z0-9_])|S(?![A-Za-z_]))"
    r"|(?P<var>[a-z][a-z0-9_]*)|(?P<nat>\d+))"
)


def _tokenize(text: str):
    toks, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, allow_unbounded: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_unbounded = allow_unbounded

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok[0] in ("op", "kw") and tok[1] == value

    def expect(self, value: str):
        tok = self.peek()
        if not self.at(value):
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def var(self) -> str:
        tok = self.peek()
        if tok[0] != "var":
            raise ParseError(f"expected a variable, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok[1]

    def label(self) -> Label:
        tok = self.peek()
        if tok[0] == "nat":
            self.i += 1
            return numeral(int(tok[1]))
        self.expect("{")
        items = []
        if not self.at("}"):
            while True:
                t = self.peek()
                if t[0] != "nat":
                    raise ParseError("expected a natural number in label", t[2])
                self.i += 1
                items.append(int(t[1]))
                if self.at(","):
                    self.i += 1
                    continue
                break
        end = self.expect("}")
        if len(set(items)) != len(items):
            raise ParseError("repeated index in label", end[2])
        return Label.of(items)

    def parse(self) -> Formula:
        f = self.formula()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return f

    def formula(self) -> Formula:
        if self.at("A") or self.at("E"):
            return self.quantifier()
        if self.at("Aall"):
            tok = self.peek()
            if not self.allow_unbounded:
                raise AdmissibilityError(
                    f"unbounded quantifier at position {tok[2]}; quantifiers must range over a level")
            self.i += 1
            v = self.var()
            self.expect(".")
            return UnboundedForall(v, self.formula())
        if self.at("("):
            self.i += 1
            left = self.formula()
            self.expect(")")
            tok = self.peek()
            if tok[0] == "op" and tok[1] in _BINARY_BY_OP:
                self.i += 1
                self.expect("(")
                right = self.formula()
                self.expect(")")
                return _BINARY_BY_OP[tok[1]](left, right)
            return left
        if self.at("!"):
            self.i += 1
            self.expect("(")
            body = self.formula()
            self.expect(")")
            return Not(body)
        return self.atom()

    def quantifier(self) -> Formula:
        qtok = self.peek()
        self.i += 1
        v = self.var()
        if self.at("."):
            raise AdmissibilityError(
                f"unbounded quantifier at position {qtok[2]}; write '{qtok[1]} {v} in S<label>.'")
        self.expect("in")
        self.expect("S")
        a = self.label()
        self.expect(".")
        body = self.formula()
        return (ForallIn if qtok[1] == "A" else ExistsIn)(v, a, body)

    def atom(self) -> Formula:
        tok = self.peek()
        if self.at("I"):
            self.i += 1
            a = self.label()
            b = self.label()
            if len(a) != len(b):
                raise SizeMismatch(f"embedding I{a}{b} between labels of different size "
                                   f"(at position {tok[2]})")
            self.expect("(")
            u = self.var()
            self.expect(")")
            self.expect("=")
            return AtomEmb(a, b, u, self.var())
        u = self.var()
        if self.at("="):
            self.i += 1
            return AtomEq(u, self.var())
        self.expect("in")
        if self.at("S"):
            self.i += 1
            return AtomInLevel(u, self.label())
        return AtomMem(u, self.var())


def parse_formula(text: str, allow_unbounded: bool = False) -> Formula:
    """Parse concrete syntax; ``allow_unbounded`` enables the GT extension."""
    return _Parser(text, allow_unbounded).parse()


def parse_formula_file(lines: Iterable[str], allow_unbounded: bool = False) -> list[Formula]:
    """One formula per line; blank lines and ``#`` comments are skipped."""
    out = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_formula(line, allow_unbounded))
    return out


# structural queries ----------------------------------------------------------

def free_variables(f: Formula) -> frozenset:
    if isinstance(f, (AtomEq, AtomMem)):
        return frozenset((f.u, f.v))
    if isinstance(f, AtomInLevel):
        return frozenset((f.v,))
    if isinstance(f, AtomEmb):
        return frozenset((f.u, f.v))
    if isinstance(f, Not):
        return free_variables(f.body)
    if type(f) in BINARY:
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (ForallIn, ExistsIn, UnboundedForall)):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_variables(f: Formula) -> frozenset:
    if isinstance(f, ATOMS):
        return free_variables(f)
    if isinstance(f, Not):
        return all_variables(f.body)
    if type(f) in BINARY:
        return all_variables(f.left) | all_variables(f.right)
    return all_variables(f.body) | {f.var}


def is_admissible(f: Formula) -> bool:
    if isinstance(f, UnboundedForall):
        return False
    if isinstance(f, ATOMS):
        return True
    if isinstance(f, Not):
        return is_admissible(f.body)
    if type(f) in BINARY:
        return is_admissible(f.left) and is_admissible(f.right)
    return is_admissible(f.body)


def is_pure_membership(f: Formula) -> bool:
    """True for formulas built from ``=``, ``in``, connectives and unbounded quantifiers."""
    if isinstance(f, (AtomEq, AtomMem)):
        return True
    if isinstance(f, (AtomInLevel, AtomEmb, ForallIn, ExistsIn)):
        return False
    if isinstance(f, Not):
        return is_pure_membership(f.body)
    if type(f) in BINARY:
        return is_pure_membership(f.left) and is_pure_membership(f.right)
    if isinstance(f, UnboundedForall):
        return is_pure_membership(f.body)
    raise TypeError(f"not a formula: {f!r}")


def labels_of(f: Formula) -> set:
    if isinstance(f, AtomInLevel):
        return {f.a}
    if isinstance(f, AtomEmb):
        return {f.a, f.b}
    if isinstance(f, (AtomEq, AtomMem)):
        return set()
    if isinstance(f, Not):
        return labels_of(f.body)
    if type(f) in BINARY:
        return labels_of(f.left) | labels_of(f.right)
    out = labels_of(f.body)
    if isinstance(f, (ForallIn, ExistsIn)):
        out.add(f.a)
    return out


def rename_free(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free variables; the new names must not occur bound in ``f``."""
    if not mapping:
        return f
    if isinstance(f, AtomEq):
        return AtomEq(mapping.get(f.u, f.u), mapping.get(f.v, f.v))
    if isinstance(f, AtomMem):
        return AtomMem(mapping.get(f.u, f.u), mapping.get(f.v, f.v))
    if isinstance(f, AtomInLevel):
        return AtomInLevel(mapping.get(f.v, f.v), f.a)
    if isinstance(f, AtomEmb):
        return AtomEmb(f.a, f.b, mapping.get(f.u, f.u), mapping.get(f.v, f.v))
    if isinstance(f, Not):
        return Not(rename_free(f.body, mapping))
    if type(f) in BINARY:
        return type(f)(rename_free(f.left, mapping), rename_free(f.right, mapping))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    if isinstance(f, UnboundedForall):
        return UnboundedForall(f.var, rename_free(f.body, inner))
    return type(f)(f.var, f.a, rename_free(f.body, inner))


# level shift and schema instances --------------------------------------------------

def shift_up(f: Formula, r: int) -> Formula:
    """Replace every level ``S_a`` by ``S_{r [+] a}`` and ``I_a^b`` by ``I_{r [+] a}^{r [+] b}``."""
    if isinstance(f, UnboundedForall):
        raise AdmissibilityError("cannot shift a formula with an unbounded quantifier")
    if r == 0:
        if not is_admissible(f):
            raise AdmissibilityError("cannot shift a formula with an unbounded quantifier")
        return f
    if isinstance(f, (AtomEq, AtomMem)):
        return f
    if isinstance(f, AtomInLevel):
        return AtomInLevel(f.v, boxplus(r, f.a))
    if isinstance(f, AtomEmb):
        return AtomEmb(boxplus(r, f.a), boxplus(r, f.b), f.u, f.v)
    if isinstance(f, Not):
        return Not(shift_up(f.body, r))
    if type(f) in BINARY:
        return type(f)(shift_up(f.left, r), shift_up(f.right, r))
    return type(f)(f.var, boxplus(r, f.a), shift_up(f.body, r))


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def _conjunction(parts: Sequence[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def ho_instance(f: Formula, r: int, a: LabelLike) -> Formula:
    """Homogeneous Shift instance for ``f``, shift ``r`` and parameter level ``a``.

    Free variables are taken in sorted order and replaced by fresh ``x``
    (level ``a``) and ``y`` (level ``r (+) a``) variables tied together by
    the embedding ``I_a^{r (+) a}``.
    """
    if not is_admissible(f):
        raise AdmissibilityError("HO instances need an admissible formula")
    a = as_label(a)
    ra = oplus(r, a)
    free = sorted(free_variables(f))
    shifted = shift_up(f, r)
    if not free:
        return Iff(f, shifted)
    taken = set(all_variables(f))
    if len(free) == 1:
        xs, ys = [_fresh("x", taken)], [_fresh("y", taken)]
    else:
        xs = [_fresh(f"x{i}", taken) for i in range(1, len(free) + 1)]
        ys = [_fresh(f"y{i}", taken) for i in range(1, len(free) + 1)]
    body = Implies(
        _conjunction([AtomEmb(a, ra, x, y) for x, y in zip(xs, ys)]),
        Iff(rename_free(f, dict(zip(free, xs))), rename_free(shifted, dict(zip(free, ys)))),
    )
    for y in reversed(ys):
        body = ForallIn(y, ra, body)
    for x in reversed(xs):
        body = ForallIn(x, a, body)
    return body


def gt_instance(phi: Formula, a: LabelLike, var: str | None = None) -> Formula:
    """Generalized Transfer instance for a pure membership formula ``phi``.

    ``var`` is the transferred variable (default ``v`` when free, else the
    first free variable in sorted order); the remaining free variables are
    the side parameters, bounded by level ``a``.
    """
    if not is_pure_membership(phi):
        raise NotPureInFormula("GT applies to formulas built from = and in only")
    a = as_label(a)
    free = sorted(free_variables(phi))
    if var is None:
        if not free:
            raise ValueError("GT needs a free variable to transfer")
        var = "v" if "v" in free else free[0]
    params = [v for v in free if v != var]
    taken = set(all_variables(phi))
    x = _fresh("x", taken)
    xs = [_fresh(f"x{i}", taken) for i in range(1, len(params) + 1)]
    body = rename_free(phi, dict(zip([var] + params, [x] + xs)))
    out: Formula = Implies(ForallIn(x, a, body), UnboundedForall(x, body))
    for xi in reversed(xs):
        out = ForallIn(xi, a, out)
    return out


# finite-domain evaluation ----------------------------------------------------------

Value = Union[Num, frozenset]


def _in_level(value, a: Label) -> bool:
    if isinstance(value, Num):
        return value.support().issubset(a)
    if isinstance(value, frozenset):
        return all(_in_level(v, a) for v in value)
    raise TypeMismatch(f"cannot test level membership of {value!r}")


def _embed_value(value, a: Label, b: Label):
    if isinstance(value, Num):
        # shifted formulas may name scales past the default count
        return embed(value, a, b, scales=max(DEFAULT_SCALES, len(b) and b.indices[-1] + 1))
    if isinstance(value, frozenset):
        return frozenset(_embed_value(v, a, b) for v in value)
    raise TypeMismatch(f"cannot embed {value!r}")


def _lookup(env, name):
    try:
        return env[name]
    except KeyError:
        raise MissingDomain(f"variable {name!r} is unbound") from None


def eval_formula(f: Formula, env: Mapping[str, object], domains: Mapping[str, Sequence]) -> bool:
    """Truth value over finite domains.

    ``domains`` maps each bound variable name to the candidate values it
    ranges over; a level-bounded quantifier ``A x in S_a`` skips candidates
    outside level ``a``.  Values are Nums or frozensets of Nums.
    """
    if isinstance(f, AtomEq):
        return _lookup(env, f.u) == _lookup(env, f.v)
    if isinstance(f, AtomMem):
        container = _lookup(env, f.v)
        if not isinstance(container, frozenset):
            raise TypeMismatch(f"right side of 'in' must be a finite set, got {container!r}")
        return _lookup(env, f.u) in container
    if isinstance(f, AtomInLevel):
        return _in_level(_lookup(env, f.v), f.a)
    if isinstance(f, AtomEmb):
        u = _lookup(env, f.u)
        if not _in_level(u, f.a):
            return False
        return _embed_value(u, f.a, f.b) == _lookup(env, f.v)
    if isinstance(f, Not):
        return not eval_formula(f.body, env, domains)
    if isinstance(f, And):
        return eval_formula(f.left, env, domains) and eval_formula(f.right, env, domains)
    if isinstance(f, Or):
        return eval_formula(f.left, env, domains) or eval_formula(f.right, env, domains)
    if isinstance(f, Implies):
        return (not eval_formula(f.left, env, domains)) or eval_formula(f.right, env, domains)
    if isinstance(f, Iff):
        return eval_formula(f.left, env, domains) == eval_formula(f.right, env, domains)
    if isinstance(f, (ForallIn, ExistsIn, UnboundedForall)):
        if f.var not in domains:
            raise MissingDomain(f"no domain for quantified variable {f.var!r}")
        values = domains[f.var]
        if not isinstance(f, UnboundedForall):
            values = [v for v in values if _in_level(v, f.a)]
        inner = dict(env)
        want_all = not isinstance(f, ExistsIn)
        for v in values:
            inner[f.var] = v
            if eval_formula(f.body, inner, domains) != want_all:
                return not want_all
        return want_all
    raise TypeError(f"not a formula: {f!r}")
