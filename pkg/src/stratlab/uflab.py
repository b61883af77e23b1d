"""Ultrafilters, tensor powers and ultrapowers on small finite index sets.

Every filter on a finite set is determined by its kernel (the
intersection of its members), so a ``FiniteUltrafilter`` stores the ground
set and a one-point kernel.  Constructions are computed from their
defining membership tests: the kernel of a family ``F`` on ground ``G`` is
the set of points ``p`` with ``G - {p}`` not in ``F``.  The ``exhaustive``
mode of each construction instead enumerates every subset and runs
:func:`is_ultrafilter` on the explicit family, which gives an independent
route for small grounds.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import NotSubset, ParseError, SizeMismatch, TooLarge, UnsupportedFormula
from .labels import LabelLike, as_label, numeral, order_iso

EXHAUSTIVE_BOUND = 1 << 16


def _sorted_points(points: Iterable) -> tuple:
    return tuple(sorted(set(points)))


def _subsets(ground: Sequence):
    for r in range(len(ground) + 1):
        for combo in itertools.combinations(ground, r):
            yield frozenset(combo)


def _canonical_family(family: Iterable) -> list:
    return sorted((tuple(sorted(s)) for s in family), key=lambda t: (len(t), t))


@dataclass(frozen=True)
class FiniteUltrafilter:
    ground: tuple
    kernel: frozenset

    def __post_init__(self):
        object.__setattr__(self, "ground", _sorted_points(self.ground))
        object.__setattr__(self, "kernel", frozenset(self.kernel))
        if len(self.kernel) != 1 or not self.kernel <= set(self.ground):
            raise ValueError(f"kernel {set(self.kernel)} does not define an ultrafilter on {self.ground}")

    @classmethod
    def principal(cls, ground: Iterable, point) -> "FiniteUltrafilter":
        return cls(tuple(ground), frozenset([point]))

    @classmethod
    def from_membership(cls, ground: Iterable, member: Callable) -> "FiniteUltrafilter":
        """Build from a membership test that defines an ultrafilter."""
        ground = _sorted_points(ground)
        everything = frozenset(ground)
        kernel = frozenset(p for p in ground if not member(everything - {p}))
        if len(kernel) != 1 or not member(kernel):
            raise ValueError("membership test does not define an ultrafilter")
        return cls(ground, kernel)

    @classmethod
    def from_family(cls, family: Iterable, ground: Iterable) -> "FiniteUltrafilter":
        ground = _sorted_points(ground)
        fam = {frozenset(s) for s in family}
        if not is_ultrafilter(fam, ground):
            raise ValueError("family is not an ultrafilter")
        return cls(ground, frozenset.intersection(*fam))

    @property
    def point(self):
        return next(iter(self.kernel))

    def __contains__(self, subset) -> bool:
        return self.kernel <= frozenset(subset)

    def family(self, bound: int = EXHAUSTIVE_BOUND) -> list:
        """Explicit members in canonical order (by size, then lexicographically)."""
        if 2 ** len(self.ground) > bound:
            raise TooLarge(f"2^{len(self.ground)} subsets exceed the enumeration bound {bound}")
        return _canonical_family(s for s in _subsets(self.ground) if self.kernel <= s)

    def to_json(self) -> dict:
        return {"ground": [_jsonable(p) for p in self.ground],
                "family": [[_jsonable(p) for p in s] for s in self.family()]}

    @classmethod
    def from_json(cls, data) -> "FiniteUltrafilter":
        if isinstance(data, str):
            data = json.loads(data)
        ground = [_unjson(p) for p in data["ground"]]
        family = [[_unjson(p) for p in s] for s in data["family"]]
        return cls.from_family(family, ground)


def _jsonable(p):
    return [_jsonable(q) for q in p] if isinstance(p, tuple) else p


def _unjson(p):
    return tuple(_unjson(q) for q in p) if isinstance(p, list) else p


def is_ultrafilter(family: Iterable, ground: Iterable) -> bool:
    """Check the ultrafilter axioms by enumeration over all subsets of ``ground``."""
    ground = frozenset(ground)
    fam = {frozenset(s) for s in family}
    if not fam or frozenset() in fam:
        return False
    if any(not s <= ground for s in fam):
        return False
    points = sorted(ground, key=repr)
    for y in _subsets(points):
        if (y in fam) == ((ground - y) in fam):
            return False
        if y in fam and any((y | {p}) not in fam for p in points):
            return False
    members = list(fam)
    return all(s & t in fam for s, t in itertools.combinations(members, 2))


def all_ultrafilters(ground: Iterable, exhaustive: bool = False) -> list:
    """All ultrafilters on a finite set.

    The default lists the principal ones; ``exhaustive`` filters every
    family of subsets through :func:`is_ultrafilter` (``|ground| <= 4``).
    """
    ground = _sorted_points(ground)
    if not exhaustive:
        return [FiniteUltrafilter.principal(ground, p) for p in ground]
    if len(ground) > 4:
        raise TooLarge("exhaustive enumeration is limited to |I| <= 4")
    subsets = list(_subsets(ground))
    half = len(subsets) // 2
    out = []
    for mask in range(1 << len(subsets)):
        # an ultrafilter holds exactly one of each complementary pair
        if bin(mask).count("1") != half:
            continue
        fam = [s for k, s in enumerate(subsets) if mask >> k & 1]
        if is_ultrafilter(fam, ground):
            out.append(FiniteUltrafilter.from_family(fam, ground))
    return sorted(out, key=lambda u: u.point)


def _as_map(pi) -> Callable:
    if isinstance(pi, Mapping):
        return pi.__getitem__
    return pi


def _build(ground, member, exhaustive: bool, bound: int) -> FiniteUltrafilter:
    ground = _sorted_points(ground)
    if not exhaustive:
        return FiniteUltrafilter.from_membership(ground, member)
    if 2 ** len(ground) > bound:
        raise TooLarge(f"2^{len(ground)} subsets exceed the enumeration bound {bound}")
    fam = [y for y in _subsets(ground) if member(y)]
    return FiniteUltrafilter.from_family(fam, ground)


def pushforward(pi, u: FiniteUltrafilter, target: Iterable | None = None,
                exhaustive: bool = False, bound: int = EXHAUSTIVE_BOUND) -> FiniteUltrafilter:
    """``{Y subset of J : pi^-1[Y] in U}``; ``J`` defaults to the image of ``pi``."""
    f = _as_map(pi)
    image = {i: f(i) for i in u.ground}
    target = _sorted_points(image.values() if target is None else target)
    if not set(image.values()) <= set(target):
        raise ValueError("pi maps outside the target set")

    def member(y):
        return frozenset(i for i, j in image.items() if j in y) in u

    return _build(target, member, exhaustive, bound)


def _pair(x, y):
    return (x, y)


def tensor(u: FiniteUltrafilter, v: FiniteUltrafilter, exhaustive: bool = False,
           bound: int = EXHAUSTIVE_BOUND, pair: Callable = _pair) -> FiniteUltrafilter:
    """``Z in U (x) V`` iff ``{x : {y : (x, y) in Z} in V} in U``."""
    if exhaustive and 2 ** (len(u.ground) * len(v.ground)) > bound:
        raise TooLarge(f"2^{len(u.ground) * len(v.ground)} subsets exceed the bound {bound}")
    ground = [pair(x, y) for x in u.ground for y in v.ground]

    def member(z):
        return frozenset(x for x in u.ground
                         if frozenset(y for y in v.ground if pair(x, y) in z) in v) in u

    return _build(ground, member, exhaustive, bound)


def _cons(x, t):
    return (x,) + t


def tensor_power(u: FiniteUltrafilter, n: int, exhaustive: bool = False,
                 max_points: int = 27) -> FiniteUltrafilter:
    """``n``-th tensor power over ``I^n`` (points are ``n``-tuples).

    The zeroth power lives on ``{()}``; the first is ``U`` with each point
    ``i`` written ``(i,)``; then ``U (x) (tensor_power(U, n))``.
    """
    if n < 0:
        raise ValueError("tensor power needs n >= 0")
    if len(u.ground) ** n > max_points:
        raise TooLarge(f"|I|^n = {len(u.ground) ** n} exceeds {max_points}")
    if n == 0:
        return FiniteUltrafilter.principal([()], ())
    if n == 1:
        return FiniteUltrafilter((tuple((i,) for i in u.ground)), frozenset((i,) for i in u.kernel))
    return tensor(u, tensor_power(u, n - 1, exhaustive, max_points), exhaustive=exhaustive,
                  pair=_cons)


def project_to_label(u: FiniteUltrafilter, a: LabelLike, n: int,
                     exhaustive: bool = False) -> FiniteUltrafilter:
    """``U_a``: push the ``n``-th tensor power to ``I^a`` along ``order_iso(n, a)``.

    Points of ``I^a`` are functions ``a -> I`` written as sorted
    ``(index, value)`` pairs.
    """
    a = as_label(a)
    if len(a) != n:
        raise SizeMismatch(f"|{a}| != {n}")
    iso = order_iso(numeral(n), a)

    def to_function(t):
        return tuple((iso[k], t[k]) for k in range(n))

    return pushforward(to_function, tensor_power(u, n, exhaustive), exhaustive=exhaustive)


def restrict_point(point: tuple, a: LabelLike) -> tuple:
    a = as_label(a)
    return tuple((k, v) for k, v in point if k in a)


def check_coherence(u: FiniteUltrafilter, a: LabelLike, b: LabelLike,
                    exhaustive: bool = False) -> bool:
    """``U_a`` equals the push-forward of ``U_b`` along restriction to ``a``."""
    a, b = as_label(a), as_label(b)
    if not a.issubset(b):
        raise NotSubset(f"{a} is not a subset of {b}")
    if len(b) > 3 or len(u.ground) > 3:
        raise TooLarge("coherence checks are limited to |b| <= 3 and |I| <= 3")
    ua = project_to_label(u, a, len(a), exhaustive)
    ub = project_to_label(u, b, len(b), exhaustive)
    return pushforward(lambda i: restrict_point(i, a), ub, exhaustive=exhaustive) == ua


# finite structures and ultrapowers ---------------------------------------------------

@dataclass(frozen=True)
class FiniteStructure:
    universe: tuple
    relations: Mapping = field(default_factory=dict)  # name -> frozenset of tuples

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        rels = {}
        for name, tuples in dict(self.relations).items():
            ts = frozenset(tuple(t) for t in tuples)
            arities = {len(t) for t in ts}
            if len(arities) > 1 or (arities and arities.pop() not in (1, 2)):
                raise ValueError(f"relation {name} must have a single arity of 1 or 2")
            if any(x not in self.universe for t in ts for x in t):
                raise ValueError(f"relation {name} leaves the universe")
            rels[name] = ts
        object.__setattr__(self, "relations", rels)

    def holds(self, name: str, args: tuple) -> bool:
        return tuple(args) in self.relations[name]

    def to_json(self) -> dict:
        return {"universe": [_jsonable(p) for p in self.universe],
                "relations": {k: sorted([_jsonable(x) for x in t] for t in v)
                              for k, v in self.relations.items()}}

    @classmethod
    def from_json(cls, data) -> "FiniteStructure":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(_unjson(p) for p in data["universe"]),
                   {k: [tuple(_unjson(x) for x in t) for t in v]
                    for k, v in data.get("relations", {}).items()})


def digraph(n: int, edges: Iterable) -> FiniteStructure:
    return FiniteStructure(tuple(range(n)), {"R": [tuple(e) for e in edges]})


def all_digraphs(n: int):
    """Every digraph (loops allowed) on ``{0..n-1}`` with edge relation ``R``."""
    pairs = [(i, j) for i in range(n) for j in range(n)]
    for mask in range(1 << len(pairs)):
        yield digraph(n, [p for k, p in enumerate(pairs) if mask >> k & 1])


@dataclass
class Ultrapower:
    structure: FiniteStructure
    quotient: dict  # function (tuple aligned with the index set) -> class representative
    index: tuple


def ultrapower(m: FiniteStructure, u: FiniteUltrafilter) -> Ultrapower:
    """Functions ``I -> M`` modulo agreement on a ``U``-large set."""
    index = u.ground
    functions = list(itertools.product(m.universe, repeat=len(index)))

    def agree(f, g):
        return frozenset(i for k, i in enumerate(index) if f[k] == g[k]) in u

    quotient: dict = {}
    reps: list = []
    for f in functions:
        for r in reps:
            if agree(f, r):
                quotient[f] = r
                break
        else:
            reps.append(f)
            quotient[f] = f
    rels = {}
    for name, tuples in m.relations.items():
        arity = len(next(iter(tuples))) if tuples else 2
        rels[name] = [args for args in itertools.product(reps, repeat=arity)
                      if frozenset(i for k, i in enumerate(index)
                                   if tuple(a[k] for a in args) in tuples) in u]
    return Ultrapower(FiniteStructure(tuple(reps), rels), quotient, index)


# the bounded formula family -----------------------------------------------------------

@dataclass(frozen=True)
class LosFormula:
    """Prenex formula: quantifier prefix over a quantifier-free matrix.

    ``prefix`` holds ``("A" | "E", var)`` pairs; the matrix is a nested
    tuple built from ``("rel", name, vars)``, ``("eq", u, v)``,
    ``("not", m)``, ``("and", m1, m2)``, ``("or", m1, m2)`` and
    ``("imp", m1, m2)``.  ``free`` fixes the order of the free variables.
    """

    prefix: tuple
    matrix: tuple
    free: tuple

    def __str__(self):
        head = "".join(f"{q} {v}. " for q, v in self.prefix)
        return head + _render_matrix(self.matrix)


def _render_matrix(m) -> str:
    tag = m[0]
    if tag == "rel":
        return f"{m[1]}({','.join(m[2])})"
    if tag == "eq":
        return f"{m[1]} = {m[2]}"
    if tag == "not":
        return f"!({_render_matrix(m[1])})"
    op = {"and": "&", "or": "|", "imp": "->"}[tag]
    return f"({_render_matrix(m[1])}) {op} ({_render_matrix(m[2])})"


def _matrix_vars(m) -> set:
    tag = m[0]
    if tag == "rel":
        return set(m[2])
    if tag == "eq":
        return {m[1], m[2]}
    if tag == "not":
        return _matrix_vars(m[1])
    return _matrix_vars(m[1]) | _matrix_vars(m[2])


_LOS_TOKEN = re.compile(r"\s*(?:(->|[&|!().,=])|([A-Z][A-Za-z0-9_]*)|([a-z][a-z0-9_]*))")


def parse_los_formula(text: str, free: Sequence[str] | None = None) -> LosFormula:
    """Parse e.g. ``A y. E z. (R(x,y)) & (!(y = z))``.

    ``&`` binds tighter than ``|`` which binds tighter than ``->``.
    """
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _LOS_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        kind = "op" if m.group(1) else ("name" if m.group(2) else "var")
        toks.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    i = 0

    def peek():
        return toks[i]

    def take(value=None, kind=None):
        nonlocal i
        tok = toks[i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            raise ParseError(f"expected {value or kind!r}, found {tok[1] or 'end'!r}", tok[2])
        i += 1
        return tok

    prefix = []
    while peek()[0] == "name" and peek()[1] in ("A", "E") and toks[i + 1][0] == "var":
        q = take()[1]
        v = take(kind="var")[1]
        take(".")
        prefix.append((q, v))

    def imp():
        left = disj()
        if peek()[1] == "->":
            take()
            return ("imp", left, imp())
        return left

    def disj():
        left = conj()
        while peek()[1] == "|":
            take()
            left = ("or", left, conj())
        return left

    def conj():
        left = unary()
        while peek()[1] == "&":
            take()
            left = ("and", left, unary())
        return left

    def unary():
        tok = peek()
        if tok[1] == "!":
            take()
            return ("not", unary())
        if tok[1] == "(":
            take()
            inner = imp()
            take(")")
            return inner
        if tok[0] == "name":
            name = take()[1]
            take("(")
            args = [take(kind="var")[1]]
            while peek()[1] == ",":
                take()
                args.append(take(kind="var")[1])
            take(")")
            return ("rel", name, tuple(args))
        u = take(kind="var")[1]
        take("=")
        return ("eq", u, take(kind="var")[1])

    matrix = imp()
    if peek()[0] != "end":
        raise ParseError(f"trailing input {peek()[1]!r}", peek()[2])
    bound = [v for _, v in prefix]
    found = sorted(_matrix_vars(matrix) - set(bound))
    if free is None:
        free = found
    elif not set(found) <= set(free):
        raise UnsupportedFormula(f"free variables {found} not covered by {list(free)}")
    return LosFormula(tuple(prefix), matrix, tuple(free))


def _check_supported(phi: LosFormula, m: FiniteStructure, max_quantifiers: int = 2):
    if len(phi.prefix) > max_quantifiers:
        raise UnsupportedFormula(f"more than {max_quantifiers} quantifiers")
    bound = [v for _, v in phi.prefix]
    if len(set(bound)) != len(bound) or set(bound) & set(phi.free):
        raise UnsupportedFormula("quantified variables must be distinct and not free")

    def walk(node):
        if node[0] == "rel":
            if node[1] not in m.relations:
                raise UnsupportedFormula(f"relation {node[1]} not in the signature")
            tuples = m.relations[node[1]]
            if tuples and len(next(iter(tuples))) != len(node[2]):
                raise UnsupportedFormula(f"arity mismatch for {node[1]}")
        elif node[0] in ("not",):
            walk(node[1])
        elif node[0] in ("and", "or", "imp"):
            walk(node[1])
            walk(node[2])
        elif node[0] != "eq":
            raise UnsupportedFormula(f"unknown matrix node {node[0]!r}")

    walk(phi.matrix)


def _eval_matrix(m: FiniteStructure, node, env) -> bool:
    tag = node[0]
    if tag == "rel":
        return tuple(env[v] for v in node[2]) in m.relations[node[1]]
    if tag == "eq":
        return env[node[1]] == env[node[2]]
    if tag == "not":
        return not _eval_matrix(m, node[1], env)
    a = _eval_matrix(m, node[1], env)
    if tag == "and":
        return a and _eval_matrix(m, node[2], env)
    if tag == "or":
        return a or _eval_matrix(m, node[2], env)
    return (not a) or _eval_matrix(m, node[2], env)


def satisfies(m: FiniteStructure, phi: LosFormula, args: Sequence) -> bool:
    """``m |= phi[args]`` with ``args`` aligned to ``phi.free``."""
    env = dict(zip(phi.free, args))

    def go(k):
        if k == len(phi.prefix):
            return _eval_matrix(m, phi.matrix, env)
        q, v = phi.prefix[k]
        results = []
        for x in m.universe:
            env[v] = x
            r = go(k + 1)
            if q == "A" and not r:
                return False
            if q == "E" and r:
                return True
            results.append(r)
        return q == "A"

    return go(0)


def los_check(phi: LosFormula, functions: Sequence[tuple], m: FiniteStructure,
              u: FiniteUltrafilter, up: Ultrapower | None = None) -> bool:
    """Compare ultrapower satisfaction at ``[f1]..[fk]`` with ``U``-largeness of pointwise truth."""
    _check_supported(phi, m)
    if len(functions) != len(phi.free):
        raise UnsupportedFormula(f"{len(phi.free)} free variables but {len(functions)} functions")
    if up is None:
        up = ultrapower(m, u)
    functions = [tuple(f) for f in functions]
    lhs = satisfies(up.structure, phi, [up.quotient[f] for f in functions])
    pointwise = frozenset(i for k, i in enumerate(u.ground)
                          if satisfies(m, phi, [f[k] for f in functions]))
    return lhs == (pointwise in u)


def diagonal_embedding_check(m: FiniteStructure, u: FiniteUltrafilter,
                             up: Ultrapower | None = None) -> bool:
    """Constant functions embed ``m`` into its ultrapower, preserving atoms and equality."""
    if up is None:
        up = ultrapower(m, u)
    d = {x: up.quotient[(x,) * len(up.index)] for x in m.universe}
    for x, y in itertools.product(m.universe, repeat=2):
        if (x == y) != (d[x] == d[y]):
            return False
    for name, tuples in m.relations.items():
        arity = len(next(iter(tuples))) if tuples else 2
        for args in itertools.product(m.universe, repeat=arity):
            if (args in tuples) != up.structure.holds(name, tuple(d[a] for a in args)):
                return False
    return True


def induced_embedding_check(m: FiniteStructure, u: FiniteUltrafilter, pi,
                            formulas: Iterable[LosFormula]) -> bool:
    """``[g]_V -> [g o pi]_U`` for ``V = pi[U]`` is well defined and preserves ``formulas``."""
    f = _as_map(pi)
    v = pushforward(pi, u)
    up_u, up_v = ultrapower(m, u), ultrapower(m, v)
    pos = {j: k for k, j in enumerate(v.ground)}

    def lift(g):
        return up_u.quotient[tuple(g[pos[f(i)]] for i in u.ground)]

    image = {}
    for g, rep in up_v.quotient.items():
        if image.setdefault(rep, lift(g)) != lift(g):
            return False
    for phi in formulas:
        reps = up_v.structure.universe
        for args in itertools.product(reps, repeat=len(phi.free)):
            if satisfies(up_v.structure, phi, args) != satisfies(
                    up_u.structure, phi, [image[a] for a in args]):
                return False
    return True


def formula_family(signature: Mapping[str, int], max_quantifiers: int = 2,
                   max_vars: int = 3, max_free: int = 2) -> list:
    """The fixed bounded family used by the exhaustive Łoś sweep.

    Prenex formulas with at most ``max_quantifiers`` quantifiers and
    ``max_vars`` variables in total; the matrix is a literal or a
    conjunction or disjunction of two literals on distinct atoms.
    """
    out = []
    for k in range(max_free + 1):
        for q in range(max_quantifiers + 1):
            if k + q > max_vars or k + q == 0:
                continue
            free = tuple(f"x{i}" for i in range(1, k + 1))
            bound = tuple(f"y{i}" for i in range(1, q + 1))
            names = free + bound
            atoms = []
            for name, arity in sorted(signature.items()):
                for args in itertools.product(names, repeat=arity):
                    atoms.append(("rel", name, args))
            atoms += [("eq", s, t) for s, t in itertools.combinations(names, 2)]
            literals = [(a, False) for a in atoms] + [(a, True) for a in atoms]

            def lit(pair):
                return ("not", pair[0]) if pair[1] else pair[0]

            matrices = [lit(l) for l in literals]
            for (a1, a2) in itertools.combinations(range(len(atoms)), 2):
                for n1, n2 in itertools.product((False, True), repeat=2):
                    l1, l2 = lit((atoms[a1], n1)), lit((atoms[a2], n2))
                    matrices.append(("and", l1, l2))
                    matrices.append(("or", l1, l2))
            for quants in itertools.product("AE", repeat=q):
                prefix = tuple(zip(quants, bound))
                for mtx in matrices:
                    out.append(LosFormula(prefix, mtx, free))
    return out


# vectorized exhaustive sweep over all digraphs ---------------------------------------------

def _batch_truth(rel: np.ndarray, phi: LosFormula, cache: dict) -> np.ndarray:
    """Truth table over the free variables for a batch of binary relations.

    ``rel`` has shape ``(G, n, n)``; the result has shape ``(G,) + (n,) * k``.
    """
    names = phi.free + tuple(v for _, v in phi.prefix)
    nv = len(names)
    n = rel.shape[1]
    pos = {v: i for i, v in enumerate(names)}
    key_grid = ("grid", nv)
    if key_grid not in cache:
        cache[key_grid] = np.indices((n,) * nv) if nv else np.zeros((0,), dtype=int)
    grids = cache[key_grid]

    def atom(node):
        key = (node, nv)
        if key not in cache:
            if node[0] == "rel":
                s, t = node[2]
                val = rel[:, grids[pos[s]], grids[pos[t]]]
            else:
                val = np.broadcast_to(grids[pos[node[1]]] == grids[pos[node[2]]],
                                      (rel.shape[0],) + (n,) * nv)
            cache[key] = val
        return cache[key]

    def go(node):
        tag = node[0]
        if tag in ("rel", "eq"):
            return atom(node)
        if tag == "not":
            return ~go(node[1])
        a, b = go(node[1]), go(node[2])
        if tag == "and":
            return a & b
        if tag == "or":
            return a | b
        return ~a | b

    val = go(phi.matrix)
    for k in range(len(phi.prefix) - 1, -1, -1):
        q = phi.prefix[k][0]
        axis = 1 + len(phi.free) + k
        val = val.all(axis=axis) if q == "A" else val.any(axis=axis)
    return val


def _row_keys(table: np.ndarray):
    """Pack each boolean row into one integer, or ``None`` if rows are too wide."""
    width = table.shape[1]
    if width > 62:
        return None
    return table.astype(np.int64) @ (np.int64(1) << np.arange(width, dtype=np.int64))


@dataclass
class LosSweepReport:
    cases: int = 0
    failures: list = field(default_factory=list)
    formulas: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures


def los_sweep(max_index: int = 3, max_nodes: int = 3, formulas: Sequence[LosFormula] | None = None,
              report: LosSweepReport | None = None) -> LosSweepReport:
    """Łoś check for every ultrafilter on ``|I| <= max_index``, every digraph on
    at most ``max_nodes`` nodes, every formula of the family and every tuple
    of functions ``I -> M``.

    The ultrapower relation is computed from the definition for the whole
    batch of digraphs at once; both sides are then compared in bulk.
    """
    if formulas is None:
        formulas = formula_family({"R": 2})
    report = report or LosSweepReport()
    report.formulas = len(formulas)
    for n in range(1, max_nodes + 1):
        pairs = [(i, j) for i in range(n) for j in range(n)]
        masks = np.arange(1 << len(pairs))
        rel = np.zeros((len(masks), n, n), dtype=bool)
        for k, (i, j) in enumerate(pairs):
            rel[:, i, j] = (masks >> k) & 1
        g = len(masks)
        lifts = []
        for size in range(1, max_index + 1):
            index = tuple(range(size))
            functions = list(itertools.product(range(n), repeat=size))
            weights = 1 << np.arange(size)
            for u in all_ultrafilters(index):
                member = np.array([frozenset(i for i in index if mask >> i & 1) in u
                                   for mask in range(1 << size)])
                up = ultrapower(digraph(n, []), u)
                reps = list(up.structure.universe)
                rep_index = {r: k for k, r in enumerate(reps)}
                cls = np.array([rep_index[up.quotient[f]] for f in functions])
                rep_arr = np.array(reps).reshape(len(reps), size)
                # R_U([f],[g]) iff {i : R(f(i), g(i))} in U, for every digraph at once
                bits = rel[:, rep_arr[:, None, :], rep_arr[None, :, :]]
                up_rel = member[(bits * weights).sum(axis=-1)]
                lifts.append((size, u, member, cls, len(reps), up_rel))
        # a tuple of k functions is indexed by its values (p_0, ..., p_{size-1}),
        # p_i in M^k; per lift, map that index to the tuple of classes
        class_index = {}
        for k in range(3):
            for li, (size, _, _, cls, c, _) in enumerate(lifts):
                pts = np.array(list(itertools.product(range(n ** k), repeat=size)),
                               dtype=int).reshape(-1, size)
                digits = [(pts // n ** (k - 1 - j)) % n for j in range(k)]
                fidx = [sum(d[:, i] * n ** (size - 1 - i) for i in range(size)) for d in digits]
                class_index[li, k] = sum((cls[f] * c ** (k - 1 - j) for j, f in enumerate(fidx)),
                                         np.zeros(len(pts), dtype=int))
        # lifts with the same number of classes are evaluated as one stacked batch
        groups = {}
        for li, lift in enumerate(lifts):
            groups.setdefault(lift[4], []).append(li)
        stacks = {c: (np.concatenate([lifts[li][5] for li in members]), {})
                  for c, members in groups.items()}
        base_cache: dict = {}
        # every case for a graph is decided by the pair (truth table in M, truth
        # table in the ultrapower); pairs already verified are not re-expanded
        seen: dict = {}
        for phi in formulas:
            k = len(phi.free)
            flat = _batch_truth(rel, phi, base_cache).reshape(g, -1).astype(np.uint8)
            base_key = _row_keys(flat)
            for c, members in groups.items():
                stacked, up_cache = stacks[c]
                lifted_all = _batch_truth(stacked, phi, up_cache).reshape(len(members), g, -1)
                width = flat.shape[1] + lifted_all.shape[2]
                lifted_key = _row_keys(lifted_all.reshape(len(members) * g, -1))
                for li in members:
                    report.cases += g * len(class_index[li, k])
                fresh_rows = {li: np.arange(g) for li in members}
                if base_key is not None and lifted_key is not None and width + 8 <= 62:
                    tags = np.repeat(np.array(members, dtype=np.int64), g)
                    keys = (tags << width) | (np.tile(base_key, len(members)) << lifted_all.shape[2]) \
                        | lifted_key
                    uniq, first = np.unique(keys, return_index=True)
                    done = seen.setdefault((k, c), set())
                    fresh = [(key, r) for key, r in zip(uniq.tolist(), first.tolist()) if key not in done]
                    done.update(key for key, _ in fresh)
                    fresh_rows = {}
                    for _, r in fresh:
                        fresh_rows.setdefault(members[r // g], []).append(r % g)
                for li, rows in fresh_rows.items():
                    size, u, member, _, _, _ = lifts[li]
                    rows = np.asarray(rows, dtype=int)
                    lifted = lifted_all[members.index(li)]
                    sub = flat[rows]
                    mask = np.zeros((len(rows),) + (1,) * size, dtype=np.uint8)
                    for i in range(size):
                        shape = [len(rows)] + [1] * size
                        shape[1 + i] = sub.shape[1]
                        mask = mask | (sub.reshape(shape) << i)
                    rhs = member[mask.reshape(len(rows), -1)]
                    lhs = np.take(lifted[rows], class_index[li, k], axis=1)
                    if np.array_equal(lhs, rhs):
                        continue
                    for bad in np.argwhere(lhs != rhs)[:5]:
                        report.failures.append({"nodes": n, "index": size, "point": u.point,
                                                "graph": int(rows[bad[0]]), "formula": str(phi),
                                                "case": int(bad[1])})
    return report
