"""Desk-scale Ramsey and density combinatorics.

Finite sets of naturals are plain sorted tuples (``IntSet``); their bound is
``1 + max`` (0 for the empty set).  All searches break ties by taking the
lexicographically least witness.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NoQualifyingWindow, NotSubset, ParseError, ScaleExhausted, TooLarge, WindowTooLarge
from .generators import random_natural, random_num
from .labels import DEFAULT_SCALES, Label, numeral
from .numbers import Num, cmp, embed, end_extension_check, w

IntSet = tuple


def intset(values: Iterable[int]) -> IntSet:
    out = sorted(set(values))
    if any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in out):
        raise ValueError("IntSet elements must be naturals")
    return tuple(out)


def bound(a: Sequence[int]) -> int:
    return a[-1] + 1 if a else 0


def parse_intset(text: str) -> IntSet:
    """Whitespace-separated naturals or a JSON array."""
    stripped = text.strip()
    try:
        if stripped.startswith("["):
            values = json.loads(stripped)
            if not all(isinstance(v, int) for v in values):
                raise ValueError
        else:
            values = [int(tok) for tok in stripped.split()]
        return intset(values)
    except (ValueError, json.JSONDecodeError):
        raise ParseError("expected whitespace-separated naturals or a JSON array", 0) from None


# colorings -----------------------------------------------------------------------------

@dataclass
class Coloring:
    n: int
    r: int
    N: int
    colors: dict  # sorted n-tuple -> color

    def __post_init__(self):
        expected = itertools.combinations(range(self.N), self.n)
        for s in expected:
            c = self.colors.get(s)
            if c is None:
                raise ValueError(f"coloring is not defined on {set(s)}")
            if not 0 <= c < self.r:
                raise ValueError(f"color {c} of {set(s)} is outside 0..{self.r - 1}")

    def __call__(self, subset) -> int:
        return self.colors[tuple(sorted(subset))]

    @classmethod
    def from_function(cls, n: int, r: int, N: int, fn) -> "Coloring":
        return cls(n, r, N, {s: fn(s) for s in itertools.combinations(range(N), n)})

    @classmethod
    def generated(cls, name: str, n: int, N: int, r: Optional[int] = None) -> "Coloring":
        """``parity-sum``, ``pentagon`` (pairs only) or ``constant:c``."""
        if name == "parity-sum":
            return cls.from_function(n, r or 2, N, lambda s: sum(s) % 2)
        if name == "pentagon":
            if n != 2:
                raise ValueError("the pentagon coloring colors pairs")
            return cls.from_function(2, r or 2, N, lambda s: int((s[1] - s[0]) % 5 in (1, 4)))
        if name.startswith("constant:"):
            c = int(name.split(":", 1)[1])
            return cls.from_function(n, r or c + 1, N, lambda s: c)
        raise ValueError(f"unknown coloring generator {name!r}")

    @classmethod
    def from_json(cls, data) -> "Coloring":
        if isinstance(data, str):
            data = json.loads(data)
        n, N = data["n"], data["N"]
        r = data.get("r")
        if "generator" in data:
            return cls.generated(data["generator"], n, N, r)
        colors = {tuple(sorted(s)): c for s, c in data["colors"]}
        return cls(n, r if r is not None else max(colors.values(), default=0) + 1, N, colors)

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "N": self.N,
                "colors": [[list(s), c] for s, c in sorted(self.colors.items())]}


def is_homogeneous(c: Coloring, h: Sequence[int], color: Optional[int] = None) -> bool:
    seen = color
    for s in itertools.combinations(sorted(h), c.n):
        k = c.colors[s]
        if seen is None:
            seen = k
        elif k != seen:
            return False
    return True


def find_homogeneous(c: Coloring, h: int) -> Optional[IntSet]:
    """Lexicographically least ``H`` of size ``h`` on whose ``n``-subsets ``c`` is constant."""
    if h < c.n:
        raise ValueError("need h >= n")
    for cand in itertools.combinations(range(c.N), h):
        if is_homogeneous(c, cand):
            return cand
    return None


def all_colorings(N: int, n: int = 2, r: int = 2):
    subsets = list(itertools.combinations(range(N), n))
    for colors in itertools.product(range(r), repeat=len(subsets)):
        yield Coloring(n, r, N, dict(zip(subsets, colors)))


@dataclass
class GreedyResult:
    a: IntSet
    sentinels: IntSet
    color: int

    @property
    def homogeneous_set(self) -> IntSet:
        return tuple(sorted(self.a + self.sentinels))


def greedy_homogeneous(c: Coloring) -> GreedyResult:
    """Greedy finite adaptation of the Ramsey construction.

    The top ``n - 1`` elements act as sentinels and the top ``n``-set fixes the
    target color; each ``a`` below the sentinels is kept when every new
    ``n``-subset through ``a`` has the target color.  This is a heuristic: it
    guarantees homogeneity, not size.
    """
    if c.N <= c.n:
        raise ValueError("need N > n")
    sentinels = tuple(range(c.N - c.n + 1, c.N))
    c0 = c.colors[tuple(range(c.N - c.n, c.N))]
    chosen: list = []
    for a in range(c.N - c.n + 1):
        pool = chosen + list(sentinels)
        if all(c.colors[tuple(sorted(rest + (a,)))] == c0
               for rest in itertools.combinations(pool, c.n - 1)):
            chosen.append(a)
    result = GreedyResult(tuple(chosen), sentinels, c0)
    assert is_homogeneous(c, result.homogeneous_set, c0)
    return result


# replay of the embedding side conditions --------------------------------------------------

@dataclass
class ReplayReport:
    n: int
    p: int
    clauses: dict = field(default_factory=dict)  # name -> (passed, checked cases)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.clauses.values())

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "passed": self.passed,
                "clauses": {k: {"passed": ok, "cases": cases}
                            for k, (ok, cases) in self.clauses.items()}}


def replay_side_conditions(n: int, p: int, scales: int = DEFAULT_SCALES, seed: int = 0,
                           samples: int = 12) -> ReplayReport:
    """Replay the scale bookkeeping behind the Ramsey argument with exact numbers.

    ``I`` shifts the first ``n`` scales up by one; ``J`` fixes scales below
    ``p`` and shifts the rest.  The clauses are:

    (i) ``x_{i+1} = w_i`` where ``x_1 = w_0`` and ``x_{i+1} = I(x_i)``;
    (ii) ``J`` fixes sampled elements of level ``{0..p-1}`` and rationals;
    (iii) ``J(x_j) = x_{j+1}`` for ``p < j <= n - 1``;
    (iv) ``I`` and ``J`` agree on sampled elements of level ``{p..n-1}``;
    (v) ``x_1`` exceeds sampled standard naturals.
    """
    if n < 2 or not 1 <= p < n:
        raise ValueError("need n >= 2 and 1 <= p < n")
    if n > scales - 1:
        raise ScaleExhausted(f"n = {n} needs {n + 1} scales but only {scales} are configured")
    rng = random.Random(seed)
    src = numeral(n)
    i_label = Label(tuple(range(1, n + 1)))
    j_label = Label(tuple(range(p)) + tuple(range(p + 1, n + 1)))

    def I(x):
        return embed(x, src, i_label, scales)

    def J(x):
        return embed(x, src, j_label, scales)

    xs = {1: w(0)}
    for i in range(1, n):
        xs[i + 1] = I(xs[i])
    report = ReplayReport(n, p)

    report.clauses["i"] = (all(xs[i] == w(i - 1) for i in xs), len(xs))

    low = [random_num(rng, range(p), max_vars=3, max_degree=3) for _ in range(samples)]
    low += [Num(Fraction(rng.randint(-99, 99), rng.randint(1, 99))) for _ in range(samples)]
    report.clauses["ii"] = (all(J(y) == y for y in low), len(low))

    pairs = [(j, J(xs[j]) == xs[j + 1]) for j in range(p + 1, n)]
    report.clauses["iii"] = (all(ok for _, ok in pairs), len(pairs))

    high = [random_num(rng, range(p, n), max_vars=3, max_degree=3) for _ in range(samples)]
    report.clauses["iv"] = (all(I(y) == J(y) for y in high), len(high))

    naturals = [random_natural(rng, []) for _ in range(samples)] + [Num(10 ** 12), Num(0)]
    ee = end_extension_check(xs[1], Label((0,)), naturals, scales)
    report.clauses["v"] = (ee.passed and all(cmp(xs[1], y) > 0 for y in naturals), len(naturals))
    return report


# densities --------------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityResult:
    value: Fraction
    witness: Optional[tuple]  # (u, length) of the window [u, u + length)


def _prefix(a: Sequence[int], universe: int) -> np.ndarray:
    marks = np.zeros(universe, dtype=np.int64)
    if a:
        marks[np.asarray(a, dtype=np.int64)] = 1
    return np.concatenate(([0], np.cumsum(marks)))


def _window_counts(prefix: np.ndarray, length: int) -> np.ndarray:
    return prefix[length:] - prefix[:-length]


def upper_banach_density(a: Sequence[int], window_min: int, universe: Optional[int] = None) -> DensityResult:
    """Largest ``|A n P| / |P|`` over intervals ``P`` of ``[0, N)`` with ``|P| >= window_min``.

    ``N`` defaults to the bound of ``A``.  An empty set with no universe has
    density 0 and no witness.
    """
    a = intset(a)
    if window_min < 1:
        raise ValueError("window_min must be at least 1")
    universe = bound(a) if universe is None else universe
    if a and bound(a) > universe:
        raise ValueError("set exceeds the universe")
    if not a and universe == 0:
        return DensityResult(Fraction(0), None)
    if window_min > universe:
        raise WindowTooLarge(f"window_min {window_min} exceeds N = {universe}")
    pre = _prefix(a, universe)
    best: Optional[tuple] = None  # (value, u, length)
    for length in range(window_min, universe + 1):
        counts = _window_counts(pre, length)
        top = int(counts.max())
        value = Fraction(top, length)
        if best is None or value > best[0]:
            best = (value, int(np.argmax(counts)), length)
        elif value == best[0]:
            u = int(np.argmax(counts))
            if (u, length) < (best[1], best[2]):
                best = (value, u, length)
    return DensityResult(best[0], (best[1], best[2]))


def relative_density(a: Sequence[int], s: Sequence[int], window_min: int, tol=0,
                     universe: Optional[int] = None) -> DensityResult:
    """Density of ``A`` over the windows where ``S`` is within ``tol`` of its own density."""
    a, s = intset(a), intset(s)
    if not set(a) <= set(s):
        raise NotSubset("A is not a subset of S")
    tol = Fraction(tol)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    universe = bound(s) if universe is None else universe
    eta = upper_banach_density(s, window_min, universe)
    if eta.witness is None:
        return DensityResult(Fraction(0), None)
    pre_a, pre_s = _prefix(a, universe), _prefix(s, universe)
    best: Optional[tuple] = None
    for length in range(window_min, universe + 1):
        cs = _window_counts(pre_s, length)
        ca = _window_counts(pre_a, length)
        for u in range(len(cs)):
            if abs(Fraction(int(cs[u]), length) - eta.value) > tol:
                continue
            value = Fraction(int(ca[u]), length)
            if best is None or value > best[0] or (value == best[0] and (u, length) < best[1:]):
                best = (value, u, length)
    if best is None:
        raise NoQualifyingWindow("no window matches the density of S")
    return DensityResult(best[0], (best[1], best[2]))


# arithmetic progressions ----------------------------------------------------------------

def find_k_ap(a: Sequence[int], k: int) -> Optional[tuple]:
    """Lexicographically least ``(start, step)`` of a ``k``-term progression inside ``A``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    a = intset(a)
    if not a:
        return None
    if k == 1:
        return (a[0], 1)
    members = set(a)
    top = a[-1]
    for start in a:
        for step in range(1, (top - start) // (k - 1) + 1):
            if all(start + t * step in members for t in range(1, k)):
                return (start, step)
    return None


MAX_AP_FREE_N = 25


def _closes_ap(chosen: set, x: int, k: int) -> bool:
    # x is larger than everything chosen, so it can only end a progression
    for step in range(1, x // (k - 1) + 1):
        if all(x - t * step in chosen for t in range(1, k)):
            return True
    return False


def _max_ap_free(n: int, k: int, caps: Sequence[int]) -> tuple:
    best: list = []
    chosen: list = []
    members: set = set()

    def dfs(i: int):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if i == n:
            return
        # any AP-free subset of an interval of length m has at most caps[m] elements
        if len(chosen) + caps[n - i] <= len(best):
            return
        if not _closes_ap(members, i, k):
            chosen.append(i)
            members.add(i)
            dfs(i + 1)
            chosen.pop()
            members.discard(i)
        dfs(i + 1)

    dfs(0)
    return len(best), tuple(best)


def max_ap_free_subset(n: int, k: int) -> tuple:
    """Largest ``B`` in ``[0, n)`` with no ``k``-term progression, as ``(size, witness)``."""
    if k < 3:
        raise ValueError("k must be at least 3")
    if n > MAX_AP_FREE_N:
        raise TooLarge(f"N = {n} exceeds the exhaustive guard {MAX_AP_FREE_N}")
    caps = [0]
    result = (0, ())
    for m in range(1, n + 1):
        caps.append(m)  # placeholder bound while solving length m
        result = _max_ap_free(m, k, caps)
        caps[m] = result[0]
    return result
