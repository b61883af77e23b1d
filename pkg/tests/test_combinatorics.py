import itertools
import random
from fractions import Fraction
from pathlib import Path

import pytest

from oracles import ap_oracle, brute_ap_free, density_oracle
from stratlab.combinatorics import (
    Coloring, all_colorings, bound, find_homogeneous, find_k_ap, greedy_homogeneous, intset,
    is_homogeneous, max_ap_free_subset, parse_intset, relative_density, replay_side_conditions,
    upper_banach_density,
)
from stratlab.errors import (
    NotSubset, ParseError, ScaleExhausted, TooLarge, WindowTooLarge,
)
from stratlab.generators import random_intset

FIXTURES = Path(__file__).parent / "fixtures"
EVENS = tuple(range(0, 100, 2))
FOURS = tuple(range(0, 100, 4))


def coloring(name):
    return Coloring.from_json((FIXTURES / name).read_text())


# Ramsey --------------------------------------------------------------------------

def test_find_homogeneous_examples():
    assert find_homogeneous(coloring("parity6.json"), 3) == (0, 2, 4)
    for N in range(2, 7):
        c = Coloring.generated("constant:1", 2, N)
        for h in range(2, N + 1):
            assert find_homogeneous(c, h) == tuple(range(h))
    assert find_homogeneous(coloring("pentagon5.json"), 3) is None


def test_find_homogeneous_against_brute_force():
    for c in itertools.islice(all_colorings(5), 0, 1024, 7):
        expected = next((h for h in itertools.combinations(range(5), 3)
                         if len({c(s) for s in itertools.combinations(h, 2)}) == 1), None)
        assert find_homogeneous(c, 3) == expected


def test_triples_and_explicit_colorings():
    c = coloring("explicit5.json")
    assert c({0, 4}) == 1 and c.r == 2
    assert find_homogeneous(c, 3) == (0, 1, 2)
    assert Coloring.from_json(c.to_json()) == c
    t = Coloring.from_function(3, 2, 6, lambda s: int(sum(s) > 7))
    h = find_homogeneous(t, 4)
    assert h == (0, 1, 2, 3) and is_homogeneous(t, h)


def test_coloring_validation():
    with pytest.raises(ValueError):
        Coloring(2, 2, 3, {(0, 1): 0, (0, 2): 1})
    with pytest.raises(ValueError):
        Coloring(2, 2, 3, {(0, 1): 0, (0, 2): 1, (1, 2): 2})


def test_greedy_examples():
    for N in range(3, 9):
        g = greedy_homogeneous(Coloring.generated("constant:0", 2, N))
        assert g.a == tuple(range(N - 1))
    c = Coloring.generated("parity-sum", 2, 8)
    g = greedy_homogeneous(c)
    assert g.sentinels == (7,) and g.color == c({6, 7}) == 1
    # c0 = 1 needs odd pair sums, so no three elements qualify
    assert g.a == (0,)
    assert is_homogeneous(c, g.homogeneous_set)
    # every a below N - n is rejected; N - n itself always completes the top n-set
    adversarial = Coloring.from_function(2, 2, 5, lambda s: int(s == (3, 4)))
    g = greedy_homogeneous(adversarial)
    assert g.a == (3,) and g.homogeneous_set == (3, 4)


def test_greedy_always_homogeneous():
    rng = random.Random(30)
    for _ in range(200):
        n = rng.choice([2, 3])
        N = rng.randint(n + 1, 8)
        r = rng.randint(1, 3)
        c = Coloring.from_function(n, r, N, lambda s: rng.randrange(r))
        g = greedy_homogeneous(c)
        assert is_homogeneous(c, g.homogeneous_set, g.color)


# replay --------------------------------------------------------------------------

@pytest.mark.parametrize("n, p", [(3, 1), (2, 1), (5, 3)])
def test_replay_examples(n, p):
    rep = replay_side_conditions(n, p)
    assert rep.passed
    assert set(rep.clauses) == {"i", "ii", "iii", "iv", "v"}


def test_replay_sweep():
    for n in range(2, 7):
        for p in range(1, n):
            assert replay_side_conditions(n, p).passed


def test_replay_guards():
    with pytest.raises(ScaleExhausted):
        replay_side_conditions(8, 2)
    with pytest.raises(ValueError):
        replay_side_conditions(3, 3)


# densities -----------------------------------------------------------------------

def test_density_examples():
    d = upper_banach_density(EVENS, 10)
    assert d.value == Fraction(6, 11) and d.witness == (0, 11)
    assert upper_banach_density((), 1).value == 0
    assert upper_banach_density(tuple(range(40)), 7).value == 1
    with pytest.raises(WindowTooLarge):
        upper_banach_density((0, 3), 5)


def test_density_against_oracle():
    rng = random.Random(31)
    for _ in range(60):
        n = rng.randint(1, 120)
        a = random_intset(rng, n)
        if not a:
            continue
        window = rng.randint(1, bound(a))
        value, u, length = density_oracle(a, window, bound(a))
        d = upper_banach_density(a, window)
        assert (d.value, d.witness) == (value, (u, length))


def test_density_monotonicity():
    rng = random.Random(32)
    for _ in range(40):
        s = random_intset(rng, 80, 0.5)
        a = [x for x in s if rng.random() < 0.5]
        if not a or not s:
            continue
        universe = bound(s)
        w = rng.randint(1, universe - 1) if universe > 1 else 1
        da = upper_banach_density(a, w, universe).value
        assert da <= upper_banach_density(s, w).value
        assert upper_banach_density(a, w + 1, universe).value <= da
        assert relative_density(a, s, w).value <= da


def test_relative_density_examples():
    assert relative_density(EVENS, EVENS, 10).value == Fraction(6, 11)
    r = relative_density(FOURS, EVENS, 10)
    assert (r.value, r.witness) == (Fraction(3, 11), (0, 11))
    assert relative_density(FOURS, EVENS, 10, tol=1).value == upper_banach_density(FOURS, 10, 100).value
    with pytest.raises(NotSubset):
        relative_density((1,), EVENS, 10)


def test_relative_density_against_oracle():
    rng = random.Random(33)
    for _ in range(30):
        s = random_intset(rng, 40, 0.6)
        if len(s) < 2:
            continue
        a = [x for x in s if rng.random() < 0.6]
        window = rng.randint(1, bound(s))
        tol = Fraction(rng.randint(0, 3), 10)
        eta = upper_banach_density(s, window).value
        best = None
        for length in range(window, bound(s) + 1):
            for u in range(bound(s) - length + 1):
                if abs(Fraction(sum(u <= x < u + length for x in s), length) - eta) <= tol:
                    cand = (Fraction(sum(u <= x < u + length for x in a), length), -u, -length)
                    best = cand if best is None or cand > best else best
        r = relative_density(a, s, window, tol)
        assert (r.value, r.witness) == (best[0], (-best[1], -best[2]))


def test_negative_tol_rejected():
    with pytest.raises(ValueError):
        relative_density((0,), (0, 1), 1, tol=-1)


# progressions --------------------------------------------------------------------

def test_find_k_ap_examples():
    assert find_k_ap((0, 2, 4, 6, 8), 5) == (0, 2)
    assert find_k_ap((1, 2, 4, 8, 9), 3) is None
    assert find_k_ap((), 3) is None
    assert find_k_ap((5, 9), 1) == (5, 1)


def test_find_k_ap_against_oracle():
    rng = random.Random(34)
    for _ in range(150):
        a = random_intset(rng, rng.randint(1, 60))
        k = rng.randint(2, 5)
        assert find_k_ap(a, k) == ap_oracle(a, k)


def test_max_ap_free_examples():
    assert max_ap_free_subset(9, 3) == (5, (0, 1, 3, 7, 8))
    assert max_ap_free_subset(4, 3)[0] == 3
    assert max_ap_free_subset(1, 3) == (1, (0,))
    with pytest.raises(TooLarge):
        max_ap_free_subset(26, 3)


def test_max_ap_free_against_enumeration():
    for n in range(0, 12):
        for k in (3, 4):
            assert max_ap_free_subset(n, k) == brute_ap_free(n, k)


def test_searches_are_consistent():
    rng = random.Random(35)
    n, k = 12, 3
    size, _ = max_ap_free_subset(n, k)
    for _ in range(100):
        a = sorted(rng.sample(range(n), rng.randint(size + 1, n)))
        assert find_k_ap(a, k) is not None


# intsets -------------------------------------------------------------------------

def test_intset_parsing():
    assert parse_intset((FIXTURES / "evens100.txt").read_text()) == EVENS
    assert parse_intset((FIXTURES / "mult4_100.json").read_text()) == FOURS
    assert parse_intset(" 3 1 3 ") == (1, 3)
    assert bound(intset([4, 2])) == 5 and bound(()) == 0
    with pytest.raises(ParseError):
        parse_intset("1 two 3")
    with pytest.raises(ParseError):
        parse_intset("[1, -2]")
