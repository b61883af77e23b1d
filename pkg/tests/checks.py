"""Property checks shared by the unit suites and the acceptance run."""

from __future__ import annotations

import dataclasses
import itertools
import random
from pathlib import Path

from stratlab.formulas import (
    AtomEq, AtomMem, ExistsIn, ForallIn, Formula, Not, UnboundedForall, eval_formula, free_variables,
    ho_instance, shift_up, BINARY,
)
from stratlab.generators import random_formula, random_label, random_num
from stratlab.labels import Label, oplus, restrict_image
from stratlab.numbers import cmp, embed
from stratlab.uflab import (
    EXHAUSTIVE_BOUND, FiniteUltrafilter, all_ultrafilters, check_coherence, is_ultrafilter,
    project_to_label, pushforward, tensor, tensor_power,
)


def quantifier_free(f: Formula) -> Formula:
    """Drop quantifiers and turn membership atoms into equalities."""
    if isinstance(f, (ForallIn, ExistsIn, UnboundedForall)):
        return quantifier_free(f.body)
    if isinstance(f, AtomMem):
        return AtomEq(f.u, f.v)
    if isinstance(f, Not):
        return Not(quantifier_free(f.body))
    if type(f) in BINARY:
        return type(f)(quantifier_free(f.left), quantifier_free(f.right))
    return f


def _bounds(f: Formula) -> dict:
    out = {}
    while isinstance(f, ForallIn):
        out[f.var] = f.a
        f = f.body
    return out


def ho_model_case(rng: random.Random) -> bool:
    """One model-level HO check on a random quantifier-free formula.

    The level-``a`` variables range over random elements of ``S_a``; the
    shifted ones range over their images under ``I_a^{r (+) a}`` plus one
    decoy, so the instance must hold with the antecedent both true and false.
    """
    f = quantifier_free(random_formula(rng, depth=3, max_index=3, variables=("u", "v", "x")))
    r = rng.randint(0, 5)
    a = random_label(rng, max_index=3, max_size=3)
    ra = oplus(r, a)
    sample = [random_num(rng, variables=a.indices, max_vars=2, max_degree=2) for _ in range(2)]
    images = [embed(x, a, ra, scales=16) for x in sample]
    inst = ho_instance(f, r, a)
    domains = {v: (sample if b == a else images + [sample[0] + 1]) for v, b in _bounds(inst).items()}
    return eval_formula(inst, {}, domains)


def shift_composes(rng: random.Random) -> bool:
    f = random_formula(rng, depth=4)
    r, s = rng.randint(0, 5), rng.randint(0, 5)
    g = shift_up(f, r)
    return shift_up(g, s) == shift_up(f, r + s) and free_variables(g) == free_variables(f)


def cmp_invariance_case(rng: random.Random) -> bool:
    a = random_label(rng, max_index=3, max_size=3)
    r = rng.randint(0, 4)
    x, y = (random_num(rng, variables=a.indices, max_vars=3, max_degree=3) for _ in range(2))
    return cmp(x, y) == cmp(embed(x, a, oplus(r, a)), embed(y, a, oplus(r, a)))


def is_law_case(rng: random.Random) -> bool:
    """IS(3) support law, IS(4) identity/inverse/composition/preservation, IS(5) coherence."""
    size = rng.randint(0, 3)
    a, b, c = (Label.of(rng.sample(range(8), size)) for _ in range(3))
    x = random_num(rng, variables=a.indices, max_vars=2, max_degree=2)
    y = random_num(rng, variables=a.indices, max_vars=2, max_degree=2)
    p, q = Label.of(rng.sample(range(5), rng.randint(0, 5))), Label.of(rng.sample(range(5), rng.randint(0, 5)))
    z = random_num(rng, variables=range(5), max_vars=2, max_degree=2)
    sx = x.support()
    sub = Label.of(set(sx) | set(rng.sample(a.indices, rng.randint(0, size))))
    ex, ey = embed(x, a, b), embed(y, a, b)
    checks = [
        (z.support().issubset(p) and z.support().issubset(q)) == z.support().issubset(p & q),
        embed(x, a, a) == x,
        embed(ex, b, a) == x,
        embed(ex, b, c) == embed(x, a, c),
        cmp(x, y) == cmp(ex, ey),
        embed(x + y, a, b) == ex + ey,
        embed(x - y, a, b) == ex - ey,
        embed(x * y, a, b) == ex * ey,
        embed(x, a, b).support().issubset(b),
        embed(x, a, b) == embed(x, sub, restrict_image(a, b, sub)),
    ]
    if not y.is_zero():
        checks.append(embed(x / y, a, b) == ex / ey)
    return all(checks)


def construction_sweep() -> int:
    """Principal laws and coherence for every ultrafilter in range.

    Pushforward covers every map between sets of size at most 4; tensor and
    tensor powers cover |I|, |J| <= 3; coherence covers every a ⊆ b ⊆ {0,1,2}.
    Where the ground set allows it the explicit family is rebuilt by full
    subset enumeration and compared with the kernel construction.
    Returns the number of checks made.
    """
    def same(x, y):
        assert x == y, (x, y)

    def principal(v, point):
        return v == FiniteUltrafilter.principal(v.ground, point)

    checks = 0
    for size in range(1, 5):
        ground = range(size)
        for u in all_ultrafilters(ground):
            for target in range(1, 5):
                for values in itertools.product(range(target), repeat=size):
                    v = pushforward(dict(zip(ground, values)), u, target=range(target))
                    same(v, pushforward(dict(zip(ground, values)), u, target=range(target),
                                        exhaustive=True))
                    assert is_ultrafilter(v.family(), range(target))
                    assert principal(v, values[u.point])
                    checks += 1
    for si, sj in itertools.product(range(1, 4), repeat=2):
        for u, v in itertools.product(all_ultrafilters(range(si)), all_ultrafilters(range(sj))):
            t = tensor(u, v)
            same(t, tensor(u, v, exhaustive=True))
            assert principal(t, (u.point, v.point))
            checks += 1
    for size in range(1, 4):
        for u in all_ultrafilters(range(size)):
            for n in range(4):
                t = tensor_power(u, n)
                if 2 ** (size ** n) <= EXHAUSTIVE_BOUND:
                    same(t, tensor_power(u, n, exhaustive=True))
                assert principal(t, (u.point,) * n)
                checks += 1
            for b in (Label.of(s) for k in range(4) for s in itertools.combinations(range(3), k)):
                pb = project_to_label(u, b, len(b))
                assert principal(pb, tuple((i, u.point) for i in b))
                for a in (Label.of(s) for k in range(len(b) + 1)
                          for s in itertools.combinations(b.indices, k)):
                    assert check_coherence(u, a, b)
                    if 2 ** (size ** len(b)) <= EXHAUSTIVE_BOUND:
                        assert check_coherence(u, a, b, exhaustive=True)
                    checks += 1
    return checks


# CLI conformance -----------------------------------------------------------------------

FIXTURES = Path(__file__).parent / "fixtures"


def cli_cases():
    """``(argv, expected result, expected witness)`` computed by direct library calls."""
    from fractions import Fraction

    from stratlab import combinatorics as comb
    from stratlab import formulas as fm
    from stratlab import numbers as nb

    def fx(name):
        return str(FIXTURES / name)

    def intset(name):
        return comb.parse_intset((FIXTURES / name).read_text())

    F, N = fm.parse_formula, nb.parse_number
    c = lambda name: comb.Coloring.from_json((FIXTURES / name).read_text())  # noqa: E731
    evens, fours, sparse = intset("evens100.txt"), intset("mult4_100.json"), intset("sparse.txt")
    d = comb.upper_banach_density(evens, 10)
    rd = comb.relative_density(fours, evens, 10, Fraction(0))
    greedy = comb.greedy_homogeneous(c("explicit5.json"))
    cases = [
        (["shift", "--r", "1", "x in S{0}"], fm.render(fm.shift_up(F("x in S{0}"), 1)), None),
        (["shift", "--r", "2", "I{0}{1}(x) = y"], fm.render(fm.shift_up(F("I{0}{1}(x) = y"), 2)), None),
        (["ho", "--r", "1", "--a", "{0}", "v in S{0}"], fm.render(fm.ho_instance(F("v in S{0}"), 1, {0})), None),
        (["gt", "--a", "{0}", "v in v1"], fm.render(fm.gt_instance(F("v in v1"), {0})), None),
        (["eval", "E y in S{0}. y = x", "--env", '{"x": "w0"}', "--domains", '{"y": ["0", "1", "w0"]}'],
         True, None),
        (["num", "(w1*w0)/w1"], nb.render_number(N("(w1*w0)/w1")), {"support": "{0}"}),
        (["num", "2 + 3/w0 + w1^-1"], nb.render_number(N("2 + 3/w0 + w1^-1")), {"support": "{0,1}"}),
        (["cmp", "w1", "w0^3 + 5"], nb.CMP_NAMES[nb.cmp(N("w1"), N("w0^3 + 5"))], None),
        (["cmp", "1/w0", "1/1000000"], nb.CMP_NAMES[nb.cmp(N("1/w0"), N("1/1000000"))], None),
        (["shadow", "--r", "1", "2 + 3/w0 + 1/w1"], nb.render_number(nb.shadow(N("2 + 3/w0 + 1/w1"), 1)), None),
        (["classify", "--r", "1", "w1/w0"], dataclasses.asdict(nb.classify(N("w1/w0"), 1)), None),
        (["level", "--a", "{0,2}", "w0 + 1/w2"], nb.in_level(N("w0 + 1/w2"), {0, 2}), {"support": "{0,2}"}),
        (["embed", "--a", "{0}", "--b", "{1}", "w0 + 1/2"], nb.render_number(nb.embed(N("w0 + 1/2"), {0}, {1})),
         None),
        (["deriv", "--f", "x^2", "--at", "3"], nb.render_number(nb.derivative("x^2", 3)), None),
        (["deriv", "--f", "x^3", "--at", "w0"], nb.render_number(nb.derivative("x^3", N("w0"))), None),
        (["ramsey", "--coloring", fx("parity6.json"), "--h", "3"],
         list(comb.find_homogeneous(c("parity6.json"), 3)), None),
        (["ramsey", "--coloring", fx("pentagon5.json"), "--h", "3"], None, None),
        (["ramsey", "--coloring", fx("explicit5.json"), "--greedy"], list(greedy.homogeneous_set),
         {"a": list(greedy.a), "sentinels": list(greedy.sentinels), "color": greedy.color}),
        (["replay", "--n", "3", "--p", "1"], comb.replay_side_conditions(3, 1).passed,
         comb.replay_side_conditions(3, 1).to_json()["clauses"]),
        (["density", "--window", "10", "--set", fx("evens100.txt")], str(d.value), list(d.witness)),
        (["rel-density", "--window", "10", "--set", fx("mult4_100.json"), "--ambient", fx("evens100.txt")],
         str(rd.value), list(rd.witness)),
        (["ap", "--set", fx("sparse.txt"), "--k", "3"], comb.find_k_ap(sparse, 3), None),
        (["ap", "--set", fx("evens100.txt"), "--k", "5"], list(comb.find_k_ap(evens, 5)), None),
        (["ap-free", "--n", "9", "--k", "3"], comb.max_ap_free_subset(9, 3)[0],
         list(comb.max_ap_free_subset(9, 3)[1])),
    ]
    return cases


def cli_error_cases():
    """``(argv, exit code, error kind)``."""
    return [
        (["shadow", "--r", "0", "w0"], 1, "Unlimited"),
        (["deriv", "--f", "1/x", "--at", "0"], 1, "PoleAtPoint"),
        (["embed", "--a", "{0}", "--b", "{1,2}", "w0"], 1, "SizeMismatch"),
        (["embed", "--a", "{0}", "--b", "{1}", "w1"], 1, "NotInLevel"),
        (["num", "1/(w0 - w0)"], 1, "DivisionByZero"),
        (["gt", "--a", "{0}", "v in S{0}"], 1, "NotPureInFormula"),
        (["parse", "A x . x = x"], 1, "AdmissibilityError"),
        (["ap-free", "--n", "30", "--k", "3"], 1, "TooLarge"),
        (["density", "--window", "500", "--set", str(FIXTURES / "evens100.txt")], 1, "WindowTooLarge"),
        (["replay", "--n", "7", "--p", "2", "--scales", "7"], 1, "ScaleExhausted"),
        (["parse", "x =="], 2, "ParseError"),
        (["num", "2 +"], 2, "ParseError"),
        (["bogus"], 2, "UsageError"),
        (["shift", "x = y"], 2, "UsageError"),
        (["density", "--window", "3", "--set", "/nonexistent/file"], 2, "UsageError"),
    ]
