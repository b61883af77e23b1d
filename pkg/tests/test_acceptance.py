"""The twelve acceptance criteria, each at its stated size and time budget.

Every test records one PASS/FAIL line; the lines are repeated in the
terminal summary.  Run ``pytest tests/test_acceptance.py -v`` or execute
this file directly.
"""

import random
import time

from checks import (
    FIXTURES, cli_cases, cli_error_cases, cmp_invariance_case, ho_model_case, is_law_case,
    construction_sweep, shift_composes,
)
from oracles import ap_oracle, cmp_by_substitution, density_oracle, formal_derivative_at, spec_substitution_cmp
from stratlab import formulas as fm
from stratlab.cli import run
from stratlab.combinatorics import (
    Coloring, all_colorings, bound, find_homogeneous, find_k_ap, max_ap_free_subset,
    replay_side_conditions, upper_banach_density,
)
from stratlab.generators import (
    random_intset, random_num, random_ratfunc, random_unlimited_positive,
)
from stratlab.numbers import classify, in_level, shadow, w
from stratlab.uflab import los_sweep


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_01_is_laws(criterion):
    rng = random.Random(1001)
    with Timer() as t:
        passes = sum(is_law_case(rng) for _ in range(1000))
    ok = passes == 1000 and t.seconds < 5
    criterion(1, "IS-law suite", ok, f"{passes}/1000 exact, {t.seconds:.2f}s < 5s")
    assert ok


def test_02_ordered_field(criterion):
    rng = random.Random(1002)
    xs = [random_num(rng, variables=(0, 1, 2), max_vars=3, max_degree=4, height=9) for _ in range(1000)]
    laws = order = 0
    for x, y, z in zip(xs, xs[1:] + xs[:1], xs[2:] + xs[:2]):
        laws += ((x + y) + z == x + (y + z) and x + y == y + x and (x * y) * z == x * (y * z)
                 and x * y == y * x and x * (y + z) == x * y + x * z and x + (-x) == 0
                 and (x.is_zero() or x * x.inverse() == 1))
        order += ([x < y, x == y, x > y].count(True) == 1
                  and (not (x < y and y < z) or x < z)
                  and (not (x > 0 and y > 0) or (x + y > 0 and x * y > 0)))
    pairs = list(zip(xs, xs[1:] + xs[:1]))
    literal = [(x, y) for x, y in pairs if (x > y) - (x < y) != spec_substitution_cmp(x, y)]
    sound = sum((x > y) - (x < y) == cmp_by_substitution(x, y) for x, y in pairs)
    ok = laws == order == 1000 and not literal
    criterion(2, "ordered-field suite", ok,
              f"field laws {laws}/1000, order laws {order}/1000, "
              f"fixed substitution oracle disagrees on {len(literal)}/1000, "
              f"degree-adapted substitution oracle agrees on {sound}/1000")
    # the fixed substitution makes w1 = w0^3 exactly, so it cannot separate the scales:
    # cmp(w1, w0^3 + 5) is 'greater' by definition but the substitution says 'less'
    assert spec_substitution_cmp(w(1), w(0) ** 3 + 5) == -1
    assert laws == order == sound == 1000
    assert not literal, f"first disagreement: {literal[0][0]}  vs  {literal[0][1]}"


def test_03_end_extension(criterion):
    rng = random.Random(1003)
    xs = []
    for _ in range(500):
        n = rng.randint(1, 4)
        xs.append((n, random_unlimited_positive(rng, n, 6)))
    ys = {n: [random_num(rng, variables=range(n), max_vars=3, max_degree=4) for _ in range(500)]
          for n in range(1, 5)}
    assert all(not classify(x, n).limited and min(x.support()) == n and x > 0 for n, x in xs)
    cases = [x > y for n, x in xs for y in ys[n]]
    ok = all(cases)
    criterion(3, "End Extension", ok, f"{sum(cases)}/{len(cases)} comparisons x > y")
    assert ok


def test_04_shadows(criterion):
    rng = random.Random(1004)
    cases = failures = 0
    while cases < 500:
        r = rng.randint(0, 3)
        x, y = random_num(rng), random_num(rng)
        if not (classify(x, r).limited and classify(y, r).limited):
            continue
        cases += 1
        sx, sy = shadow(x, r), shadow(y, r)
        d = x - sx
        s = random_num(rng, variables=range(r))
        good = (shadow(x + y, r) == sx + sy and shadow(x * y, r) == sx * sy
                and in_level(sx, range(r)) and (d.is_zero() or classify(d, r).infinitesimal)
                and shadow(s, r) == s)
        failures += not good
    ok = failures == 0
    criterion(4, "shadow suite", ok, f"{cases - failures}/{cases} r-limited pairs")
    assert ok


def test_05_shift_and_ho(criterion):
    rng = random.Random(1005)
    shifts = sum(shift_composes(rng) for _ in range(500))
    ho = sum(ho_model_case(rng) for _ in range(500))
    inv = sum(cmp_invariance_case(rng) for _ in range(500))
    ok = shifts == ho == inv == 500
    criterion(5, "shift/HO suite", ok,
              f"shift composition {shifts}/500, HO instances {ho}/500, cmp invariance {inv}/500")
    assert ok


def test_06_los_brute_force(criterion):
    with Timer() as t:
        report = los_sweep(max_index=3, max_nodes=3)
    ok = report.passed and t.seconds < 10
    criterion(6, "Łoś brute force", ok,
              f"{report.formulas} formulas, {report.cases:,} cases, "
              f"{len(report.failures)} failures, {t.seconds:.2f}s < 10s")
    assert ok


def test_07_ultrafilter_constructions(criterion):
    with Timer() as t:
        checks = construction_sweep()
    ok = t.seconds < 10
    criterion(7, "ultrafilter construction laws", ok, f"{checks} checks, {t.seconds:.2f}s < 10s")
    assert ok


def test_08_ramsey(criterion):
    with Timer() as t:
        colorings = hits = 0
        for c in all_colorings(6):
            colorings += 1
            hits += find_homogeneous(c, 3) is not None
        pentagon = find_homogeneous(Coloring.generated("pentagon", 2, 5), 3)
    ok = colorings == hits == 32768 and pentagon is None and t.seconds < 10
    criterion(8, "Ramsey R(3,3) = 6", ok,
              f"{hits}/{colorings} colorings of [6]^2 have a triple, pentagon has none, "
              f"{t.seconds:.2f}s < 10s")
    assert ok


def test_09_replay(criterion):
    with Timer() as t:
        reports = [replay_side_conditions(n, p) for n in range(2, 7) for p in range(1, n)]
    passed = sum(r.passed for r in reports)
    ok = passed == len(reports) and t.seconds < 1
    criterion(9, "embedding replay", ok, f"{passed}/{len(reports)} (n, p) pairs, {t.seconds:.2f}s < 1s")
    assert ok


def test_10_density_and_ap(criterion):
    rng = random.Random(1010)
    with Timer() as t:
        density = ap = 0
        for _ in range(200):
            a = random_intset(rng, rng.randint(1, 256))
            if not a:
                a = [rng.randrange(256)]
            window = rng.randint(1, bound(a))
            value, u, length = density_oracle(a, window, bound(a))
            d = upper_banach_density(a, window)
            density += (d.value, d.witness) == (value, (u, length))
            k = rng.randint(1, 6)
            ap += find_k_ap(a, k) == ap_oracle(a, k)
        extremal = (max_ap_free_subset(9, 3)[0], max_ap_free_subset(4, 3)[0])
    ok = density == ap == 200 and extremal == (5, 3) and t.seconds < 30
    criterion(10, "density/AP", ok,
              f"density {density}/200, k-AP {ap}/200, r3(9) = {extremal[0]}, r3(4) = {extremal[1]}, "
              f"{t.seconds:.2f}s < 30s")
    assert ok


def test_11_derivative(criterion):
    rng = random.Random(1011)
    from stratlab.numbers import derivative
    cases = []
    while len(cases) < 50:
        f = random_ratfunc(rng, variables=(0, 1))
        a = w(0) if len(cases) % 5 == 0 else random_num(rng, variables=(0,), max_vars=1, max_degree=2,
                                                           zero_rate=0.2)
        if not f.is_pole(a):
            cases.append((f, a))
    with Timer() as t:
        values = [derivative(f, a) for f, a in cases]
    agree = sum(v == formal_derivative_at(f, a) for v, (f, a) in zip(values, cases))
    ok = agree == 50 and t.seconds < 5
    criterion(11, "derivative", ok, f"{agree}/50 equal the formal derivative, {t.seconds:.2f}s < 5s")
    assert ok


def test_12_cli(criterion):
    lines = [ln.strip() for ln in (FIXTURES / "formulas.txt").read_text(encoding="utf-8").splitlines()
             if ln.strip() and not ln.startswith("#")]
    round_trip = sum(run(["parse", ln]).result == fm.render(fm.parse_formula(ln)) == ln for ln in lines)
    cases = cli_cases()
    matches = sum(run(argv).to_json() == {"command": argv[0], "status": "ok", "result": res, "witness": wit}
                  for argv, res, wit in cases)
    errors = cli_error_cases()
    codes = sum((run(argv).exit_code, run(argv).error["kind"]) == (code, kind) for argv, code, kind in errors)
    ok = round_trip == len(lines) >= 30 and matches == len(cases) and codes == len(errors)
    criterion(12, "CLI conformance", ok,
              f"round trip {round_trip}/{len(lines)}, library agreement {matches}/{len(cases)}, "
              f"exit codes {codes}/{len(errors)}")
    assert ok


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
