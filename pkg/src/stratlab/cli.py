"""Command-line front end: ``stratlab <command> ...``.

Exit status is 0 on success, 1 for a domain error and 2 for parse or usage
errors.  ``--json`` prints one document of the form
``{"command", "status", "result", "witness", "error"?}``.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from . import combinatorics as comb
from . import formulas as fm
from . import numbers as nb
from . import uflab
from .errors import USAGE_ERRORS, ParseError, StratError
from .labels import DEFAULT_SCALES, Label, parse_label


@dataclass
class CommandResult:
    command: str
    status: str = "ok"
    result: Any = None
    witness: Any = None
    error: Optional[dict] = None
    diagnostics: list = field(default_factory=list)
    exit_code: int = 0

    def to_json(self) -> dict:
        doc = {"command": self.command, "status": self.status,
               "result": self.result, "witness": self.witness}
        if self.error is not None:
            doc["error"] = self.error
        if self.diagnostics:
            doc["diagnostics"] = self.diagnostics
        return doc


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonify(value):
    if isinstance(value, (nb.Num, Label, fm.Formula, Fraction)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value, key=repr) if isinstance(value, (set, frozenset)) else value
        return [_jsonify(v) for v in items]
    return value


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.pos) from None


def _value(obj, scales):
    """Evaluation values: strings are numbers, lists are finite sets."""
    if isinstance(obj, list):
        return frozenset(_value(v, scales) for v in obj)
    return nb.parse_number(str(obj), scales)


# command handlers: each returns (result, witness) -------------------------------------

def cmd_parse(args):
    f = fm.parse_formula(args.formula, allow_unbounded=args.gt)
    return fm.render(f), {"free": sorted(fm.free_variables(f)), "admissible": fm.is_admissible(f)}


def cmd_shift(args):
    return fm.render(fm.shift_up(fm.parse_formula(args.formula), args.r)), None


def cmd_ho(args):
    f = fm.parse_formula(args.formula)
    return fm.render(fm.ho_instance(f, args.r, parse_label(args.a))), None


def cmd_gt(args):
    f = fm.parse_formula(args.formula)
    return fm.render(fm.gt_instance(f, parse_label(args.a), args.var)), None


def cmd_eval(args):
    f = fm.parse_formula(args.formula, allow_unbounded=True)
    env = {k: _value(v, args.scales) for k, v in json.loads(args.env).items()}
    domains = {k: [_value(v, args.scales) for v in vs] for k, vs in json.loads(args.domains).items()}
    return fm.eval_formula(f, env, domains), None


def cmd_num(args):
    x = nb.parse_number(args.expr, args.scales)
    return nb.render_number(x), {"support": str(x.support())}


def cmd_cmp(args):
    x, y = nb.parse_number(args.x, args.scales), nb.parse_number(args.y, args.scales)
    return nb.CMP_NAMES[nb.cmp(x, y)], None


def cmd_shadow(args):
    return nb.render_number(nb.shadow(nb.parse_number(args.expr, args.scales), args.r, args.scales)), None


def cmd_classify(args):
    c = nb.classify(nb.parse_number(args.expr, args.scales), args.r, args.scales)
    return {"limited": c.limited, "infinitesimal": c.infinitesimal}, None


def cmd_level(args):
    x = nb.parse_number(args.expr, args.scales)
    return nb.in_level(x, parse_label(args.a)), {"support": str(x.support())}


def cmd_embed(args):
    x = nb.parse_number(args.expr, args.scales)
    return nb.render_number(nb.embed(x, parse_label(args.a), parse_label(args.b), args.scales)), None


def cmd_deriv(args):
    f = nb.parse_function(args.f, args.scales)
    return nb.render_number(nb.derivative(f, nb.parse_number(args.at, args.scales), args.scales)), None


def cmd_uf_check(args):
    if args.file:
        data = _read_json(args.file)
        ground = [uflab._unjson(p) for p in data["ground"]]
        family = [[uflab._unjson(p) for p in s] for s in data["family"]]
        ok = uflab.is_ultrafilter(family, ground)
        witness = None
        if ok:
            witness = {"point": uflab._jsonable(uflab.FiniteUltrafilter.from_family(family, ground).point)}
        return ok, witness
    ground = list(range(args.size))
    found = uflab.all_ultrafilters(ground, exhaustive=args.exhaustive)
    principal = uflab.all_ultrafilters(ground)
    report = {"ultrafilters": len(found), "agrees_with_principal": found == principal}
    if args.coherence:
        checks, enumerated = [], 0
        for u in principal:
            for size in range(4):
                for b in _labels_within(3, size):
                    # full subset enumeration only where I^b is small enough
                    full = args.exhaustive and 2 ** (len(ground) ** len(b)) <= uflab.EXHAUSTIVE_BOUND
                    for a in _sublabels(b):
                        checks.append(uflab.check_coherence(u, a, b, exhaustive=full))
                        enumerated += full
        report["coherence_checks"] = len(checks)
        report["enumerated_checks"] = enumerated
        report["coherence"] = all(checks)
    ok = report["agrees_with_principal"] and report.get("coherence", True)
    return ok, report


def _labels_within(top: int, size: int):
    return [Label(c) for c in itertools.combinations(range(top), size)]


def _sublabels(b: Label):
    return [Label(c) for r in range(len(b) + 1) for c in itertools.combinations(b.indices, r)]


def cmd_uf_tensor(args):
    u = uflab.FiniteUltrafilter.principal(range(args.size), args.point)
    if args.label is not None:
        label = parse_label(args.label)
        out = uflab.project_to_label(u, label, len(label), exhaustive=args.exhaustive)
    elif args.power is not None:
        out = uflab.tensor_power(u, args.power, exhaustive=args.exhaustive)
    else:
        v = uflab.FiniteUltrafilter.principal(range(args.with_size), args.with_point)
        out = uflab.tensor(u, v, exhaustive=args.exhaustive)
    return {"ground_size": len(out.ground), "point": uflab._jsonable(out.point)}, \
        {"kernel": [uflab._jsonable(p) for p in sorted(out.kernel)]}


def cmd_uf_los(args):
    if args.formula is None:
        report = uflab.los_sweep(args.max_index, args.max_nodes)
        return report.passed, {"cases": report.cases, "formulas": report.formulas,
                               "failures": report.failures[:10]}
    m = uflab.FiniteStructure.from_json(_read_json(args.structure))
    u = uflab.FiniteUltrafilter.principal(range(args.size), args.point)
    phi = uflab.parse_los_formula(args.formula)
    fs = [tuple(f) for f in json.loads(args.functions)]
    return uflab.los_check(phi, fs, m, u), {"formula": str(phi)}


def cmd_ramsey(args):
    if args.all is not None:
        total = hits = 0
        for c in comb.all_colorings(args.all, 2, 2):
            total += 1
            hits += comb.find_homogeneous(c, args.h) is not None
        return hits == total, {"colorings": total, "with_homogeneous": hits}
    c = comb.Coloring.from_json(_read_json(args.coloring))
    if args.greedy:
        g = comb.greedy_homogeneous(c)
        return list(g.homogeneous_set), {"a": list(g.a), "sentinels": list(g.sentinels), "color": g.color}
    h = comb.find_homogeneous(c, args.h)
    return (list(h) if h is not None else None), None


def cmd_replay(args):
    report = comb.replay_side_conditions(args.n, args.p, args.scales, seed=args.seed)
    return report.passed, report.to_json()["clauses"]


def _intset(path):
    return comb.parse_intset(_read(path))


def cmd_density(args):
    r = comb.upper_banach_density(_intset(args.set), args.window, args.universe)
    return str(r.value), (list(r.witness) if r.witness else None)


def cmd_rel_density(args):
    r = comb.relative_density(_intset(args.set), _intset(args.ambient), args.window,
                              Fraction(args.tol), args.universe)
    return str(r.value), (list(r.witness) if r.witness else None)


def cmd_ap(args):
    r = comb.find_k_ap(_intset(args.set), args.k)
    return (list(r) if r else None), None


def cmd_ap_free(args):
    size, witness = comb.max_ap_free_subset(args.n, args.k)
    return size, list(witness)


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool):
        # repeated on each subcommand; there they must not override earlier values
        flags = _Parser(add_help=False)
        flags.add_argument("--json", action="store_true", help="emit a single JSON document",
                           **({"default": argparse.SUPPRESS} if suppress else {}))
        flags.add_argument("--seed", type=int, help="seed for sampled checks",
                           default=argparse.SUPPRESS if suppress else 0)
        flags.add_argument("--scales", type=int, help="number of scales L",
                           default=argparse.SUPPRESS if suppress else DEFAULT_SCALES)
        return flags

    common = global_flags(True)
    parser = _Parser(prog="stratlab", description=__doc__.splitlines()[0], parents=[global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, helptext):
        p = sub.add_parser(name, help=helptext, parents=[common])
        p.set_defaults(handler=fn)
        return p

    p = add("parse", cmd_parse, "parse and re-render a formula")
    p.add_argument("formula")
    p.add_argument("--gt", action="store_true", help="allow the unbounded quantifier Aall")
    p = add("shift", cmd_shift, "level shift of a formula")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("formula")
    p = add("ho", cmd_ho, "homogeneous shift instance")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("formula")
    p = add("gt", cmd_gt, "generalized transfer instance")
    p.add_argument("--a", required=True)
    p.add_argument("--var")
    p.add_argument("formula")
    p = add("eval", cmd_eval, "evaluate a formula over finite domains")
    p.add_argument("formula")
    p.add_argument("--env", default="{}", help="JSON object: name -> number or list")
    p.add_argument("--domains", default="{}", help="JSON object: name -> list of values")

    p = add("num", cmd_num, "canonical form of a number")
    p.add_argument("expr")
    p = add("cmp", cmd_cmp, "compare two numbers")
    p.add_argument("x")
    p.add_argument("y")
    for name, fn, text in (("shadow", cmd_shadow, "shadow relative to level r"),
                           ("classify", cmd_classify, "limited/infinitesimal relative to level r")):
        p = add(name, fn, text)
        p.add_argument("--r", type=int, required=True)
        p.add_argument("expr")
    p = add("level", cmd_level, "test membership in a level")
    p.add_argument("--a", required=True)
    p.add_argument("expr")
    p = add("embed", cmd_embed, "embedding between levels")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("expr")
    p = add("deriv", cmd_deriv, "derivative as a shadow of a difference quotient")
    p.add_argument("--f", required=True)
    p.add_argument("--at", required=True)

    p = add("uf-check", cmd_uf_check, "ultrafilter checks")
    p.add_argument("--file", help="JSON {ground, family} to test")
    p.add_argument("--size", type=int, default=3)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--coherence", action="store_true")
    p = add("uf-tensor", cmd_uf_tensor, "tensor products, powers and label projections")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--point", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--power", type=int)
    g.add_argument("--label")
    g.add_argument("--with-size", type=int)
    p.add_argument("--with-point", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    p = add("uf-los", cmd_uf_los, "Łoś checks (exhaustive sweep by default)")
    p.add_argument("--max-index", type=int, default=3)
    p.add_argument("--max-nodes", type=int, default=3)
    p.add_argument("--formula")
    p.add_argument("--structure", help="JSON {universe, relations}")
    p.add_argument("--size", type=int, default=2)
    p.add_argument("--point", type=int, default=0)
    p.add_argument("--functions", default="[]", help="JSON list of functions I -> M")

    p = add("ramsey", cmd_ramsey, "homogeneous sets")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--coloring", help="JSON coloring file")
    src.add_argument("--all", type=int, metavar="N", help="every 2-coloring of pairs of [N]")
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--greedy", action="store_true")
    p = add("replay", cmd_replay, "replay the embedding side conditions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p = add("density", cmd_density, "upper Banach density over finite windows")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--universe", type=int)
    p = add("rel-density", cmd_rel_density, "density relative to an ambient set")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--ambient", required=True)
    p.add_argument("--tol", default="0")
    p.add_argument("--universe", type=int)
    p = add("ap", cmd_ap, "least k-term arithmetic progression")
    p.add_argument("--set", required=True)
    p.add_argument("--k", type=int, required=True)
    p = add("ap-free", cmd_ap_free, "largest k-AP-free subset of [0, n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    return parser


def run(argv: Sequence[str]) -> CommandResult:
    argv = list(argv)
    command = next((a for a in argv if not a.startswith("-")), "")
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return CommandResult(command, "error", error={"kind": "UsageError", "message": str(exc)},
                             exit_code=2)
    try:
        result, witness = args.handler(args)
    except StratError as exc:
        code = 2 if isinstance(exc, USAGE_ERRORS) else 1
        return CommandResult(args.command, "error", error={"kind": exc.kind, "message": str(exc)},
                             exit_code=code)
    except (UsageError, ValueError, json.JSONDecodeError, KeyError) as exc:
        return CommandResult(args.command, "error",
                             error={"kind": "UsageError", "message": str(exc)}, exit_code=2)
    return CommandResult(args.command, result=_jsonify(result), witness=_jsonify(witness))


def _text(res: CommandResult) -> str:
    if res.status == "error":
        return f"error: {res.error['kind']}: {res.error['message']}"
    result = res.result
    if isinstance(result, bool):
        out = "true" if result else "false"
    elif result is None:
        out = "none"
    elif isinstance(result, (dict, list)):
        out = json.dumps(result)
    else:
        out = str(result)
    if res.witness is not None:
        w = res.witness
        shown = f"({', '.join(map(str, w))})" if isinstance(w, list) else json.dumps(w)
        out += f"\nwitness: {shown}"
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    res = run(argv)
    if "--json" in argv:
        print(json.dumps(res.to_json()))
    else:
        print(_text(res), file=sys.stderr if res.status == "error" else sys.stdout)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
