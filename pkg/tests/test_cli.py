import json
import subprocess
import sys

import pytest

from checks import FIXTURES, cli_cases, cli_error_cases
from stratlab import formulas as fm
from stratlab.cli import main, run

CASES = cli_cases()
ERRORS = cli_error_cases()


def corpus_lines():
    return [ln.strip() for ln in (FIXTURES / "formulas.txt").read_text(encoding="utf-8").splitlines()
            if ln.strip() and not ln.startswith("#")]


@pytest.mark.parametrize("argv, result, witness", CASES, ids=[" ".join(c[0][:3]) for c in CASES])
def test_cli_matches_library(argv, result, witness):
    res = run(argv)
    assert res.exit_code == 0 and res.status == "ok"
    assert (res.result, res.witness) == (result, witness)


@pytest.mark.parametrize("argv, code, kind", ERRORS, ids=[" ".join(e[0][:3]) for e in ERRORS])
def test_cli_errors(argv, code, kind):
    res = run(argv)
    assert (res.exit_code, res.status, res.error["kind"]) == (code, "error", kind)


def test_parse_round_trip_on_corpus():
    for line in corpus_lines():
        res = run(["parse", line])
        assert res.result == fm.render(fm.parse_formula(line)) == line


def test_json_schema(capsys):
    for argv, result, witness in CASES[:6] + [(["shadow", "--r", "0", "w0"], None, None)]:
        code = main(argv + ["--json"])
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) <= {"command", "status", "result", "witness", "error", "diagnostics"}
        assert doc["command"] == argv[0] and doc["status"] in ("ok", "error")
        if doc["status"] == "ok":
            assert code == 0 and (doc["result"], doc["witness"]) == (result, witness)
        else:
            assert code == 1 and set(doc["error"]) == {"kind", "message"}


def test_text_output(capsys):
    assert main(["density", "--window", "10", "--set", str(FIXTURES / "evens100.txt")]) == 0
    assert capsys.readouterr().out == "6/11\nwitness: (0, 11)\n"
    assert main(["shift", "--r", "1", "x in S{0}"]) == 0
    assert capsys.readouterr().out == "x in S{0,1}\n"
    assert main(["shadow", "--r", "0", "w0"]) == 1
    assert "Unlimited" in capsys.readouterr().err


def test_global_flags_anywhere():
    assert run(["--scales", "3", "num", "w2"]).exit_code == 0
    assert run(["num", "w3", "--scales", "3"]).exit_code == 2
    assert run(["--json", "deriv", "--f", "x^2", "--at", "w6", "--scales", "7"]).error["kind"] == "ScaleExhausted"


def test_seed_is_deterministic():
    a = run(["replay", "--n", "4", "--p", "2", "--seed", "5"])
    b = run(["replay", "--n", "4", "--p", "2", "--seed", "5"])
    assert a.to_json() == b.to_json() and a.result is True


def test_uf_commands():
    res = run(["uf-check", "--file", str(FIXTURES / "ultrafilter.json")])
    assert res.result is True and res.witness == {"point": 2}
    res = run(["uf-check", "--size", "3", "--exhaustive", "--coherence"])
    assert res.result is True
    assert res.witness["coherence_checks"] > res.witness["enumerated_checks"] > 0
    res = run(["uf-tensor", "--size", "3", "--point", "1", "--power", "2"])
    assert res.result == {"ground_size": 9, "point": [1, 1]}
    res = run(["uf-tensor", "--size", "2", "--point", "0", "--label", "{1,3}"])
    assert res.result["point"] == [[1, 0], [3, 0]]
    res = run(["uf-tensor", "--size", "2", "--point", "1", "--with-size", "3", "--with-point", "2",
               "--exhaustive"])
    assert res.result == {"ground_size": 6, "point": [1, 2]}
    res = run(["uf-los", "--formula", "E y1. R(x1,y1)", "--structure", str(FIXTURES / "structure.json"),
               "--size", "2", "--functions", "[[0, 1]]"])
    assert res.result is True
    res = run(["uf-los", "--max-index", "2", "--max-nodes", "2"])
    assert res.result is True and res.witness["failures"] == []


def test_ramsey_sweep_command():
    # K5 has exactly 12 two-colorings without a monochromatic triangle
    res = run(["ramsey", "--all", "5", "--h", "3"])
    assert res.result is False and res.witness == {"colorings": 1024, "with_homogeneous": 1012}


def test_subprocess_exit_codes():
    def call(*argv):
        return subprocess.run([sys.executable, "-m", "stratlab", *argv], capture_output=True, text=True)

    ok = call("deriv", "--f", "x^2", "--at", "3")
    assert (ok.returncode, ok.stdout) == (0, "6\n")
    bad = call("shadow", "--r", "0", "w0", "--json")
    assert bad.returncode == 1 and json.loads(bad.stdout)["error"]["kind"] == "Unlimited"
    assert call("parse", "x ==").returncode == 2
    assert call("no-such-command").returncode == 2
