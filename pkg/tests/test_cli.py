import io
import json
import subprocess
import sys

import jsonschema
import pytest

from cfc import cli, harness

from .conftest import CORPUS


def run(*argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(list(argv), stdout=out)
    return code, out.getvalue()


def run_json(*argv, **kw):
    code, text = run(*argv, "--json", **kw)
    doc = json.loads(text)
    jsonschema.validate(doc, cli.JSON_SCHEMA)
    return code, doc


def f(name):
    return str(CORPUS / f"{name}.cfc")


@pytest.mark.parametrize("name", sorted(p.stem for p in CORPUS.glob("*.cfc")))
def test_check_corpus_json(name):
    code, doc = run_json("check", f(name))
    expected = 1 if name in ("loop_bad", "onlyint_total") else 0
    assert code == expected
    assert doc["status"] == ("ok" if expected == 0 else "error")
    assert bool(doc["diagnostics"]) == bool(expected)


def test_check_text():
    code, text = run("check", f("plus"))
    assert code == 0
    assert "idInt : Int -> Int" in text and text.rstrip().endswith("5 terms")


def test_semantic_error_location():
    code, doc = run_json("check", f("loop_bad"))
    [d] = doc["diagnostics"]
    assert (code, d["code"], d["line"], d["column"]) == (1, "FamilyInRHS", 7, 3)
    assert d["file"].endswith("loop_bad.cfc")


def test_parse_error_exit_2(monkeypatch):
    code, doc = run_json("check", "-", stdin="data Int :\n", monkeypatch=monkeypatch)
    assert code == 2 and doc["status"] == "parse_error"
    assert doc["diagnostics"][0]["code"] == "ParseError"
    assert doc["diagnostics"][0]["line"] in (1, 2)


def test_stdin(monkeypatch):
    code, text = run("check", "-", stdin="data Int : 0\nconst MkInt : Int\nterm x = MkInt\n",
                     monkeypatch=monkeypatch)
    assert code == 0 and "x : Int" in text


def test_missing_file():
    code, doc = run_json("check", "/nonexistent/x.cfc")
    assert code == 1 and doc["diagnostics"][0]["code"] == "FileError"


def test_eval():
    code, doc = run_json("eval", f("plus"), "--main", "pushed", "--trace")
    # The leftover cast is reflexive but still part of the value form.
    assert code == 0 and doc["kind"] == "coerced_value"
    assert doc["result"].startswith("MkInt |> ")
    assert [s["rule"] for s in doc["trace"]] == ["S_Push", "S_Cast", "S_Trans"]
    code, text = run("eval", f("plus"), "--main", "applied", "--trace")
    assert code == 0 and text.strip().splitlines()[-1] == "MkInt : Int"


def test_eval_errors():
    code, doc = run_json("eval", f("plus"), "--main", "nope")
    assert code == 1 and doc["diagnostics"][0]["code"] == "UnknownTerm"
    code, doc = run_json("eval", f("plus"), "--main", "applied", "--fuel", "1")
    assert code == 1 and doc["diagnostics"][0]["code"] == "FuelExhausted"


def test_normalize():
    code, doc = run_json("normalize", f("equ"), "--type", "Equ Int Bool")
    assert code == 0 and doc["normal_form"] == "False" and not doc["stuck"]
    code, text = run("normalize", f("onlyint"), "--type", "OnlyInt Bool", "--explain")
    assert code == 0
    assert text.splitlines()[0] == "OnlyInt Bool"
    assert "onlyIntAx[0]: no-match" in text
    code, doc = run_json("normalize", f("onlyint"), "--type", "OnlyInt Bool")
    assert doc["stuck"] and doc["stuck_redexes"][0]["attempts"][0]["outcome"] == "no-match"


def test_normalize_bad_type():
    code, doc = run_json("normalize", f("plus"), "--type", "Plus Z")
    assert code == 1 and doc["diagnostics"][0]["code"] == "ArityMismatch"
    code, doc = run_json("normalize", f("plus"), "--type", "(Plus")
    assert code == 2


def test_infer():
    code, doc = run_json("infer", f("collects"), "--type", "Elem c -> c -> c")
    assert code == 0 and doc["qualified"] == "Collects c => Elem c -> c -> c"
    code, text = run("infer", f("collects"), "--type", "c -> c")
    assert text.strip() == "c -> c"


def test_elaborate():
    code, text = run("elaborate", f("elaborate"))
    assert code == 0
    surface, kernel = text.split("-- kernel")
    assert "instance CG Int t => CF Int (Maybe t)" in surface
    assert "ax_F_0" in kernel
    code, doc = run_json("elaborate", f("pragma"))
    assert [w["code"] for w in doc["warnings"]] == ["UnsafeTotal"]


def test_fuzz_small():
    code, doc = run_json("fuzz", "--seed", "3", "--cases", "20", "--suite", "progress",
                         "--suite", "measure")
    assert code == 0
    assert [r["suite"] for r in doc["reports"]] == ["progress", "measure"]
    assert all(r["failed"] == 0 for r in doc["reports"])
    code, doc = run_json("fuzz", "--suite", "nope")
    assert code == 1 and doc["diagnostics"][0]["code"] == "UnknownSuite"


def test_fuzz_failure_exit_3(monkeypatch):
    def broken(name, world, cases):
        r = harness.SuiteReport(name)
        r.add(False, "forced")
        return r
    monkeypatch.setattr(harness, "run_suite", broken)
    code, doc = run_json("fuzz", "--cases", "1", "--suite", "progress")
    assert code == 3 and doc["diagnostics"][0]["code"] == "PropertyViolated"


def test_internal_error_exit_3(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("boom")
    monkeypatch.setattr(cli, "load_source", boom)
    code, doc = run_json("check", f("plus"))
    assert code == 3 and doc["status"] == "internal_error"
    assert doc["diagnostics"][0]["code"] == "InternalError"


def test_color(monkeypatch):
    class Tty(io.StringIO):
        def isatty(self):
            return True
    out = Tty()
    monkeypatch.setenv("CFC_COLOR", "1")
    cli.main(["check", f("plus")], stdout=out)
    assert "\x1b[32mok" in out.getvalue()
    out = Tty()
    monkeypatch.setenv("CFC_COLOR", "0")
    cli.main(["check", f("plus")], stdout=out)
    assert "\x1b[" not in out.getvalue()
    # Not a terminal: never colored.
    monkeypatch.setenv("CFC_COLOR", "1")
    assert "\x1b[" not in run("check", f("plus"))[1]


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "cfc.cli", "check", f("equ"), "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
