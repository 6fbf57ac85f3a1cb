"""Command-line driver: ``cfc check | eval | normalize | infer | elaborate | fuzz``.

Exit status: 0 success, 1 semantic error, 2 parse error, 3 internal
invariant violation (a stuck well-typed term, a failing fuzz suite, or an
unexpected exception).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from typing import Optional

from . import harness
from .diagnostics import CheckError, Diagnostic
from .evaluator import DEFAULT_FUEL, CoercedValue, Evaluator, FuelExhausted, Stuck, Value
from .module import Module, load_source
from .parser import ParseError, parse_type
from .printer import show_decl, show_expr, show_pred, show_type
from .rewrite import Rewriter
from .surface import ordered_ftv
from .syntax import Context, TyBind, find_redexes
from .typecheck import check_pretype

EXIT_OK, EXIT_SEMANTIC, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3

# Every ``--json`` document has this shape; command-specific fields are added
# alongside ``status``, ``command`` and ``diagnostics``.
JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["status", "command", "diagnostics"],
    "properties": {
        "status": {"enum": ["ok", "error", "parse_error", "internal_error"]},
        "command": {"enum": ["check", "eval", "normalize", "infer", "elaborate", "fuzz"]},
        "diagnostics": {"type": "array", "items": {"$ref": "#/$defs/diagnostic"}},
        "warnings": {"type": "array", "items": {"$ref": "#/$defs/diagnostic"}},
        "file": {"type": "string"},
    },
    "$defs": {
        "diagnostic": {
            "type": "object",
            "required": ["code", "message"],
            "properties": {
                "code": {"type": "string", "pattern": "^[A-Z][A-Za-z]*$"},
                "message": {"type": "string"},
                "rule": {"type": "string"},
                "axiom": {"type": "string"},
                "index": {"type": "integer"},
                "file": {"type": "string"},
                "line": {"type": "integer", "minimum": 1},
                "column": {"type": "integer", "minimum": 1},
            },
        },
    },
}


class _Out:
    def __init__(self, as_json: bool, stream=None):
        self.json = as_json
        self.stream = stream or sys.stdout
        self.color = (os.environ.get("CFC_COLOR", "1") != "0"
                      and hasattr(self.stream, "isatty") and self.stream.isatty())

    def paint(self, text: str, code: str) -> str:
        return f"\x1b[{code}m{text}\x1b[0m" if self.color else text

    def line(self, text: str = "") -> None:
        print(text, file=self.stream)

    def diag(self, d: Diagnostic, warning: bool = False) -> None:
        label = self.paint("warning", "33") if warning else self.paint("error", "31")
        self.line(f"{label}: {d}")

    def emit(self, doc: dict) -> None:
        print(json.dumps(doc, indent=2), file=self.stream)


class _Failure(Exception):
    def __init__(self, status: int, diags: list, extra: Optional[dict] = None):
        super().__init__(status)
        self.status = status
        self.diags = diags
        self.extra = extra or {}


def _read(path: str) -> tuple[str, str]:
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read(), path
    except OSError as err:
        raise _Failure(EXIT_SEMANTIC, [Diagnostic("FileError", f"{path}: {err.strerror}")])


def _load(path: str) -> Module:
    src, name = _read(path)
    try:
        return load_source(src, name)
    except ParseError as err:
        raise _Failure(EXIT_PARSE, [err.diagnostic])


def _require_ok(mod: Module) -> None:
    if mod.diagnostics:
        raise _Failure(EXIT_SEMANTIC, mod.diagnostics, {"warnings": mod.warnings})


def _parse_type_arg(mod: Module, text: str):
    try:
        return parse_type(text, mod.family_names, filename="<--type>")
    except ParseError as err:
        raise _Failure(EXIT_PARSE, [err.diagnostic])


# -- commands ------------------------------------------------------------------


def cmd_check(args, out: _Out) -> tuple[int, dict]:
    mod = _load(args.file)
    terms = {n: show_type(t.ty) for n, t in mod.terms.items()}
    doc = {"file": args.file, "warnings": [w.to_json() for w in mod.warnings],
           "families": len(mod.sig.families), "axioms": len(mod.sig.axioms), "terms": terms}
    _require_ok(mod)
    if not out.json:
        for w in mod.warnings:
            out.diag(w, warning=True)
        for n, t in terms.items():
            out.line(f"{n} : {t}")
        out.line(out.paint("ok", "32") + f": {len(mod.sig.families)} families, "
                 f"{len(mod.sig.axioms)} axioms, {len(terms)} terms")
    return EXIT_OK, doc


def cmd_eval(args, out: _Out) -> tuple[int, dict]:
    mod = _load(args.file)
    _require_ok(mod)
    info = mod.terms.get(args.main)
    if info is None:
        raise _Failure(EXIT_SEMANTIC, [Diagnostic("UnknownTerm", f"no term named {args.main}")])
    ev = Evaluator(mod.sig)
    trace_rows: list = []
    try:
        result, trace = ev.eval(info.closed, args.fuel)
    except FuelExhausted as err:
        raise _Failure(EXIT_SEMANTIC, [Diagnostic(
            "FuelExhausted", f"{args.main} did not reach a value in {args.fuel} steps")],
            {"steps": len(err.trace)})
    for step in trace:
        trace_rows.append({"rule": step.rule, "expr": show_expr(step.expr)})
        if args.trace and not out.json:
            out.line(f"  --> [{step.rule}] {show_expr(step.expr)}")
    kind = {Value: "value", CoercedValue: "coerced_value", Stuck: "stuck"}[type(result)]
    doc = {"file": args.file, "main": args.main, "type": show_type(info.ty), "kind": kind,
           "result": show_expr(result.expr), "steps": len(trace)}
    if args.trace:
        doc["trace"] = trace_rows
    if isinstance(result, Stuck):
        # A stuck well-typed term contradicts progress.
        raise _Failure(EXIT_INTERNAL, [Diagnostic("Stuck", result.reason)], doc)
    if not out.json:
        out.line(f"{show_expr(result.expr)} : {show_type(info.ty)}")
    return EXIT_OK, doc


def cmd_normalize(args, out: _Out) -> tuple[int, dict]:
    mod = _load(args.file)
    _require_ok(mod)
    ty = _parse_type_arg(mod, args.type)
    ctx = Context()
    for a in ordered_ftv(ty):
        ctx = ctx.extend(TyBind(a))
    try:
        check_pretype(mod.sig, ctx, ty)
    except CheckError as err:
        raise _Failure(EXIT_SEMANTIC, list(err.diagnostics))
    rw = Rewriter(mod.sig)
    nf, steps = rw.normalize(ty)
    remaining = find_redexes(nf)
    stuck = [{"redex": show_type(h.focus()),
              "attempts": [{"axiom": a.axiom, "index": a.index, "outcome": a.outcome,
                            "blocker": a.blocker} for a in rw.explain(f, fargs)]}
             for h, f, fargs in remaining]
    doc = {"file": args.file, "input": show_type(ty), "normal_form": show_type(nf),
           "steps": steps, "stuck": bool(remaining), "stuck_redexes": stuck}
    if not out.json:
        out.line(show_type(nf))
        if args.explain:
            for s in stuck:
                out.line(f"  stuck: {s['redex']}")
                for a in s["attempts"]:
                    extra = f" (blocked by {a['blocker']})" if a["blocker"] is not None else ""
                    out.line(f"    {a['axiom']}[{a['index']}]: {a['outcome']}{extra}")
    return EXIT_OK, doc


def cmd_infer(args, out: _Out) -> tuple[int, dict]:
    mod = _load(args.file)
    _require_ok(mod)
    ty = _parse_type_arg(mod, args.type)
    tyvars = ordered_ftv(ty)
    try:
        preds = mod.env.infer_constraints(tyvars, ty)
        mod.env.st_check_type(preds, tyvars, ty)
    except CheckError as err:
        raise _Failure(EXIT_SEMANTIC, list(err.diagnostics))
    ps = [show_pred(p) for p in preds]
    if len(ps) == 0:
        shown = show_type(ty)
    elif len(ps) == 1:
        shown = f"{ps[0]} => {show_type(ty)}"
    else:
        shown = f"({', '.join(ps)}) => {show_type(ty)}"
    if not out.json:
        out.line(shown)
    return EXIT_OK, {"file": args.file, "type": show_type(ty), "predicates": ps,
                     "qualified": shown}


def cmd_elaborate(args, out: _Out) -> tuple[int, dict]:
    mod = _load(args.file)
    _require_ok(mod)
    surface = [show_decl(d) for d in mod.elaborated]
    kernel = [show_decl(d) for d in mod.kernel]
    if not out.json:
        out.line("-- surface")
        for s in surface:
            out.line(s)
        out.line()
        out.line("-- kernel")
        for s in kernel:
            out.line(s)
    return EXIT_OK, {"file": args.file, "surface": surface, "kernel": kernel,
                     "warnings": [w.to_json() for w in mod.warnings]}


def cmd_fuzz(args, out: _Out) -> tuple[int, dict]:
    suites = args.suite or list(harness.SUITES)
    bad = [s for s in suites if s not in harness.SUITES]
    if bad:
        raise _Failure(EXIT_SEMANTIC, [Diagnostic(
            "UnknownSuite", f"unknown suite {bad[0]}; choose from {', '.join(harness.SUITES)}")])
    worlds = args.worlds if args.worlds is not None else max(1, min(args.cases, 10))
    reports = harness.fuzz(args.seed, args.cases, suites, worlds, args.size)
    failed = [r for r in reports.values() if not r.ok]
    if not out.json:
        for r in reports.values():
            out.line(r.summary() if r.ok else out.paint(r.summary(), "31"))
            for c in r.counterexamples:
                out.line(f"    counterexample: {c}")
    doc = {"seed": args.seed, "worlds": worlds, "reports": [r.to_json() for r in reports.values()]}
    if failed:
        raise _Failure(EXIT_INTERNAL, [Diagnostic("PropertyViolated", f"{r.suite}: {r.failed} "
                                                  "failing case(s)") for r in failed], doc)
    return EXIT_OK, doc


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit a JSON document instead of text")
    p = argparse.ArgumentParser(prog="cfc", parents=[common],
                                description="Checker and evaluator for constrained type families.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check a program")
    c.add_argument("file", help="source file, or - for stdin")
    c.set_defaults(run=cmd_check)

    e = sub.add_parser("eval", parents=[common], help="evaluate a term")
    e.add_argument("file")
    e.add_argument("--main", required=True, help="term to evaluate")
    e.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    e.add_argument("--trace", action="store_true", help="print every step")
    e.set_defaults(run=cmd_eval)

    n = sub.add_parser("normalize", parents=[common], help="normalize a type")
    n.add_argument("file")
    n.add_argument("--type", required=True)
    n.add_argument("--explain", action="store_true",
                   help="show why remaining family applications are stuck")
    n.set_defaults(run=cmd_normalize)

    i = sub.add_parser("infer", parents=[common], help="infer the class context of a type")
    i.add_argument("file")
    i.add_argument("--type", required=True)
    i.set_defaults(run=cmd_infer)

    el = sub.add_parser("elaborate", parents=[common], help="show elaborated declarations")
    el.add_argument("file")
    el.set_defaults(run=cmd_elaborate)

    f = sub.add_parser("fuzz", parents=[common], help="run metatheory property suites")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--cases", type=int, default=200, help="cases per suite, over all worlds")
    f.add_argument("--suite", action="append", help="suite to run (repeatable; default all)")
    f.add_argument("--worlds", type=int, default=None, help="number of generated worlds")
    f.add_argument("--size", type=int, default=3, help="world size bound")
    f.set_defaults(run=cmd_fuzz)
    return p


_STATUS = {EXIT_OK: "ok", EXIT_SEMANTIC: "error", EXIT_PARSE: "parse_error",
           EXIT_INTERNAL: "internal_error"}


def main(argv: Optional[list] = None, stdout=None) -> int:
    args = build_parser().parse_args(argv)
    as_json = getattr(args, "json", False)
    out = _Out(as_json, stdout)
    doc: dict = {}
    diags: list = []
    try:
        code, doc = args.run(args, out)
    except _Failure as f:
        code, diags, doc = f.status, f.diags, f.extra
        if not as_json:
            for w in doc.get("warnings", []):
                out.diag(w, warning=True)
            for d in diags:
                out.diag(d)
    except Exception as err:    # noqa: BLE001 - any crash is an invariant violation
        code = EXIT_INTERNAL
        diags = [Diagnostic("InternalError", f"{type(err).__name__}: {err}")]
        if not as_json:
            out.diag(diags[0])
            traceback.print_exc(file=sys.stderr)
    if as_json:
        full = {"status": _STATUS[code], "command": args.command,
                "diagnostics": [d.to_json() for d in diags]}
        for k, v in doc.items():
            if k == "warnings":
                v = [w.to_json() if isinstance(w, Diagnostic) else w for w in v]
            full[k] = v
        out.emit(full)
    return code


if __name__ == "__main__":
    sys.exit(main())
