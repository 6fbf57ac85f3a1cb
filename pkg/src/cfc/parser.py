"""Lexer and recursive-descent parser for ``.cfc`` files.

The grammar is documented in ``docs/grammar.md``.  Type-level names are parsed
as type constants and afterwards resolved: names declared as families (kernel
``family`` declarations, surface ``type family`` declarations and associated
``type`` declarations in classes) become family applications.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from . import program as P
from .diagnostics import Diagnostic, Span
from .syntax import (App, Arrow, ArrowCong, Assume, AxiomUse, Cast, CApp, CLam, ConCong, Const,
                     CoVar, Equation, EvalAssumption, EvalResolution, FamApp, FamCong, Forall,
                     ForallCong, Inst, Lam, Nth, Prop, Qual, QualCong, Refl, Sym, TApp, TLam,
                     Trans, TyCon, TyVar, Var)

KEYWORDS = {
    "data", "const", "family", "partial", "total", "axiom", "forall", "refl", "sym", "nth",
    "cong", "term", "assume", "in", "class", "instance", "type", "where", "closed",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<pragma_open>\{-\#)
  | (?P<pragma_close>\#-\})
  | (?P<block>\{-(?:.|\n)*?-\})
  | (?P<int>\d+)
  | (?P<upper>[A-Z][A-Za-z0-9_']*)
  | (?P<lower>[a-z_][A-Za-z0-9_']*)
  | (?P<sym>->|=>|\|>|/\\|[\\~.:;,()\[\]{}|<>@=])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.diagnostic = Diagnostic("ParseError", message, span=span)
        self.span = span


@dataclass(frozen=True, slots=True)
class Tok:
    kind: str    # upper, lower, int, sym, kw, eof
    text: str
    line: int
    col: int


def tokenize(src: str, filename: str = "<input>") -> list[Tok]:
    toks: list[Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", Span(filename, line, col))
        kind = m.lastgroup
        text = m.group()
        if kind in ("upper", "lower", "int", "sym", "pragma_open", "pragma_close"):
            if kind == "lower" and text in KEYWORDS:
                kind = "kw"
            elif kind in ("pragma_open", "pragma_close"):
                kind = "sym"
            toks.append(Tok(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(Tok("eof", "", line, col))
    return toks


class _Tuple:
    """Parenthesised comma list; only meaningful as a class context."""

    def __init__(self, items):
        self.items = items


class Parser:
    def __init__(self, src: str, filename: str = "<input>"):
        self.filename = filename
        self.toks = tokenize(src, filename)
        self.i = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def span(self, t: Optional[Tok] = None) -> Span:
        t = t or self.tok
        return Span(self.filename, t.line, t.col)

    def error(self, msg: str, t: Optional[Tok] = None) -> ParseError:
        t = t or self.tok
        shown = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"{msg} (found {shown})", self.span(t))

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("sym", "kw")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def expect_kind(self, kind: str, what: str) -> str:
        t = self.tok
        if t.kind != kind:
            raise self.error(f"expected {what}")
        self.i += 1
        return t.text

    def lower(self) -> str:
        return self.expect_kind("lower", "a lowercase identifier")

    def upper(self) -> str:
        return self.expect_kind("upper", "an uppercase identifier")

    def integer(self) -> int:
        return int(self.expect_kind("int", "an integer"))

    def expect_eof(self) -> None:
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input")

    # -- types ---------------------------------------------------------------

    def type_(self):
        if self.accept("forall"):
            vs = [self.lower()]
            while self.tok.kind == "lower":
                vs.append(self.lower())
            self.expect(".")
            body = self.type_()
            for v in reversed(vs):
                body = Forall(v, body)
            return body
        t = self.btype()
        if self.accept("->"):
            return Arrow(self._plain(t), self.type_())
        if self.accept("=>"):
            return P.Constrained(self._context(t), self.type_())
        return self._plain(t)

    def _plain(self, t):
        if isinstance(t, _Tuple):
            raise self.error("a parenthesised list is only allowed before '=>'")
        return t

    def _context(self, t) -> tuple:
        items = t.items if isinstance(t, _Tuple) else [t]
        preds = []
        for x in items:
            if not isinstance(x, TyCon):
                raise self.error("expected a class predicate before '=>'")
            preds.append(P.Pred(x.name, x.args))
        return tuple(preds)

    def btype(self):
        if self.tok.kind == "upper":
            name = self.upper()
            args = []
            while self._starts_atype():
                args.append(self.atype())
            return TyCon(name, tuple(args))
        return self.atype()

    def _starts_atype(self) -> bool:
        t = self.tok
        return t.kind in ("upper", "lower") or (t.kind == "sym" and t.text in ("(", "["))

    def atype(self):
        t = self.tok
        if t.kind == "lower":
            self.i += 1
            return TyVar(t.text)
        if t.kind == "upper":
            self.i += 1
            return TyCon(t.text, ())
        if self.accept("["):
            inner = self.type_()
            self.expect("]")
            return TyCon("List", (inner,))
        if self.accept("("):
            first = self.type_()
            if self.accept("~"):
                rhs = self.type_()
                self.expect(")")
                self.expect("=>")
                return Qual(Prop(first, rhs), self.type_())
            if self.at(","):
                items = [first]
                while self.accept(","):
                    items.append(self.type_())
                self.expect(")")
                return _Tuple(items)
            self.expect(")")
            return first
        raise self.error("expected a type")

    def prop(self) -> Prop:
        lhs = self.type_()
        self.expect("~")
        return Prop(lhs, self.type_())

    # -- coercions -----------------------------------------------------------

    def coercion(self):
        left = self.co1()
        if self.accept(";"):
            return Trans(left, self.coercion())
        return left

    def co1(self):
        if self.accept("forall"):
            vs = [self.lower()]
            while self.tok.kind == "lower":
                vs.append(self.lower())
            self.expect(".")
            body = self.coercion()
            for v in reversed(vs):
                body = ForallCong(v, body)
            return body
        left = self.co2()
        if self.accept("->"):
            return ArrowCong(left, self.co1())
        return left

    def co2(self):
        g = self.co3()
        while self.accept("@"):
            g = Inst(g, self.atype())
        return g

    def co3(self):
        t = self.tok
        if self.accept("refl"):
            return Refl(self.atype())
        if self.accept("sym"):
            return Sym(self.co3())
        if self.accept("nth"):
            i = self.integer()
            return Nth(i, self.co3())
        if self.accept("cong"):
            name = self.upper()
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.coercion())
                while self.accept(","):
                    args.append(self.coercion())
            self.expect(")")
            return ConCong(name, tuple(args))
        if t.kind == "lower":
            self.i += 1
            if self.accept("["):
                idx = self.integer()
                self.expect("]")
                tys = []
                while self._starts_atype():
                    tys.append(self.atype())
                res = []
                if self.accept("{"):
                    if not self.at("}"):
                        res.append(self.resolution())
                        while self.accept(","):
                            res.append(self.resolution())
                    self.expect("}")
                return AxiomUse(t.text, idx, tuple(tys), tuple(res))
            return CoVar(t.text)
        if self.accept("("):
            inner = self.coercion()
            if self.accept("~"):
                right = self.coercion()
                self.expect(")")
                self.expect("=>")
                return QualCong(inner, right, self.co1())
            self.expect(")")
            return inner
        raise self.error("expected a coercion")

    def resolution(self) -> EvalResolution:
        self.expect("(")
        w = self.type_()
        self.expect("|")
        g = self.coercion()
        self.expect(")")
        return EvalResolution(w, g)

    # -- expressions ---------------------------------------------------------

    def expr(self):
        if self.accept("\\"):
            x = self.lower()
            self.expect(":")
            if self.at("("):
                save = self.i
                self.i += 1
                first = self.type_()
                if self.accept("~"):
                    rhs = self.type_()
                    self.expect(")")
                    if self.accept("."):
                        return CLam(x, Prop(first, rhs), self.expr())
                self.i = save
            ty = self.type_()
            self.expect(".")
            return Lam(x, ty, self.expr())
        if self.accept("/\\"):
            a = self.lower()
            self.expect(".")
            return TLam(a, self.expr())
        if self.accept("assume"):
            self.expect("(")
            chi = self.assumption()
            self.expect(")")
            self.expect("in")
            return Assume(chi, self.expr())
        return self.cast_expr()

    def assumption(self) -> EvalAssumption:
        t = self.tok
        a = self.lower()
        self.expect("|")
        c = self.lower()
        self.expect(":")
        fam = self.upper()
        args = []
        while self._starts_atype():
            args.append(self.atype())
        self.expect("~")
        b = self.lower()
        if b != a:
            raise self.error(f"assumption must end in its own variable {a}", t)
        return EvalAssumption(a, c, fam, tuple(args))

    def cast_expr(self):
        e = self.app_expr()
        while self.accept("|>"):
            e = Cast(e, self.coercion())
        return e

    def app_expr(self):
        e = self.aexpr()
        while True:
            if self.accept("["):
                ty = self.type_()
                self.expect("]")
                e = TApp(e, ty)
            elif self.accept("<"):
                g = self.coercion()
                self.expect(">")
                e = CApp(e, g)
            elif self._starts_aexpr():
                e = App(e, self.aexpr())
            else:
                return e

    def _starts_aexpr(self) -> bool:
        t = self.tok
        return t.kind in ("upper", "lower") or (t.kind == "sym" and t.text == "(")

    def aexpr(self):
        t = self.tok
        if t.kind == "lower":
            self.i += 1
            return Var(t.text)
        if t.kind == "upper":
            self.i += 1
            return Const(t.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error("expected an expression")

    # -- declarations --------------------------------------------------------

    def program(self) -> P.Program:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.decl())
            self.accept(";")
        return P.Program(tuple(decls), self.filename)

    def decl(self):
        t = self.tok
        sp = self.span()
        if self.accept("data"):
            name = self.upper()
            if self.accept(":"):
                return P.DataDecl(name, self.integer(), sp)
            self.expect("=")
            cons = [self._constructor()]
            while self.accept("|"):
                cons.append(self._constructor())
            return P.DataKindDecl(name, tuple(cons), sp)
        if self.accept("const"):
            name = self.upper()
            self.expect(":")
            return P.ConstDecl(name, self.type_(), sp)
        if self.accept("family"):
            name = self.upper()
            self.expect(":")
            n = self.integer()
            if self.accept("total"):
                return P.FamilyDecl(name, n, True, sp)
            self.expect("partial")
            return P.FamilyDecl(name, n, False, sp)
        if self.accept("axiom"):
            name = self.lower()
            self.expect(":")
            fam = self.upper()
            self.expect("{")
            eqs, spans = [], []
            while not self.at("}"):
                spans.append(self.span())
                eqs.append(self.equation())
                if not self.accept(";"):
                    break
            self.expect("}")
            return P.AxiomDecl(name, fam, tuple(eqs), sp, tuple(spans))
        if self.accept("term"):
            name = self.lower()
            ty = None
            if self.accept(":"):
                ty = self.type_()
            self.expect("=")
            return P.TermDecl(name, ty, self.expr(), sp)
        if self.accept("class"):
            return self._class(sp)
        if self.at("instance"):
            return self._instance()
        if self.accept("type"):
            if self.accept("family"):
                return self._type_family(sp)
            self.expect("instance")
            fam, lhs, rhs = self._fam_equation()
            return P.TypeInstanceDecl(fam, lhs, rhs, sp)
        if self.accept("{-#"):
            word = self.upper()
            if word != "TOTAL":
                raise self.error(f"unknown pragma {word}", t)
            fam = self.upper()
            self.expect("#-}")
            return P.TotalPragma(fam, sp)
        raise self.error("expected a declaration")

    def _constructor(self):
        name = self.upper()
        args = []
        while self._starts_atype():
            args.append(self.atype())
        return name, tuple(args)

    def equation(self) -> Equation:
        tyvars: list = []
        chis: list = []
        if self.accept("forall"):
            while True:
                if self.tok.kind == "lower":
                    tyvars.append(self.lower())
                elif self.accept("["):
                    chis.append(self.assumption())
                    self.expect("]")
                else:
                    break
            self.expect(".")
        fam = self.upper()
        args = []
        while self._starts_atype():
            args.append(self.atype())
        self.expect("~")
        rhs = self.type_()
        return Equation(tuple(tyvars), tuple(chis), fam, tuple(args), rhs)

    def _fam_equation(self):
        fam = self.upper()
        lhs = []
        while self._starts_atype():
            lhs.append(self.atype())
        self.expect("=")
        return fam, tuple(lhs), self.type_()

    def _class_head(self):
        """``[context =>] C params`` with the context optional."""
        t = self.type_()
        if isinstance(t, P.Constrained):
            head = t.body
            ctx = t.preds
        else:
            head, ctx = t, ()
        if not isinstance(head, TyCon):
            raise self.error("expected a class head")
        return ctx, head

    def _class(self, sp):
        closed = self.accept("closed")
        ctx, head = self._class_head()
        params = []
        for a in head.args:
            if not isinstance(a, TyVar):
                raise self.error("class parameters must be type variables")
            params.append(a.name)
        assoc, insts = [], []
        if self.accept("where"):
            self.expect("{")
            while not self.at("}"):
                if self.accept("type"):
                    assoc.append(self.upper())
                    while self.tok.kind == "lower":
                        self.i += 1
                elif self.at("instance"):
                    insts.append(self._instance())
                else:
                    raise self.error("expected 'type' or 'instance' in class body")
                if not self.accept(";"):
                    break
            self.expect("}")
        return P.ClassDecl(head.name, tuple(params), ctx, tuple(assoc), closed, tuple(insts), sp)

    def _instance(self):
        sp = self.span()
        self.expect("instance")
        ctx, head = self._class_head()
        defs = []
        if self.accept("where"):
            self.expect("{")
            while not self.at("}"):
                self.expect("type")
                fam, lhs, rhs = self._fam_equation()
                defs.append(P.AssocDef(fam, lhs, rhs))
                if not self.accept(";"):
                    break
            self.expect("}")
        return P.InstanceDecl(ctx, P.Pred(head.name, head.args), tuple(defs), sp)

    def _type_family(self, sp):
        total = self.accept("total")
        name = self.upper()
        params = []
        while True:
            if self.tok.kind == "lower":
                params.append((self.lower(), None))
            elif self.at("(") and self.peek().kind == "lower" and self.peek(2).text == ":":
                self.expect("(")
                v = self.lower()
                self.expect(":")
                k = self.upper()
                self.expect(")")
                params.append((v, k))
            else:
                break
        eqs = None
        if self.accept("where"):
            eqs = []
            self.expect("{")
            while not self.at("}"):
                esp = self.span()
                fam, lhs, rhs = self._fam_equation()
                eqs.append(P.FamilyEquation(fam, lhs, rhs, esp))
                if not self.accept(";"):
                    break
            self.expect("}")
            eqs = tuple(eqs)
        return P.TypeFamilyDecl(name, tuple(params), total, eqs, sp)


# -- family resolution ------------------------------------------------------


def family_names(decls) -> set:
    out = set()
    for d in decls:
        if isinstance(d, (P.FamilyDecl, P.TypeFamilyDecl)):
            out.add(d.name)
        elif isinstance(d, P.ClassDecl):
            out.update(d.assoc)
    return out


def resolve(node, fams: set):
    """Turn type constants named like families into family applications, and
    congruences over families into family congruences."""
    r: Callable = lambda x: resolve(x, fams)
    match node:
        case TyCon(h, args):
            args = tuple(r(x) for x in args)
            return FamApp(h, args) if h in fams else TyCon(h, args)
        case FamApp(h, args):
            return FamApp(h, tuple(r(x) for x in args))
        case TyVar() | Var() | Const() | CoVar():
            return node
        case Arrow(a, b):
            return Arrow(r(a), r(b))
        case Forall(a, b):
            return Forall(a, r(b))
        case Qual(p, b):
            return Qual(r(p), r(b))
        case Prop(a, b):
            return Prop(r(a), r(b))
        case P.Constrained(ps, b):
            return P.Constrained(tuple(r(p) for p in ps), r(b))
        case P.Pred(c, args):
            return P.Pred(c, tuple(r(x) for x in args))
        case Refl(t):
            return Refl(r(t))
        case Sym(g):
            return Sym(r(g))
        case Trans(a, b):
            return Trans(r(a), r(b))
        case ConCong(h, args) | FamCong(h, args):
            args = tuple(r(x) for x in args)
            return FamCong(h, args) if h in fams else ConCong(h, args)
        case ArrowCong(a, b):
            return ArrowCong(r(a), r(b))
        case ForallCong(a, g):
            return ForallCong(a, r(g))
        case QualCong(a, b, c):
            return QualCong(r(a), r(b), r(c))
        case Nth(i, g):
            return Nth(i, r(g))
        case Inst(g, t):
            return Inst(r(g), r(t))
        case AxiomUse(ax, i, tys, res):
            return AxiomUse(ax, i, tuple(r(x) for x in tys), tuple(r(q) for q in res))
        case EvalResolution(w, p):
            return EvalResolution(r(w), r(p))
        case EvalAssumption(a, c, f, args):
            return EvalAssumption(a, c, f, tuple(r(x) for x in args))
        case Lam(x, t, b):
            return Lam(x, r(t), r(b))
        case App(f, a):
            return App(r(f), r(a))
        case TLam(a, b):
            return TLam(a, r(b))
        case TApp(f, t):
            return TApp(r(f), r(t))
        case CLam(c, p, b):
            return CLam(c, r(p), r(b))
        case CApp(f, g):
            return CApp(r(f), r(g))
        case Cast(e, g):
            return Cast(r(e), r(g))
        case Assume(chi, b):
            return Assume(r(chi), r(b))
        case Equation(tvs, chis, fam, lhs, rhs):
            return Equation(tvs, tuple(r(c) for c in chis), fam, tuple(r(x) for x in lhs), r(rhs))
    raise TypeError(f"resolve: {node!r}")


def _resolve_decl(d, fams: set):
    r = lambda x: resolve(x, fams)
    match d:
        case P.ConstDecl(name, ty):
            return P.ConstDecl(name, r(ty), d.span)
        case P.AxiomDecl(name, fam, eqs):
            return P.AxiomDecl(name, fam, tuple(r(e) for e in eqs), d.span, d.eq_spans)
        case P.TermDecl(name, ty, e):
            return P.TermDecl(name, None if ty is None else r(ty), r(e), d.span)
        case P.DataKindDecl(name, cons):
            return P.DataKindDecl(name, tuple((c, tuple(r(x) for x in a)) for c, a in cons), d.span)
        case P.ClassDecl():
            return P.ClassDecl(d.name, d.params, tuple(r(p) for p in d.supers), d.assoc, d.closed,
                               tuple(_resolve_decl(i, fams) for i in d.instances), d.span)
        case P.InstanceDecl(ctx, head, defs):
            return P.InstanceDecl(tuple(r(p) for p in ctx), r(head),
                                  tuple(P.AssocDef(a.fam, tuple(r(x) for x in a.lhs), r(a.rhs))
                                        for a in defs), d.span)
        case P.TypeFamilyDecl(name, params, total, eqs):
            if eqs is not None:
                eqs = tuple(P.FamilyEquation(e.fam, tuple(r(x) for x in e.lhs), r(e.rhs), e.span)
                            for e in eqs)
            return P.TypeFamilyDecl(name, params, total, eqs, d.span)
        case P.TypeInstanceDecl(fam, lhs, rhs):
            return P.TypeInstanceDecl(fam, tuple(r(x) for x in lhs), r(rhs), d.span)
    return d


def parse_program(src: str, filename: str = "<input>") -> P.Program:
    prog = Parser(src, filename).program()
    fams = family_names(prog.decls)
    return P.Program(tuple(_resolve_decl(d, fams) for d in prog.decls), filename)


def _parse_with(src: str, fams, method: str, filename: str = "<input>"):
    p = Parser(src, filename)
    node = getattr(p, method)()
    p.expect_eof()
    return resolve(node, set(fams or ()))


def parse_type(src: str, families=(), filename: str = "<input>"):
    return _parse_with(src, families, "type_", filename)


def parse_coercion(src: str, families=(), filename: str = "<input>"):
    return _parse_with(src, families, "coercion", filename)


def parse_expr(src: str, families=(), filename: str = "<input>"):
    return _parse_with(src, families, "expr", filename)


def parse_equation(src: str, families=(), filename: str = "<input>"):
    return _parse_with(src, families, "equation", filename)
