"""Concrete syntax output.  ``parse(show(x))`` reproduces ``x`` exactly."""

from __future__ import annotations

from .syntax import (App, Arrow, ArrowCong, Assume, AxiomUse, Cast, CApp, CLam, ConCong, Const,
                     CoVar, Equation, EvalAssumption, EvalResolution, FamApp, FamCong, Forall,
                     ForallCong, Inst, Lam, Nth, Prop, Qual, QualCong, Refl, Sym, TApp, TLam,
                     Trans, TyCon, TyVar, Var)

LIST = "List"

# -- types --------------------------------------------------------------------
# precedence: 0 anything, 1 arrow domain, 2 application argument


def show_type(t, prec: int = 0) -> str:
    from .program import Constrained, Pred
    match t:
        case TyVar(a):
            return a
        case TyCon(h, args) | FamApp(h, args):
            if not args:
                return h
            if h == LIST and len(args) == 1 and isinstance(t, TyCon):
                return f"[{show_type(args[0])}]"
            s = h + " " + " ".join(show_type(x, 2) for x in args)
            return f"({s})" if prec >= 2 else s
        case Arrow(d, c):
            s = f"{show_type(d, 1)} -> {show_type(c, 0)}"
            return f"({s})" if prec >= 1 else s
        case Forall():
            vs = []
            while isinstance(t, Forall):
                vs.append(t.var)
                t = t.body
            s = f"forall {' '.join(vs)}. {show_type(t, 0)}"
            return f"({s})" if prec >= 1 else s
        case Qual(p, body):
            s = f"({show_prop(p)}) => {show_type(body, 0)}"
            return f"({s})" if prec >= 1 else s
        case Constrained(preds, body):
            if len(preds) == 1:
                ctx = show_pred(preds[0])
            else:
                ctx = "(" + ", ".join(show_pred(p) for p in preds) + ")"
            s = f"{ctx} => {show_type(body, 0)}"
            return f"({s})" if prec >= 1 else s
        case Pred():
            return show_pred(t)
    raise TypeError(f"show_type: {t!r}")


def show_prop(p: Prop) -> str:
    return f"{show_type(p.lhs)} ~ {show_type(p.rhs)}"


def show_pred(p) -> str:
    if not p.args:
        return p.cls
    return p.cls + " " + " ".join(show_type(x, 2) for x in p.args)


# -- coercions ----------------------------------------------------------------
# precedence: 0 anything, 1 no trans, 2 no arrow, 3 atomic


def show_co(g, prec: int = 0) -> str:
    match g:
        case Trans(a, b):
            s = f"{show_co(a, 1)} ; {show_co(b, 0)}"
            return f"({s})" if prec >= 1 else s
        case ForallCong():
            vs = []
            while isinstance(g, ForallCong):
                vs.append(g.var)
                g = g.body
            s = f"forall {' '.join(vs)}. {show_co(g, 0)}"
            return f"({s})" if prec >= 1 else s
        case QualCong(a, b, c):
            s = f"({show_co(a)} ~ {show_co(b)}) => {show_co(c, 1)}"
            return f"({s})" if prec >= 2 else s
        case ArrowCong(a, b):
            s = f"{show_co(a, 2)} -> {show_co(b, 1)}"
            return f"({s})" if prec >= 2 else s
        case Inst(c, ty):
            s = f"{show_co(c, 2)} @ {show_type(ty, 2)}"
            return f"({s})" if prec >= 3 else s
        case Refl(ty):
            return f"refl {show_type(ty, 2)}"
        case Sym(c):
            return f"sym {show_co(c, 3)}"
        case Nth(i, c):
            return f"nth {i} {show_co(c, 3)}"
        case ConCong(h, args) | FamCong(h, args):
            return f"cong {h} (" + ", ".join(show_co(x) for x in args) + ")"
        case CoVar(c):
            return c
        case AxiomUse(ax, i, tys, res):
            s = f"{ax}[{i}]"
            if tys:
                s += " " + " ".join(show_type(x, 2) for x in tys)
            if res:
                s += " {" + ", ".join(show_resolution(q) for q in res) + "}"
            return s
    raise TypeError(f"show_co: {g!r}")


def show_resolution(q: EvalResolution) -> str:
    return f"({show_type(q.witness)} | {show_co(q.proof)})"


def show_assumption(chi: EvalAssumption) -> str:
    head = " ".join([chi.fam, *(show_type(x, 2) for x in chi.args)])
    return f"{chi.var} | {chi.covar} : {head} ~ {chi.var}"


# -- expressions --------------------------------------------------------------
# precedence: 0 anything, 1 cast operand, 2 application head, 3 atomic


def show_expr(e, prec: int = 0) -> str:
    match e:
        case Var(x) | Const(x):
            return x
        case Lam(x, ty, body):
            s = f"\\{x}:{show_type(ty)}. {show_expr(body)}"
            return f"({s})" if prec >= 1 else s
        case TLam(a, body):
            s = f"/\\{a}. {show_expr(body)}"
            return f"({s})" if prec >= 1 else s
        case CLam(c, p, body):
            s = f"\\{c}:({show_prop(p)}). {show_expr(body)}"
            return f"({s})" if prec >= 1 else s
        case Assume(chi, body):
            s = f"assume ({show_assumption(chi)}) in {show_expr(body)}"
            return f"({s})" if prec >= 1 else s
        case Cast(inner, g):
            s = f"{show_expr(inner, 1)} |> {show_co(g)}"
            return f"({s})" if prec >= 2 else s
        case App(f, a):
            s = f"{show_expr(f, 2)} {show_expr(a, 3)}"
            return f"({s})" if prec >= 3 else s
        case TApp(f, ty):
            s = f"{show_expr(f, 2)} [{show_type(ty)}]"
            return f"({s})" if prec >= 3 else s
        case CApp(f, g):
            s = f"{show_expr(f, 2)} <{show_co(g)}>"
            return f"({s})" if prec >= 3 else s
    raise TypeError(f"show_expr: {e!r}")


def show_equation(eq: Equation) -> str:
    head = " ".join([eq.fam, *(show_type(x, 2) for x in eq.lhs_args)])
    body = f"{head} ~ {show_type(eq.rhs)}"
    if not eq.tyvars and not eq.assumps:
        return body
    binders = list(eq.tyvars) + [f"[{show_assumption(c)}]" for c in eq.assumps]
    return f"forall {' '.join(binders)}. {body}"


def show(node) -> str:
    """Render any syntax node."""
    from .program import Constrained, Pred
    from . import syntax as S
    if isinstance(node, S.TYPE_CLASSES) or isinstance(node, (Constrained, Pred)):
        return show_type(node)
    if isinstance(node, Prop):
        return show_prop(node)
    if isinstance(node, S.COERCION_CLASSES):
        return show_co(node)
    if isinstance(node, S.EXPR_CLASSES):
        return show_expr(node)
    if isinstance(node, Equation):
        return show_equation(node)
    if isinstance(node, EvalResolution):
        return show_resolution(node)
    if isinstance(node, EvalAssumption):
        return f"({show_assumption(node)})"
    raise TypeError(f"show: {node!r}")


# -- programs -----------------------------------------------------------------


def show_decl(d) -> str:
    from . import program as P
    match d:
        case P.DataDecl(name, arity):
            return f"data {name} : {arity}"
        case P.ConstDecl(name, ty):
            return f"const {name} : {show_type(ty)}"
        case P.FamilyDecl(name, arity, total):
            return f"family {name} : {arity} {'total' if total else 'partial'}"
        case P.AxiomDecl(name, fam, eqs):
            if not eqs:
                return f"axiom {name} : {fam} {{ }}"
            body = " ;\n".join("  " + show_equation(e) for e in eqs)
            return f"axiom {name} : {fam} {{\n{body}\n}}"
        case P.TermDecl(name, ty, expr):
            sig = f" : {show_type(ty)}" if ty is not None else ""
            return f"term {name}{sig} = {show_expr(expr)}"
        case P.DataKindDecl(name, cons):
            alts = " | ".join(" ".join([c, *(show_type(x, 2) for x in args)]) for c, args in cons)
            return f"data {name} = {alts}"
        case P.ClassDecl():
            return _show_class(d)
        case P.InstanceDecl():
            return _show_instance(d)
        case P.TypeFamilyDecl(name, params, total, eqs):
            ps = " ".join(p if k is None else f"({p} : {k})" for p, k in params)
            head = f"type family {'total ' if total else ''}{name}" + (f" {ps}" if ps else "")
            if eqs is None:
                return head
            body = " ;\n".join("  " + _show_fam_eq(e.fam, e.lhs, e.rhs) for e in eqs)
            return f"{head} where {{\n{body}\n}}"
        case P.TypeInstanceDecl(fam, lhs, rhs):
            return "type instance " + _show_fam_eq(fam, lhs, rhs)
        case P.TotalPragma(fam):
            return f"{{-# TOTAL {fam} #-}}"
    raise TypeError(f"show_decl: {d!r}")


def _show_fam_eq(fam: str, lhs, rhs) -> str:
    return " ".join([fam, *(show_type(x, 2) for x in lhs)]) + f" = {show_type(rhs)}"


def _show_context(preds) -> str:
    if not preds:
        return ""
    if len(preds) == 1:
        return show_pred(preds[0]) + " => "
    return "(" + ", ".join(show_pred(p) for p in preds) + ") => "


def _show_class(d) -> str:
    head = "class " + ("closed " if d.closed else "") + _show_context(d.supers)
    head += " ".join([d.name, *d.params])
    items = [f"type {f}" for f in d.assoc] + [_show_instance(i) for i in d.instances]
    if not items:
        return head
    return head + " where {\n" + " ;\n".join("  " + s for s in items) + "\n}"


def _show_instance(d) -> str:
    head = "instance " + _show_context(d.context) + show_pred(d.head)
    if not d.assoc:
        return head
    defs = " ; ".join("type " + _show_fam_eq(a.fam, a.lhs, a.rhs) for a in d.assoc)
    return f"{head} where {{ {defs} }}"


def show_program(prog) -> str:
    return "\n\n".join(show_decl(d) for d in prog.decls) + "\n"
