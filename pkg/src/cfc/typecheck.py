"""Validity of types, propositions, contexts and coercions, and expression typing.

Every judgment is a syntax-directed function.  Success returns normally (with
the inferred proposition or type where there is one); failure raises
:class:`CheckError` naming the rule whose premise broke.

Binders whose name is already bound in the context are renamed on the way in,
so the checker works up to alpha-equivalence without ever reporting a clash
for a well-scoped term.
"""

from __future__ import annotations

from typing import Sequence

from .conflict import no_conflict
from .diagnostics import CheckError, fail
from .syntax import (App, Arrow, ArrowCong, Assume, AxiomUse, Cast, CApp, CLam, CoBind,
                     ConCong, Const, Context, CoVar, EvalAssumption, EvalResolution,
                     FamApp, FamCong, Forall, ForallCong, Inst, Lam, Nth, Prop, Qual,
                     QualCong, Refl, Signature, Sym, TApp, TLam, TmBind, Trans, TyBind,
                     TyCon, TyVar, Var, alpha_eq, fresh_name, ftv, is_family_free, subst_types,
                     Subst, subst_apply)

# --------------------------------------------------------------------------
# Binder hygiene


def _open_tyvar(ctx: Context, a: str, *bodies):
    """Pick a name for binder ``a`` that is not yet in ``ctx``."""
    if not ctx.has_tyvar(a):
        return (a, *bodies)
    b = fresh_name(a, ctx.names())
    ren = {a: TyVar(b)}
    return (b, *(subst_types(ren, x) for x in bodies))


def _open_covar(ctx: Context, c: str, body):
    if ctx.covar(c) is None:
        return c, body
    d = fresh_name(c, ctx.names())
    return d, subst_apply(Subst(cos={c: CoVar(d)}), body)


def _open_termvar(ctx: Context, x: str, body):
    if ctx.termvar(x) is None:
        return x, body
    y = fresh_name(x, ctx.names())
    return y, subst_apply(Subst(tms={x: Var(y)}), body)


# --------------------------------------------------------------------------
# Types and propositions


def check_type(sig: Signature, ctx: Context, ty) -> None:
    """``ctx |- ty type``: a proper type, families only inside propositions."""
    match ty:
        case TyVar(a):
            if not ctx.has_tyvar(a):
                raise fail("UnboundTyVar", f"type variable {a} is not in scope", "T_Var")
        case TyCon(h, args):
            _check_tycon(sig, h, args, "T_TyCon")
            for x in args:
                check_type(sig, ctx, x)
        case Arrow(d, c):
            check_type(sig, ctx, d)
            check_type(sig, ctx, c)
        case Forall(a, body):
            a, body = _open_tyvar(ctx, a, body)
            check_type(sig, ctx.extend(TyBind(a)), body)
        case Qual(p, body):
            check_prop(sig, ctx, p)
            check_type(sig, ctx, body)
        case FamApp(f, _):
            raise fail("FamilyOutsideProp",
                       f"family application {ty} appears outside a proposition")
        case _:
            raise TypeError(f"check_type: not a type {ty!r}")


def _check_tycon(sig: Signature, h: str, args: tuple, rule: str) -> None:
    n = sig.ty_cons.get(h)
    if n is None:
        raise fail("UndeclaredTyCon", f"type constant {h} is not declared", rule)
    if n != len(args):
        raise fail("ArityMismatch", f"{h} expects {n} argument(s), got {len(args)}", rule)


def _check_family(sig: Signature, f: str, n_args: int, rule: str):
    info = sig.families.get(f)
    if info is None:
        raise fail("UndeclaredFamily", f"type family {f} is not declared", rule)
    if info.arity != n_args:
        raise fail("ArityMismatch", f"{f} expects {info.arity} argument(s), got {n_args}", rule)
    return info


def _proper_in_prop(sig: Signature, ctx: Context, ty, rule: str) -> None:
    if not is_family_free(ty):
        raise fail("NestedFamilyInProp",
                   f"family application inside {ty}; only the left side may be one", rule)
    check_type(sig, ctx, ty)


def check_prop(sig: Signature, ctx: Context, prop: Prop) -> None:
    """``ctx |- prop prop`` by P_Family or P_Types."""
    lhs, rhs = prop.lhs, prop.rhs
    if isinstance(lhs, FamApp):
        _check_family(sig, lhs.name, len(lhs.args), "P_Family")
        for x in lhs.args:
            _proper_in_prop(sig, ctx, x, "P_Family")
        _proper_in_prop(sig, ctx, rhs, "P_Family")
    else:
        _proper_in_prop(sig, ctx, lhs, "P_Types")
        _proper_in_prop(sig, ctx, rhs, "P_Types")


def check_pretype(sig: Signature, ctx: Context, ty) -> None:
    """Scoping and arity check for a pretype (families allowed anywhere)."""
    match ty:
        case TyVar(a):
            if not ctx.has_tyvar(a):
                raise fail("UnboundTyVar", f"type variable {a} is not in scope", "C_Refl")
        case TyCon(h, args):
            _check_tycon(sig, h, args, "C_Refl")
            for x in args:
                check_pretype(sig, ctx, x)
        case FamApp(f, args):
            _check_family(sig, f, len(args), "C_Refl")
            for x in args:
                check_pretype(sig, ctx, x)
        case Arrow(d, c):
            check_pretype(sig, ctx, d)
            check_pretype(sig, ctx, c)
        case Forall(a, body):
            a, body = _open_tyvar(ctx, a, body)
            check_pretype(sig, ctx.extend(TyBind(a)), body)
        case Qual(p, body):
            check_pretype(sig, ctx, p.lhs)
            check_pretype(sig, ctx, p.rhs)
            check_pretype(sig, ctx, body)
        case _:
            raise TypeError(f"check_pretype: not a type {ty!r}")


def check_ctx(sig: Signature, ctx: Context) -> None:
    """``|- ctx ctx``: distinct names, each binding valid under its prefix."""
    seen: set = set()
    prefix = Context()
    for b in ctx.bindings:
        if b.name in seen:
            raise fail("DuplicateBinding", f"{b.name} is bound twice", "G_" + _bind_kind(b))
        seen.add(b.name)
        try:
            if isinstance(b, CoBind):
                check_prop(sig, prefix, b.prop)
            elif isinstance(b, TmBind):
                check_type(sig, prefix, b.ty)
        except CheckError as err:
            d = err.diagnostic
            raise fail("IllFormedBindingType", f"binding {b.name}: {d.message}",
                       "G_" + _bind_kind(b)) from err
        prefix = prefix.extend(b)


def _bind_kind(b) -> str:
    return {"TyBind": "TyVar", "CoBind": "CoVar", "TmBind": "Var"}[type(b).__name__]


# --------------------------------------------------------------------------
# Coercions


def check_coercion(sig: Signature, ctx: Context, co) -> Prop:
    """Return the unique proposition ``co`` proves under ``ctx``."""
    match co:
        case Refl(ty):
            check_pretype(sig, ctx, ty)
            return Prop(ty, ty)
        case Sym(g):
            p = check_coercion(sig, ctx, g)
            return Prop(p.rhs, p.lhs)
        case Trans(g1, g2):
            p1 = check_coercion(sig, ctx, g1)
            p2 = check_coercion(sig, ctx, g2)
            if not alpha_eq(p1.rhs, p2.lhs):
                raise fail("TransMismatch",
                           f"cannot compose {p1} with {p2}: {p1.rhs} differs from {p2.lhs}",
                           "C_Trans")
            return Prop(p1.lhs, p2.rhs)
        case ConCong(h, args):
            _check_tycon(sig, h, args, "C_App")
            ps = [check_coercion(sig, ctx, g) for g in args]
            return Prop(TyCon(h, tuple(p.lhs for p in ps)), TyCon(h, tuple(p.rhs for p in ps)))
        case FamCong(f, args):
            _check_family(sig, f, len(args), "C_Fam")
            ps = [check_coercion(sig, ctx, g) for g in args]
            return Prop(FamApp(f, tuple(p.lhs for p in ps)), FamApp(f, tuple(p.rhs for p in ps)))
        case ArrowCong(g1, g2):
            p1 = check_coercion(sig, ctx, g1)
            p2 = check_coercion(sig, ctx, g2)
            return Prop(Arrow(p1.lhs, p2.lhs), Arrow(p1.rhs, p2.rhs))
        case ForallCong(a, g):
            a, g = _open_tyvar(ctx, a, g)
            p = check_coercion(sig, ctx.extend(TyBind(a)), g)
            return Prop(Forall(a, p.lhs), Forall(a, p.rhs))
        case QualCong(g1, g2, g3):
            p1 = check_coercion(sig, ctx, g1)
            p2 = check_coercion(sig, ctx, g2)
            p3 = check_coercion(sig, ctx, g3)
            return Prop(Qual(Prop(p1.lhs, p2.lhs), p3.lhs), Qual(Prop(p1.rhs, p2.rhs), p3.rhs))
        case Nth(i, g):
            return _nth(i, check_coercion(sig, ctx, g))
        case Inst(g, ty):
            p = check_coercion(sig, ctx, g)
            if not (isinstance(p.lhs, Forall) and isinstance(p.rhs, Forall)):
                raise fail("BadDecomposition", f"instantiation needs two foralls, got {p}", "C_Inst")
            check_type(sig, ctx, ty)
            return Prop(subst_types({p.lhs.var: ty}, p.lhs.body),
                        subst_types({p.rhs.var: ty}, p.rhs.body))
        case CoVar(c):
            p = ctx.covar(c)
            if p is None:
                raise fail("UnboundCoVar", f"coercion variable {c} is not in scope", "C_Var")
            return p
        case AxiomUse():
            return _check_axiom_use(sig, ctx, co)
    raise TypeError(f"check_coercion: not a coercion {co!r}")


def _nth(i: int, p: Prop) -> Prop:
    l, r = p.lhs, p.rhs
    if isinstance(l, TyCon) and isinstance(r, TyCon) and l.name == r.name \
            and len(l.args) == len(r.args):
        if 0 <= i < len(l.args):
            return Prop(l.args[i], r.args[i])
        raise fail("BadDecomposition", f"index {i} out of range for {l.name}", "C_Nth")
    if isinstance(l, Arrow) and isinstance(r, Arrow):
        if i == 0:
            return Prop(l.dom, r.dom)
        if i == 1:
            return Prop(l.cod, r.cod)
        raise fail("BadDecomposition", f"arrow decomposition index {i} is not 0 or 1", "C_NthArrow")
    if isinstance(l, Qual) and isinstance(r, Qual):
        parts_l = (l.prop.lhs, l.prop.rhs, l.body)
        parts_r = (r.prop.lhs, r.prop.rhs, r.body)
        if 0 <= i < 3:
            return Prop(parts_l[i], parts_r[i])
        raise fail("BadDecomposition", f"qualified decomposition index {i} is not 0, 1 or 2",
                   "C_NthQual")
    raise fail("BadDecomposition", f"cannot decompose {p} at index {i}", "C_Nth")


def _check_axiom_use(sig: Signature, ctx: Context, co: AxiomUse) -> Prop:
    eqs = sig.axioms.get(co.axiom)
    if eqs is None:
        raise fail("UnknownAxiom", f"axiom {co.axiom} is not declared", "C_Axiom")
    if not 0 <= co.index < len(eqs):
        raise fail("AxiomIndexOutOfRange",
                   f"axiom {co.axiom} has {len(eqs)} equation(s), index {co.index} requested",
                   "C_Axiom", axiom=co.axiom, index=co.index)
    eq = eqs[co.index]
    if len(co.tys) != len(eq.tyvars):
        raise fail("ArityMismatch",
                   f"{co.axiom}[{co.index}] quantifies {len(eq.tyvars)} type(s), got {len(co.tys)}",
                   "C_Axiom", axiom=co.axiom, index=co.index)
    for t in co.tys:
        check_type(sig, ctx, t)
    mapping = dict(zip(eq.tyvars, co.tys))
    try:
        mapping = _thread_resolutions(sig, ctx, co.resolutions, eq.assumps, mapping)
    except CheckError as err:
        raise fail("ResolutionMismatch", f"{co.axiom}[{co.index}]: {err.diagnostic.message}",
                   "C_Axiom", axiom=co.axiom, index=co.index) from err
    for j in range(co.index):
        if not no_conflict(eqs, co.index, co.tys, j):
            raise fail("ConflictWithEarlierEquation",
                       f"{co.axiom}[{co.index}] at {', '.join(map(str, co.tys))} "
                       f"conflicts with equation {j}", "C_Axiom", axiom=co.axiom, index=co.index)
    lhs = FamApp(eq.fam, tuple(subst_types(mapping, x) for x in eq.lhs_args))
    return Prop(lhs, subst_types(mapping, eq.rhs))


def _thread_resolutions(sig: Signature, ctx: Context, res: Sequence, chis: Sequence,
                        mapping: dict) -> dict:
    if len(res) != len(chis):
        raise fail("LengthMismatch", f"{len(res)} resolution(s) for {len(chis)} assumption(s)",
                   "A_Cons")
    mapping = dict(mapping)
    for q, chi in zip(res, chis):
        try:
            check_type(sig, ctx, q.witness)
        except CheckError as err:
            raise fail("ImproperWitness", f"witness {q.witness}: {err.diagnostic.message}",
                       "A_Cons") from err
        expected = Prop(FamApp(chi.fam, tuple(subst_types(mapping, x) for x in chi.args)),
                        q.witness)
        got = check_coercion(sig, ctx, q.proof)
        if not alpha_eq(got, expected):
            raise fail("ProofPropMismatch", f"proof shows {got}, expected {expected}", "A_Cons")
        mapping[chi.var] = q.witness
    return mapping


def check_resolutions(sig: Signature, ctx: Context, res: Sequence[EvalResolution],
                      chis: Sequence[EvalAssumption]) -> None:
    """``ctx |- res : chis``, threading each witness into later assumptions."""
    _thread_resolutions(sig, ctx, res, chis, {})


# --------------------------------------------------------------------------
# Expressions


def infer_expr(sig: Signature, ctx: Context, e):
    """Return the unique type of ``e`` under ``ctx``."""
    match e:
        case Var(x):
            ty = ctx.termvar(x)
            if ty is None:
                raise fail("UnboundVar", f"variable {x} is not in scope", "E_Var")
            return ty
        case Const(k):
            ty = sig.term_consts.get(k)
            if ty is None:
                raise fail("UnboundVar", f"constant {k} is not declared", "E_Const")
            return ty
        case Lam(x, ty, body):
            x, body = _open_termvar(ctx, x, body)
            check_type(sig, ctx, ty)
            return Arrow(ty, infer_expr(sig, ctx.extend(TmBind(x, ty)), body))
        case App(f, a):
            ft = infer_expr(sig, ctx, f)
            if not isinstance(ft, Arrow):
                raise fail("AppShapeMismatch", f"applying a term of type {ft}", "E_App")
            at = infer_expr(sig, ctx, a)
            if not alpha_eq(ft.dom, at):
                raise fail("ArgumentMismatch", f"expected argument of type {ft.dom}, got {at}",
                           "E_App")
            return ft.cod
        case TLam(a, body):
            a, body = _open_tyvar(ctx, a, body)
            return Forall(a, infer_expr(sig, ctx.extend(TyBind(a)), body))
        case TApp(f, ty):
            ft = infer_expr(sig, ctx, f)
            if not isinstance(ft, Forall):
                raise fail("AppShapeMismatch", f"type-applying a term of type {ft}", "E_TApp")
            check_type(sig, ctx, ty)
            return subst_types({ft.var: ty}, ft.body)
        case CLam(c, prop, body):
            c, body = _open_covar(ctx, c, body)
            check_prop(sig, ctx, prop)
            return Qual(prop, infer_expr(sig, ctx.extend(CoBind(c, prop)), body))
        case CApp(f, g):
            ft = infer_expr(sig, ctx, f)
            if not isinstance(ft, Qual):
                raise fail("AppShapeMismatch", f"coercion-applying a term of type {ft}", "E_CApp")
            p = check_coercion(sig, ctx, g)
            if not alpha_eq(p, ft.prop):
                raise fail("CoercionArgMismatch", f"expected a proof of {ft.prop}, got {p}",
                           "E_CApp")
            return ft.body
        case Cast(inner, g):
            t1 = infer_expr(sig, ctx, inner)
            p = check_coercion(sig, ctx, g)
            if not alpha_eq(p.lhs, t1):
                raise fail("CastPropMismatch", f"casting a term of type {t1} with {p}", "E_Cast")
            try:
                check_type(sig, ctx, p.rhs)
            except CheckError as err:
                raise fail("ImproperCastTarget", f"cast target {p.rhs} is not a proper type",
                           "E_Cast") from err
            return p.rhs
        case Assume(chi, body):
            info = _check_family(sig, chi.fam, len(chi.args), "E_Assume")
            if not info.total:
                raise fail("AssumeOnPartialFamily", f"{chi.fam} is not total", "E_Assume")
            a, c = chi.var, chi.covar
            if ctx.has_tyvar(a) or a in ctx.names():
                a2 = fresh_name(a, ctx.names() | {c})
                body = subst_apply(Subst(tys={a: TyVar(a2)}), body)
                a = a2
            if c in ctx.names() or c == a:
                c2 = fresh_name(c, ctx.names() | {a})
                body = subst_apply(Subst(cos={c: CoVar(c2)}), body)
                c = c2
            prop = Prop(FamApp(chi.fam, chi.args), TyVar(a))
            inner = ctx.extend(TyBind(a))
            check_prop(sig, inner, prop)
            ty = infer_expr(sig, inner.extend(CoBind(c, prop)), body)
            if a in ftv(ty):
                raise fail("SkolemEscape", f"assumption variable {a} escapes in {ty}", "E_Assume")
            return ty
    raise TypeError(f"infer_expr: not an expression {e!r}")


def well_typed(sig: Signature, e, ctx: Context = Context()) -> bool:
    try:
        infer_expr(sig, ctx, e)
        return True
    except CheckError:
        return False


__all__ = ["check_type", "check_prop", "check_pretype", "check_ctx", "check_coercion",
           "check_resolutions", "infer_expr", "well_typed"]
