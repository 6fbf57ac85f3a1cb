"""Signature validity and the good-signature conditions.

Both checks report every problem they find rather than stopping at the first;
an empty list means the signature is accepted.
"""

from __future__ import annotations

from collections import defaultdict

from .conflict import compat, no_conflict, rename_equation
from .diagnostics import CheckError, Diagnostic
from .syntax import (Context, Equation, Signature, TyBind, TyCon, ftv, is_family_free)
from .typecheck import check_type

__all__ = ["check_signature", "check_good_signature", "check_all", "compat", "no_conflict"]


def _diag(code: str, msg: str, rule: str, ax: str, i=None) -> Diagnostic:
    return Diagnostic(code, msg, rule, axiom=ax, index=i)


def _ctx(names) -> Context:
    ctx = Context()
    for a in names:
        if not ctx.has_tyvar(a):
            ctx = ctx.extend(TyBind(a))
    return ctx


def _proper(sig: Signature, ctx: Context, ty, fam_code: str, what: str, ax: str, i: int):
    """Diagnostics for one lhs argument or rhs under the equation's scope."""
    if not is_family_free(ty):
        return [_diag(fam_code, f"family application in {what} {ty}", "D_Axiom", ax, i)]
    try:
        check_type(sig, ctx, ty)
    except CheckError as err:
        d = err.diagnostic
        code = "IllScopedEquation" if d.code == "UnboundTyVar" else d.code
        return [_diag(code, f"{what} {ty}: {d.message}", "D_Axiom", ax, i)]
    return []


def _check_assumptions(sig: Signature, eq: Equation, ax: str, i: int) -> list:
    out = []
    scope = list(eq.tyvars)
    covars: set = set()
    for n, chi in enumerate(eq.assumps):
        where = f"assumption {n} ({chi.var} | {chi.covar} : {chi.fam} ...)"
        info = sig.families.get(chi.fam)
        if info is None:
            out.append(_diag("BadAssumption", f"{where}: family {chi.fam} is not declared",
                             "X_Cons", ax, i))
        elif info.arity != len(chi.args):
            out.append(_diag("BadAssumption", f"{where}: {chi.fam} expects {info.arity} "
                             f"argument(s), got {len(chi.args)}", "X_Cons", ax, i))
        if chi.var in scope:
            out.append(_diag("BadAssumption", f"{where}: binder {chi.var} is already bound",
                             "X_Cons", ax, i))
        if chi.covar in covars:
            out.append(_diag("BadAssumption", f"{where}: coercion binder {chi.covar} repeats",
                             "X_Cons", ax, i))
        covars.add(chi.covar)
        ctx = _ctx(scope)
        for x in chi.args:
            if not is_family_free(x):
                out.append(_diag("BadAssumption", f"{where}: argument {x} mentions a family",
                                 "X_Cons", ax, i))
                continue
            try:
                check_type(sig, ctx, x)
            except CheckError as err:
                out.append(_diag("BadAssumption", f"{where}: {err.diagnostic.message}",
                                 "X_Cons", ax, i))
        scope.append(chi.var)
    return out


def check_signature(sig: Signature) -> list[Diagnostic]:
    """Every problem that prevents ``|- sig ok``."""
    out: list = []
    for k, ty in sig.term_consts.items():
        try:
            check_type(sig, Context(), ty)
            if not isinstance(ty, TyCon):
                raise CheckError(Diagnostic("BadConstType", f"{ty} is not a type constant "
                                            "application"))
        except CheckError as err:
            d = err.diagnostic
            out.append(Diagnostic("BadConstType", f"constant {k} : {ty}: {d.message}", "D_Const"))
    for ax, eqs in sig.axioms.items():
        for i, eq in enumerate(eqs):
            info = sig.families.get(eq.fam)
            if info is None:
                out.append(_diag("UndeclaredFamily", f"type family {eq.fam} is not declared",
                                 "D_Axiom", ax, i))
                continue
            if info.arity != len(eq.lhs_args):
                out.append(_diag("ArityMismatch", f"{eq.fam} expects {info.arity} argument(s), "
                                 f"got {len(eq.lhs_args)}", "D_Axiom", ax, i))
            if len(set(eq.tyvars)) != len(eq.tyvars):
                out.append(_diag("IllScopedEquation", "repeated quantified variable",
                                 "D_Axiom", ax, i))
            out += _check_assumptions(sig, eq, ax, i)
            lhs_ctx = _ctx(eq.tyvars)
            for x in eq.lhs_args:
                out += _proper(sig, lhs_ctx, x, "FamilyInLHS", "left-hand argument", ax, i)
            rhs_ctx = _ctx([*eq.tyvars, *(chi.var for chi in eq.assumps)])
            out += _proper(sig, rhs_ctx, eq.rhs, "FamilyInRHS", "right-hand side", ax, i)
    return out


def check_good_signature(sig: Signature) -> list[Diagnostic]:
    """The four side conditions that make reduction well behaved."""
    out: list = []
    by_family: dict = defaultdict(list)
    for ax, eqs in sig.axioms.items():
        if not eqs:
            continue
        fams = {eq.fam for eq in eqs}
        if len(fams) > 1:
            out.append(_diag("MixedFamilyAxiom",
                             f"equations over {', '.join(sorted(fams))} share one axiom",
                             "Good-1", ax))
        for i, eq in enumerate(eqs):
            lhs_vars = set().union(*(ftv(x) for x in eq.lhs_args)) if eq.lhs_args else set()
            bound = set(eq.tyvars)
            if lhs_vars != bound:
                extra = sorted(lhs_vars - bound)
                unused = sorted(bound - lhs_vars)
                parts = ([f"unbound {', '.join(extra)}"] if extra else []) + \
                        ([f"unused {', '.join(unused)}"] if unused else [])
                out.append(_diag("UnboundOrUnusedTyVar", "; ".join(parts), "Good-2", ax, i))
        by_family[eqs[0].fam].append(ax)
    for fam, axs in by_family.items():
        if len(axs) > 1:
            for ax in axs:
                if len(sig.axioms[ax]) > 1:
                    others = ", ".join(a for a in axs if a != ax)
                    out.append(_diag("ClosedFamilyClash", f"closed axiom {ax} for {fam} "
                                     f"coexists with {others}", "Good-3", ax))
        singles = [ax for ax in axs if len(sig.axioms[ax]) == 1]
        for n, a1 in enumerate(singles):
            for a2 in singles[n + 1:]:
                e1, e2 = sig.axioms[a1][0], sig.axioms[a2][0]
                if not compat(e1, rename_equation(e2, set(e1.tyvars))):
                    out.append(_diag("IncompatibleOpenEquations",
                                     f"{a1} and {a2} overlap with different right-hand sides",
                                     "Good-4", a2, 0))
    return out


def check_all(sig: Signature) -> list[Diagnostic]:
    """Signature validity followed, when that passes, by the good-signature
    conditions."""
    return check_signature(sig) or check_good_signature(sig)
