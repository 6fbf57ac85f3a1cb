"""Equation compatibility and the closed-family conflict check."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .syntax import (Equation, EvalAssumption, TyVar, alpha_eq, expand_assumptions,
                     fresh_name, ftv, subst_types)
from .unify import apart, unify


def equation_vars(eq: Equation) -> set:
    return set(eq.tyvars) | {chi.var for chi in eq.assumps}


def rename_equation(eq: Equation, avoid: Iterable[str]) -> Equation:
    """Rename the equation's type variables and assumption binders away from
    ``avoid``."""
    taken = set(avoid) | equation_vars(eq)
    ren: dict = {}
    for a in (*eq.tyvars, *(chi.var for chi in eq.assumps)):
        b = fresh_name(a, taken)
        taken.add(b)
        ren[a] = TyVar(b)
    # Assumption args only see tyvars and earlier assumption vars, so a single
    # simultaneous renaming is safe.
    chis = tuple(EvalAssumption(ren[chi.var].name, chi.covar, chi.fam,
                                tuple(subst_types(ren, x) for x in chi.args))
                 for chi in eq.assumps)
    return Equation(tuple(ren[a].name for a in eq.tyvars), chis, eq.fam,
                    tuple(subst_types(ren, x) for x in eq.lhs_args),
                    subst_types(ren, eq.rhs))


@lru_cache(maxsize=65536)
def compat(e1: Equation, e2: Equation) -> bool:
    """Co_Distinct when the left-hand sides are apart, otherwise Co_Coinc:
    the right-hand sides, with assumption variables expanded back into family
    applications, coincide under the unifier."""
    if e1.fam != e2.fam:
        return True
    if equation_vars(e1) & equation_vars(e2):
        e2 = rename_equation(e2, equation_vars(e1))
    theta = unify(e1.lhs_args, e2.lhs_args)
    if theta is None:
        return True
    r1 = subst_types(theta.tys, subst_types(expand_assumptions(e1.assumps), e1.rhs))
    r2 = subst_types(theta.tys, subst_types(expand_assumptions(e2.assumps), e2.rhs))
    return alpha_eq(r1, r2)


def no_conflict(eqs: Sequence[Equation], i: int, rho: Sequence, j: int) -> bool:
    """May equation ``i`` instantiated at ``rho`` fire despite earlier ``j``?

    Variables occurring in ``rho`` are treated as unknowns, so the answer is
    stable under any further instantiation of them.
    """
    ei, ej = eqs[i], eqs[j]
    target = tuple(subst_types(dict(zip(ei.tyvars, rho)), x) for x in ei.lhs_args)
    clash = ftv(target)
    if clash & equation_vars(ej):
        ej = rename_equation(ej, clash)
    if apart(ej.lhs_args, target):
        return True
    return compat(ei, eqs[j])
