"""Syntactic first-order unification, one-sided matching and apartness.

Family applications are compared syntactically, like constructors.  Binders
(``Forall``) are handled by opening both sides with a shared rigid skolem; a
flexible variable may never be bound to a type mentioning such a skolem.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence

from .syntax import (Arrow, FamApp, Forall, Qual, Subst, TyCon, TyVar,
                     alpha_eq, ftv, subst_types)

_skolems = itertools.count()


def _skolem() -> str:
    # '#' never occurs in parsed names, so skolems cannot collide.
    return f"#sk{next(_skolems)}"


def _is_skolem(name: str) -> bool:
    return name.startswith("#sk")


def _open_binders(s: Forall, t: Forall):
    sk = _skolem()
    return (subst_types({s.var: TyVar(sk)}, s.body),
            subst_types({t.var: TyVar(sk)}, t.body))


def unify(xs: Sequence, ys: Sequence, rigid: Iterable[str] = ()) -> Optional[Subst]:
    """Most general unifier of two equal-length type lists, or ``None``.

    The result is idempotent.  Variables in ``rigid`` behave as constants.

    >>> th = unify([TyVar('a'), TyVar('b')], [TyVar('b'), TyCon('Int')])
    >>> sorted((k, str(v)) for k, v in th.tys.items())
    [('a', 'Int'), ('b', 'Int')]
    """
    if len(xs) != len(ys):
        return None
    fixed = frozenset(rigid)
    sub: dict = {}
    work = list(zip(xs, ys))
    work.reverse()
    while work:
        s, t = work.pop()
        if sub:
            s = subst_types(sub, s)
            t = subst_types(sub, t)
        if s == t:
            continue
        if isinstance(s, TyVar) and s.name not in fixed and not _is_skolem(s.name):
            if not _bind(sub, s.name, t):
                return None
            continue
        if isinstance(t, TyVar) and t.name not in fixed and not _is_skolem(t.name):
            if not _bind(sub, t.name, s):
                return None
            continue
        pairs = _decompose(s, t)
        if pairs is None:
            return None
        work.extend(reversed(pairs))
    return Subst(tys=sub)


def _bind(sub: dict, v: str, t) -> bool:
    fv = ftv(t)
    if v in fv or any(_is_skolem(n) for n in fv):
        return False
    one = {v: t}
    for k in list(sub):
        sub[k] = subst_types(one, sub[k])
    sub[v] = t
    return True


def _decompose(s, t) -> Optional[list]:
    match s, t:
        case TyCon(h1, a1), TyCon(h2, a2) if h1 == h2 and len(a1) == len(a2):
            return list(zip(a1, a2))
        case FamApp(f1, a1), FamApp(f2, a2) if f1 == f2 and len(a1) == len(a2):
            return list(zip(a1, a2))
        case Arrow(d1, c1), Arrow(d2, c2):
            return [(d1, d2), (c1, c2)]
        case Qual(p1, b1), Qual(p2, b2):
            return [(p1.lhs, p2.lhs), (p1.rhs, p2.rhs), (b1, b2)]
        case Forall(), Forall():
            return [_open_binders(s, t)]
    return None


def match(pattern: Sequence, subject: Sequence,
          pattern_vars: Optional[Iterable[str]] = None) -> Optional[Subst]:
    """One-sided matching: ``theta`` with ``pattern[theta] == subject``.

    Only ``pattern_vars`` (default: the free variables of ``pattern``) may be
    bound; every variable of ``subject`` is rigid.
    """
    if len(pattern) != len(subject):
        return None
    flex = ftv(tuple(pattern)) if pattern_vars is None else frozenset(pattern_vars)
    sub: dict = {}
    for p, s in zip(pattern, subject):
        if not _match(p, s, flex, sub):
            return None
    return Subst(tys=sub)


def _match(p, s, flex: frozenset, sub: dict) -> bool:
    if isinstance(p, TyVar) and p.name in flex:
        if any(_is_skolem(n) for n in ftv(s)):
            return False
        prev = sub.get(p.name)
        if prev is None:
            sub[p.name] = s
            return True
        return alpha_eq(prev, s)
    match p, s:
        case TyVar(a), TyVar(b):
            return a == b
        case (TyCon(h1, a1), TyCon(h2, a2)) | (FamApp(h1, a1), FamApp(h2, a2)):
            if h1 != h2 or len(a1) != len(a2):
                return False
            return all(_match(x, y, flex, sub) for x, y in zip(a1, a2))
        case Arrow(d1, c1), Arrow(d2, c2):
            return _match(d1, d2, flex, sub) and _match(c1, c2, flex, sub)
        case Qual(p1, b1), Qual(p2, b2):
            return (_match(p1.lhs, p2.lhs, flex, sub) and _match(p1.rhs, p2.rhs, flex, sub)
                    and _match(b1, b2, flex, sub))
        case Forall(), Forall():
            pb, sb = _open_binders(p, s)
            return _match(pb, sb, flex, sub)
    return False


def apart(xs: Sequence, ys: Sequence) -> bool:
    """True iff the two lists have no unifier (all variables flexible)."""
    return unify(xs, ys) is None


def is_unifier(theta: Subst, xs: Sequence, ys: Sequence) -> bool:
    return all(alpha_eq(subst_types(theta.tys, x), subst_types(theta.tys, y))
               for x, y in zip(xs, ys)) and len(xs) == len(ys)


def is_idempotent(theta: Subst) -> bool:
    return all(alpha_eq(subst_types(theta.tys, t), t) for t in theta.tys.values())


__all__ = ["unify", "match", "apart", "is_unifier", "is_idempotent"]
