"""Surface layer: class tables, entailment, guarded well-formedness of surface
types, minimal-constraint inference, totality checking and the flattening of
surface family equations into kernel equations.

A partial family is *guarded* by a class: every use ``F ts`` must be justified
by entailing ``C ts`` from the predicates in scope.  Total families need no
guard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .diagnostics import CheckError, Diagnostic, fail
from .program import Constrained, Pred
from .syntax import (Arrow, Equation, EvalAssumption, FamApp, Forall, Prop, Qual, TyCon, TyVar,
                     fresh_name, ftv, subst_types)
from .unify import apart, match

ENTAIL_DEPTH = 32


# -- tables -------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    context: tuple          # of Pred
    head: Pred
    name: str = ""          # used to exclude an instance from its own check

    def vars(self) -> list:
        seen: list = []
        for x in self.head.args:
            for v in _ordered_ftv(x):
                if v not in seen:
                    seen.append(v)
        return seen


@dataclass
class ClassInfo:
    name: str
    params: tuple
    supers: tuple = ()            # Pred over params
    assoc: tuple = ()             # associated family names
    closed: bool = False
    instances: list = field(default_factory=list)

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class FamilyGuard:
    """How a surface family may be used: ``guard`` class or ``total``."""

    arity: int
    guard: Optional[str]
    total: bool = False


@dataclass(frozen=True)
class Derivation:
    pred: Pred
    by: str                       # assumption, superclass, instance
    source: str = ""
    premises: tuple = ()

    def lines(self, indent: int = 0) -> list:
        out = [" " * indent + f"{self.pred}  [{self.by}{': ' + self.source if self.source else ''}]"]
        for p in self.premises:
            out += p.lines(indent + 2)
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


@dataclass(frozen=True)
class Entailment:
    holds: bool
    derivation: Optional[Derivation] = None
    depth_exceeded: bool = False

    def __bool__(self) -> bool:
        return self.holds


class DepthExceeded(Exception):
    pass


@dataclass
class SurfaceEnv:
    """Type constants, classes, family guards and data kinds of one program."""

    ty_cons: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)       # F -> FamilyGuard
    kinds: dict = field(default_factory=dict)          # kind -> ((con, arg types), ...)
    max_depth: int = ENTAIL_DEPTH

    # -- entailment --------------------------------------------------------

    def superclass_closure(self, preds: Iterable[Pred]) -> dict:
        """Every predicate reachable through superclasses, with derivations."""
        out: dict = {}
        todo = [(p, Derivation(p, "assumption")) for p in preds]
        while todo:
            p, d = todo.pop(0)
            if p in out:
                continue
            out[p] = d
            info = self.classes.get(p.cls)
            if info is None or len(info.params) != len(p.args):
                continue
            sub = dict(zip(info.params, p.args))
            for s in info.supers:
                q = Pred(s.cls, tuple(subst_types(sub, x) for x in s.args))
                todo.append((q, Derivation(q, "superclass", f"of {p.cls}", (d,))))
        return out

    def entails(self, preds: Iterable[Pred], goal: Pred,
                exclude: Optional[str] = None) -> Entailment:
        """Whether ``preds`` entail ``goal`` using superclasses and instances.

        ``exclude`` names an instance left out of the search.
        """
        given = self.superclass_closure(preds)
        try:
            d = self._solve(goal, given, (), exclude)
        except DepthExceeded:
            return Entailment(False, None, True)
        return Entailment(d is not None, d)

    def _solve(self, goal: Pred, given: dict, stack: tuple, exclude) -> Optional[Derivation]:
        if goal in given:
            return given[goal]
        if goal in stack:
            return None
        if len(stack) >= self.max_depth:
            raise DepthExceeded(str(goal))
        info = self.classes.get(goal.cls)
        if info is None:
            return None
        stack = stack + (goal,)
        for inst in info.instances:
            if inst.name and inst.name == exclude:
                continue
            theta = match(inst.head.args, goal.args, inst.vars())
            if theta is None:
                if info.closed and not _heads_apart(inst.head.args, goal.args):
                    return None     # cannot commit past an instance that may still match
                continue
            premises = []
            ok = True
            for c in inst.context:
                sub = Pred(c.cls, tuple(subst_types(theta.tys, x) for x in c.args))
                d = self._solve(sub, given, stack, exclude)
                if d is None:
                    ok = False
                    break
                premises.append(d)
            if ok:
                return Derivation(goal, "instance", _show_instance(inst), tuple(premises))
            if info.closed:
                return None         # committed to this instance
        return None

    # -- well-formedness -----------------------------------------------------

    def guard_of(self, fam: str, args: tuple) -> Optional[Pred]:
        g = self.families.get(fam)
        if g is None or g.total or g.guard is None:
            return None
        return Pred(g.guard, args)

    def st_check_type(self, preds: Sequence[Pred], tyvars: Iterable[str], ty,
                      exclude: Optional[str] = None) -> None:
        """``preds | tyvars |- ty type``; raises :class:`CheckError`."""
        self._st(tuple(preds), frozenset(tyvars), ty, exclude)

    def _st(self, preds: tuple, scope: frozenset, ty, exclude) -> None:
        match ty:
            case TyVar(a):
                if a not in scope:
                    raise fail("UnboundTyVar", f"type variable {a} is not in scope", "ST_Var")
            case TyCon(h, args):
                n = self.ty_cons.get(h)
                if n is None:
                    raise fail("UndeclaredTyCon", f"type constant {h} is not declared",
                               "ST_TyCon")
                if n != len(args):
                    raise fail("ArityMismatch", f"{h} expects {n} argument(s), got {len(args)}",
                               "ST_TyCon")
                for x in args:
                    self._st(preds, scope, x, exclude)
            case FamApp(f, args):
                g = self.families.get(f)
                if g is None:
                    raise fail("UndeclaredFamily", f"type family {f} is not declared",
                               "ST_Family")
                if g.arity != len(args):
                    raise fail("ArityMismatch", f"{f} expects {g.arity} argument(s), "
                               f"got {len(args)}", "ST_Family")
                for x in args:
                    self._st(preds, scope, x, exclude)
                if g.total:
                    return
                if g.guard is None:
                    raise fail("UnguardedFamilyUse", f"{f} is partial and has no guard class",
                               "ST_Family")
                need = Pred(g.guard, args)
                res = self.entails(preds, need, exclude)
                if not res:
                    extra = " (search depth exceeded)" if res.depth_exceeded else ""
                    raise CheckError(Diagnostic(
                        "UnguardedFamilyUse", f"use of {ty} needs {need}, which the context "
                        f"does not entail{extra}", "ST_Family", extra={"predicate": str(need)}))
            case Arrow(a, b):
                self._st(preds, scope, a, exclude)
                self._st(preds, scope, b, exclude)
            case Forall(a, body):
                self._st(preds, scope | {a}, body, exclude)
            case Constrained(ps, body):
                for p in ps:
                    self._check_pred(preds, scope, p, exclude)
                self._st(preds + tuple(ps), scope, body, exclude)
            case Qual(p, body):
                self._st(preds, scope, p.lhs, exclude)
                self._st(preds, scope, p.rhs, exclude)
                self._st(preds, scope, body, exclude)
            case _:
                raise TypeError(f"st_check_type: not a surface type {ty!r}")

    def _check_pred(self, preds, scope, p: Pred, exclude) -> None:
        info = self.classes.get(p.cls)
        if info is None:
            raise fail("UndeclaredClass", f"class {p.cls} is not declared", "ST_Qual")
        if info.arity != len(p.args):
            raise fail("ArityMismatch", f"{p.cls} expects {info.arity} argument(s), "
                       f"got {len(p.args)}", "ST_Qual")
        for x in p.args:
            self._st(preds, scope, x, exclude)

    # -- inference -------------------------------------------------------------

    def infer_constraints(self, tyvars: Iterable[str], ty,
                          exclude: Optional[str] = None) -> tuple:
        """The smallest predicate set under which ``ty`` is well formed.

        Family uses are visited in source order; uses justified by the type's
        own qualified contexts are skipped.  A guard that mentions a variable
        bound inside ``ty`` cannot be lifted out and is reported.
        """
        scope = frozenset(tyvars)
        needed: list = []
        self._collect(ty, scope, frozenset(), (), needed, exclude)
        cands: list = []
        for p in needed:
            if p not in cands and not self.entails((), p, exclude):
                cands.append(p)
        kept = list(cands)
        for p in cands:
            rest = [q for q in kept if q != p]
            if self.entails(rest, p, exclude):
                kept = rest
        return tuple(kept)

    def _collect(self, ty, scope, inner: frozenset, local: tuple, out: list, exclude) -> None:
        match ty:
            case TyVar() :
                return
            case TyCon(_, args):
                for x in args:
                    self._collect(x, scope, inner, local, out, exclude)
            case FamApp(f, args):
                need = self.guard_of(f, args)
                if need is not None and not (local and self.entails(local, need, exclude)):
                    if set(ordered_ftv(*need.args)) & inner:
                        raise fail("UnliftableConstraint",
                                   f"{need} mentions a variable bound inside the type",
                                   "ST_Family")
                    out.append(need)
                for x in args:
                    self._collect(x, scope, inner, local, out, exclude)
            case Arrow(a, b):
                self._collect(a, scope, inner, local, out, exclude)
                self._collect(b, scope, inner, local, out, exclude)
            case Forall(a, body):
                self._collect(body, scope, inner | {a}, local, out, exclude)
            case Constrained(ps, body):
                for p in ps:
                    for x in p.args:
                        self._collect(x, scope, inner, local, out, exclude)
                self._collect(body, scope, inner, local + tuple(ps), out, exclude)
            case Qual(p, body):
                self._collect(p.lhs, scope, inner, local, out, exclude)
                self._collect(p.rhs, scope, inner, local, out, exclude)
                self._collect(body, scope, inner, local, out, exclude)
            case _:
                raise TypeError(f"infer_constraints: not a surface type {ty!r}")


def _heads_apart(xs: tuple, ys: tuple) -> bool:
    avoid = set().union(*(ftv(y) for y in ys)) if ys else set()
    ren = {}
    for v in set().union(*(ftv(x) for x in xs)) if xs else ():
        if v in avoid:
            ren[v] = TyVar(fresh_name(v, avoid | set(ren)))
    xs = tuple(subst_types(ren, x) for x in xs)
    return apart(xs, ys)


def _show_instance(inst: Instance) -> str:
    from .printer import _show_context, show_pred
    return "instance " + _show_context(inst.context) + show_pred(inst.head)


def _ordered_ftv(t) -> list:
    out: list = []

    def go(x, bound):
        match x:
            case TyVar(a):
                if a not in bound and a not in out:
                    out.append(a)
            case TyCon(_, args) | FamApp(_, args):
                for y in args:
                    go(y, bound)
            case Arrow(a, b):
                go(a, bound)
                go(b, bound)
            case Forall(a, body):
                go(body, bound | {a})
            case Qual(p, body):
                go(p.lhs, bound)
                go(p.rhs, bound)
                go(body, bound)
            case Constrained(ps, body):
                for p in ps:
                    for y in p.args:
                        go(y, bound)
                go(body, bound)
            case Pred(_, args):
                for y in args:
                    go(y, bound)
    go(t, frozenset())
    return out


def ordered_ftv(*ts) -> list:
    """Free type variables in order of first occurrence."""
    out: list = []
    for t in ts:
        for v in _ordered_ftv(t):
            if v not in out:
                out.append(v)
    return out


# -- flattening ---------------------------------------------------------------


def flatten_equation(fam: str, lhs: Sequence, rhs) -> Equation:
    """Kernel equation for ``fam lhs = rhs``: every family application in the
    right-hand side becomes an evaluation assumption, innermost first."""
    tyvars = tuple(ordered_ftv(*lhs))
    taken = set(tyvars) | set(ordered_ftv(rhs))
    assumps: list = []

    def go(t, bound: frozenset):
        match t:
            case TyVar():
                return t
            case TyCon(h, args):
                return TyCon(h, tuple(go(x, bound) for x in args))
            case FamApp(f, args):
                flat = tuple(go(x, bound) for x in args)
                if any(ftv(x) & bound for x in flat):
                    raise fail("FamilyUnderBinder", f"{t} mentions a variable bound inside "
                               "the right-hand side")
                r = fresh_name("r", taken)
                taken.add(r)
                c = f"c{len(assumps)}"
                assumps.append(EvalAssumption(r, c, f, flat))
                return TyVar(r)
            case Arrow(a, b):
                return Arrow(go(a, bound), go(b, bound))
            case Forall(a, body):
                return Forall(a, go(body, bound | {a}))
            case Qual(p, body):
                return Qual(Prop(go(p.lhs, bound), go(p.rhs, bound)), go(body, bound))
        raise fail("BadFamilyRHS", f"{t} is not allowed in a family right-hand side")

    flat_rhs = go(rhs, frozenset())
    return Equation(tyvars, tuple(assumps), fam, tuple(lhs), flat_rhs)


def family_calls(t) -> list:
    """``(family, args)`` for every family application in ``t``, preorder."""
    out: list = []

    def go(x):
        match x:
            case FamApp(f, args):
                out.append((f, args))
                for y in args:
                    go(y)
            case TyCon(_, args):
                for y in args:
                    go(y)
            case Arrow(a, b):
                go(a)
                go(b)
            case Forall(_, body):
                go(body)
            case Qual(p, body):
                go(p.lhs)
                go(p.rhs)
                go(body)
    go(t)
    return out


# -- totality ---------------------------------------------------------------------


@dataclass(frozen=True)
class TotalityResult:
    total: bool
    reason: Optional[str] = None
    uncovered: Optional[tuple] = None
    unsafe: bool = False

    def __bool__(self) -> bool:
        return self.total


WILD = TyVar("_")


def _kind_of(ty, kinds: dict) -> Optional[str]:
    if isinstance(ty, TyCon) and not ty.args and ty.name in kinds:
        return ty.name
    return None


def _useful(rows: list, col_kinds: list, kinds: dict) -> Optional[list]:
    """A value vector not matched by any row, or ``None`` (Maranget's U)."""
    if not col_kinds:
        return None if rows else []
    k = col_kinds[0]
    cons = kinds.get(k) if k is not None else None
    heads = [r[0] for r in rows]
    used = {h.name for h in heads if isinstance(h, TyCon)}
    if cons is not None and used >= {c for c, _ in cons}:
        for c, cargs in cons:
            sub_kinds = [_kind_of(a, kinds) for a in cargs]
            n = len(cargs)
            specialized = []
            for r in rows:
                h = r[0]
                if isinstance(h, TyVar):
                    specialized.append([WILD] * n + r[1:])
                elif h.name == c and len(h.args) == n:
                    specialized.append(list(h.args) + r[1:])
            w = _useful(specialized, sub_kinds + col_kinds[1:], kinds)
            if w is not None:
                return [TyCon(c, tuple(w[:n]))] + w[n:]
        return None
    default = [r[1:] for r in rows if isinstance(r[0], TyVar)]
    w = _useful(default, col_kinds[1:], kinds)
    if w is None:
        return None
    if cons is not None:
        c, cargs = next((c, a) for c, a in cons if c not in used)
        return [TyCon(c, tuple(WILD for _ in cargs))] + w
    return [WILD] + w


def _linear(lhs: Sequence) -> bool:
    seen: list = []

    def go(t):
        if isinstance(t, TyVar):
            seen.append(t.name)
        elif isinstance(t, TyCon):
            for x in t.args:
                go(x)
    for x in lhs:
        go(x)
    return len(seen) == len(set(seen))


def _strict_subterm(x, pat) -> bool:
    if not isinstance(pat, TyCon):
        return False
    return any(x == a or _strict_subterm(x, a) for a in pat.args)


def check_totality(fam: str, params: Sequence, equations: Sequence, kinds: dict,
                   total_families: Iterable[str] = (), pragma: bool = False) -> TotalityResult:
    """Coverage plus structural recursion.

    ``params`` holds ``(name, kind-or-None)``; ``equations`` holds
    ``(lhs, rhs)`` pairs.  Every self-call must shrink one fixed argument
    position across all equations; calls to other families must target
    families already known to be total.
    """
    res = _check_totality(fam, params, equations, kinds, set(total_families))
    if pragma and not res.total:
        return TotalityResult(True, res.reason, res.uncovered, unsafe=True)
    return res


def _check_totality(fam, params, equations, kinds, totals) -> TotalityResult:
    from .printer import show_type
    col_kinds = [k if k in kinds else None for _, k in params]
    rows = [list(lhs) for lhs, _ in equations if len(lhs) == len(params) and _linear(lhs)]
    w = _useful(rows, col_kinds, kinds)
    if w is not None:
        pat = " ".join([fam, *(show_type(x, 2) for x in w)])
        return TotalityResult(False, f"equations do not cover {pat}", tuple(w))
    self_calls = []
    for lhs, rhs in equations:
        for f, args in family_calls(rhs):
            if f == fam:
                self_calls.append((lhs, args))
            elif f not in totals:
                return TotalityResult(False, f"right-hand side calls {f}, which is not known "
                                      "to be total")
    if self_calls:
        ok_positions = [i for i in range(len(params))
                        if all(i < len(lhs) and _strict_subterm(args[i], lhs[i])
                               for lhs, args in self_calls)]
        if not ok_positions:
            lhs, args = self_calls[0]
            call = " ".join([fam, *(show_type(x, 2) for x in args)])
            return TotalityResult(False, f"recursive call {call} does not shrink an argument "
                                  "position shared by all recursive calls")
    return TotalityResult(True)
