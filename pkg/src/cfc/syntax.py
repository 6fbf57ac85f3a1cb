"""Abstract syntax of the core calculus.

Every node is an immutable dataclass.  Binders are named; alpha-equivalence
and capture-avoiding substitution are provided here so that the rest of the
package never has to think about variable capture.

Three independent namespaces exist: type variables, coercion variables and
term variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

# --------------------------------------------------------------------------
# Types and propositions


@dataclass(frozen=True, slots=True)
class TyCon:
    """Saturated type-constant application ``H t1 .. tn``."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class TyVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Forall:
    var: str
    body: "Type"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Prop:
    """An equality proposition ``lhs ~ rhs``."""

    lhs: "Type"
    rhs: "Type"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Qual:
    """Qualified type ``(t1 ~ t2) => t``."""

    prop: Prop
    body: "Type"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class FamApp:
    """Type family application ``F t1 .. tn``."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return _show(self)


Type = Union[TyCon, Arrow, TyVar, Forall, Qual, FamApp]
TYPE_CLASSES = (TyCon, Arrow, TyVar, Forall, Qual, FamApp)

# --------------------------------------------------------------------------
# Evaluation assumptions and resolutions


@dataclass(frozen=True, slots=True)
class EvalAssumption:
    """``(var | covar : fam args ~ var)``; binds ``var`` and ``covar``."""

    var: str
    covar: str
    fam: str
    args: tuple

    def prop(self) -> Prop:
        return Prop(FamApp(self.fam, self.args), TyVar(self.var))

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class EvalResolution:
    """``(witness | proof)`` discharging one evaluation assumption."""

    witness: "Type"
    proof: "Coercion"

    def __str__(self) -> str:
        return _show(self)


# --------------------------------------------------------------------------
# Coercions


@dataclass(frozen=True, slots=True)
class Refl:
    ty: Type

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Sym:
    co: "Coercion"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Trans:
    first: "Coercion"
    second: "Coercion"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class ConCong:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class ArrowCong:
    dom: "Coercion"
    cod: "Coercion"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class ForallCong:
    var: str
    body: "Coercion"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class QualCong:
    left: "Coercion"
    right: "Coercion"
    body: "Coercion"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class FamCong:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Nth:
    """Decomposition.  Index 0/1 pick domain/codomain of an arrow, 0/1/2 pick
    the two proposition sides and the body of a qualified type."""

    index: int
    co: "Coercion"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Inst:
    co: "Coercion"
    ty: Type

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class CoVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class AxiomUse:
    axiom: str
    index: int
    tys: tuple = ()
    resolutions: tuple = ()

    def __str__(self) -> str:
        return _show(self)


Coercion = Union[Refl, Sym, Trans, ConCong, ArrowCong, ForallCong, QualCong,
                 FamCong, Nth, Inst, CoVar, AxiomUse]
COERCION_CLASSES = (Refl, Sym, Trans, ConCong, ArrowCong, ForallCong, QualCong,
                    FamCong, Nth, Inst, CoVar, AxiomUse)

# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    ty: Type
    body: "Expr"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class App:
    fn: "Expr"
    arg: "Expr"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class TLam:
    var: str
    body: "Expr"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class TApp:
    fn: "Expr"
    ty: Type

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class CLam:
    covar: str
    prop: Prop
    body: "Expr"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class CApp:
    fn: "Expr"
    co: Coercion

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Cast:
    expr: "Expr"
    co: Coercion

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class Assume:
    assumption: EvalAssumption
    body: "Expr"

    def __str__(self) -> str:
        return _show(self)


Expr = Union[Var, Const, Lam, App, TLam, TApp, CLam, CApp, Cast, Assume]
EXPR_CLASSES = (Var, Const, Lam, App, TLam, TApp, CLam, CApp, Cast, Assume)

# --------------------------------------------------------------------------
# Equations, signatures, contexts


@dataclass(frozen=True, slots=True)
class Equation:
    """``forall tyvars assumps. fam lhs_args ~ rhs``."""

    tyvars: tuple
    assumps: tuple
    fam: str
    lhs_args: tuple
    rhs: Type

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True, slots=True)
class FamilyInfo:
    arity: int
    total: bool = False


@dataclass(frozen=True)
class Signature:
    """Declared type constants, term constants, families and axioms.

    Mappings preserve declaration order; axiom order matters for closed
    families.
    """

    ty_cons: Mapping[str, int] = field(default_factory=dict)
    term_consts: Mapping[str, Type] = field(default_factory=dict)
    families: Mapping[str, FamilyInfo] = field(default_factory=dict)
    axioms: Mapping[str, tuple] = field(default_factory=dict)

    def axioms_for(self, fam: str) -> list[tuple[str, tuple]]:
        return [(name, eqs) for name, eqs in self.axioms.items()
                if eqs and eqs[0].fam == fam]

    def __hash__(self) -> int:
        return id(self)

    def __eq__(self, other: object) -> bool:
        return self is other


@dataclass(frozen=True, slots=True)
class TyBind:
    name: str


@dataclass(frozen=True, slots=True)
class CoBind:
    name: str
    prop: Prop


@dataclass(frozen=True, slots=True)
class TmBind:
    name: str
    ty: Type


Binding = Union[TyBind, CoBind, TmBind]


class Context:
    """An ordered typing context with O(1) lookup per namespace."""

    __slots__ = ("bindings", "_tys", "_cos", "_tms")

    def __init__(self, bindings: Iterable[Binding] = ()):
        self.bindings: tuple = tuple(bindings)
        self._tys: frozenset = frozenset(b.name for b in self.bindings if isinstance(b, TyBind))
        self._cos: dict = {b.name: b.prop for b in self.bindings if isinstance(b, CoBind)}
        self._tms: dict = {b.name: b.ty for b in self.bindings if isinstance(b, TmBind)}

    def extend(self, b: Binding) -> "Context":
        new = Context.__new__(Context)
        new.bindings = self.bindings + (b,)
        if isinstance(b, TyBind):
            new._tys, new._cos, new._tms = self._tys | {b.name}, self._cos, self._tms
        elif isinstance(b, CoBind):
            new._tys, new._cos, new._tms = self._tys, {**self._cos, b.name: b.prop}, self._tms
        else:
            new._tys, new._cos, new._tms = self._tys, self._cos, {**self._tms, b.name: b.ty}
        return new

    def has_tyvar(self, a: str) -> bool:
        return a in self._tys

    def covar(self, c: str) -> Optional[Prop]:
        return self._cos.get(c)

    def termvar(self, x: str) -> Optional[Type]:
        return self._tms.get(x)

    def tyvars(self) -> frozenset:
        return self._tys

    def names(self) -> set:
        return set(self._tys) | set(self._cos) | set(self._tms)

    def __len__(self) -> int:
        return len(self.bindings)

    def __repr__(self) -> str:
        return f"Context({list(self.bindings)!r})"


EMPTY_CTX = Context()

# --------------------------------------------------------------------------
# Free variables


def ftv(t) -> frozenset:
    """Free type variables of any syntax node."""
    out: set = set()
    _ftv(t, frozenset(), out)
    return frozenset(out)


def _ftv(t, bound: frozenset, out: set) -> None:
    match t:
        case TyVar(a):
            if a not in bound:
                out.add(a)
        case TyCon(_, args) | FamApp(_, args) | ConCong(_, args) | FamCong(_, args):
            for x in args:
                _ftv(x, bound, out)
        case Arrow(d, c):
            _ftv(d, bound, out)
            _ftv(c, bound, out)
        case Forall(a, body) | ForallCong(a, body) | TLam(a, body):
            _ftv(body, bound | {a}, out)
        case Qual(p, body):
            _ftv(p, bound, out)
            _ftv(body, bound, out)
        case Prop(l, r):
            _ftv(l, bound, out)
            _ftv(r, bound, out)
        case Refl(ty):
            _ftv(ty, bound, out)
        case Sym(co) | Nth(_, co):
            _ftv(co, bound, out)
        case Trans(a, b) | ArrowCong(a, b):
            _ftv(a, bound, out)
            _ftv(b, bound, out)
        case QualCong(a, b, c):
            _ftv(a, bound, out)
            _ftv(b, bound, out)
            _ftv(c, bound, out)
        case Inst(co, ty):
            _ftv(co, bound, out)
            _ftv(ty, bound, out)
        case CoVar() | Var() | Const():
            pass
        case AxiomUse(_, _, tys, res):
            for x in tys:
                _ftv(x, bound, out)
            for q in res:
                _ftv(q, bound, out)
        case EvalResolution(w, p):
            _ftv(w, bound, out)
            _ftv(p, bound, out)
        case EvalAssumption(_, _, _, args):
            for x in args:
                _ftv(x, bound, out)
        case Lam(_, ty, body):
            _ftv(ty, bound, out)
            _ftv(body, bound, out)
        case App(f, a):
            _ftv(f, bound, out)
            _ftv(a, bound, out)
        case TApp(f, ty):
            _ftv(f, bound, out)
            _ftv(ty, bound, out)
        case CLam(_, p, body):
            _ftv(p, bound, out)
            _ftv(body, bound, out)
        case CApp(e, co) | Cast(e, co):
            _ftv(e, bound, out)
            _ftv(co, bound, out)
        case Assume(chi, body):
            _ftv(chi, bound, out)
            _ftv(body, bound | {chi.var}, out)
        case Equation(tvs, chis, _, lhs, rhs):
            inner = bound | set(tvs)
            for x in lhs:
                _ftv(x, inner, out)
            for chi in chis:
                _ftv(chi, inner, out)
                inner = inner | {chi.var}
            _ftv(rhs, inner, out)
        case tuple() | list():
            for x in t:
                _ftv(x, bound, out)
        case _:
            raise TypeError(f"ftv: unexpected node {t!r}")


def fcv(t) -> frozenset:
    """Free coercion variables of a coercion or expression."""
    out: set = set()
    _fcv(t, frozenset(), out)
    return frozenset(out)


def _fcv(t, bound: frozenset, out: set) -> None:
    match t:
        case CoVar(c):
            if c not in bound:
                out.add(c)
        case ConCong(_, args) | FamCong(_, args):
            for x in args:
                _fcv(x, bound, out)
        case Refl() | Var() | Const():
            pass
        case Sym(co) | Nth(_, co) | Inst(co, _) | ForallCong(_, co):
            _fcv(co, bound, out)
        case Trans(a, b) | ArrowCong(a, b) | App(a, b):
            _fcv(a, bound, out)
            _fcv(b, bound, out)
        case QualCong(a, b, c):
            _fcv(a, bound, out)
            _fcv(b, bound, out)
            _fcv(c, bound, out)
        case AxiomUse(_, _, _, res):
            for q in res:
                _fcv(q.proof, bound, out)
        case EvalResolution(_, p):
            _fcv(p, bound, out)
        case Lam(_, _, body) | TLam(_, body) | TApp(body, _):
            _fcv(body, bound, out)
        case CLam(c, _, body):
            _fcv(body, bound | {c}, out)
        case CApp(e, co) | Cast(e, co):
            _fcv(e, bound, out)
            _fcv(co, bound, out)
        case Assume(chi, body):
            _fcv(body, bound | {chi.covar}, out)
        case _ if isinstance(t, TYPE_CLASSES) or isinstance(t, Prop):
            pass
        case _:
            raise TypeError(f"fcv: unexpected node {t!r}")


def fxv(t) -> frozenset:
    """Free term variables of an expression."""
    out: set = set()
    _fxv(t, frozenset(), out)
    return frozenset(out)


def _fxv(t, bound: frozenset, out: set) -> None:
    match t:
        case Var(x):
            if x not in bound:
                out.add(x)
        case Const():
            pass
        case Lam(x, _, body):
            _fxv(body, bound | {x}, out)
        case App(f, a):
            _fxv(f, bound, out)
            _fxv(a, bound, out)
        case TLam(_, e) | TApp(e, _) | CLam(_, _, e) | CApp(e, _) | Cast(e, _) | Assume(_, e):
            _fxv(e, bound, out)
        case _:
            raise TypeError(f"fxv: unexpected node {t!r}")


def is_closed_type(t: Type) -> bool:
    return not ftv(t)


# --------------------------------------------------------------------------
# Fresh names

_SUFFIX = re.compile(r"'\d*$")


def fresh_name(base: str, avoid) -> str:
    """A variant of ``base`` not in ``avoid``: ``a'``, ``a'2``, ``a'3`` ..."""
    stem = _SUFFIX.sub("", base) or "v"
    cand = stem + "'"
    n = 1
    while cand in avoid:
        n += 1
        cand = f"{stem}'{n}"
    return cand


# --------------------------------------------------------------------------
# Substitution


class Subst:
    """Simultaneous substitution for the three namespaces."""

    __slots__ = ("tys", "cos", "tms", "_rtv", "_rcv", "_rxv")

    def __init__(self, tys: Optional[Mapping] = None, cos: Optional[Mapping] = None,
                 tms: Optional[Mapping] = None):
        self.tys = dict(tys or {})
        self.cos = dict(cos or {})
        self.tms = dict(tms or {})
        self._rtv = self._rcv = self._rxv = None

    def is_empty(self) -> bool:
        return not (self.tys or self.cos or self.tms)

    def range_tv(self) -> frozenset:
        if self._rtv is None:
            s: set = set()
            for x in (*self.tys.values(), *self.cos.values(), *self.tms.values()):
                _ftv(x, frozenset(), s)
            self._rtv = frozenset(s)
        return self._rtv

    def range_cv(self) -> frozenset:
        if self._rcv is None:
            s: set = set()
            for x in (*self.cos.values(), *self.tms.values()):
                _fcv(x, frozenset(), s)
            self._rcv = frozenset(s)
        return self._rcv

    def range_xv(self) -> frozenset:
        if self._rxv is None:
            s: set = set()
            for x in self.tms.values():
                _fxv(x, frozenset(), s)
            self._rxv = frozenset(s)
        return self._rxv

    def _with(self, tys=None, cos=None, tms=None) -> "Subst":
        new = Subst.__new__(Subst)
        new.tys = self.tys if tys is None else tys
        new.cos = self.cos if cos is None else cos
        new.tms = self.tms if tms is None else tms
        # Ranges only shrink or gain fresh renamings, tracked by callers.
        new._rtv, new._rcv, new._rxv = self._rtv, self._rcv, self._rxv
        return new

    def __repr__(self) -> str:
        parts = [f"{v}/{k}" for k, v in self.tys.items()]
        parts += [f"{v}/{k}" for k, v in self.cos.items()]
        parts += [f"{v}/{k}" for k, v in self.tms.items()]
        return "{" + ", ".join(parts) + "}"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Subst) and self.tys == other.tys
                and self.cos == other.cos and self.tms == other.tms)

    def __hash__(self):
        raise TypeError("Subst is unhashable")


def subst_types(mapping: Mapping[str, Type], t):
    """Shorthand for a type-only substitution."""
    if not mapping:
        return t
    return subst_apply(Subst(tys=mapping), t)


def subst_apply(theta: Subst, t):
    """Capture-avoiding simultaneous application of ``theta`` to ``t``."""
    if theta.is_empty():
        return t
    return _sub(t, theta)


def _under_tyvar(a: str, theta: Subst, body) -> tuple[str, Subst]:
    """Prepare to go under a type-variable binder ``a`` scoping over ``body``."""
    tys = theta.tys
    if a in tys:
        tys = dict(tys)
        del tys[a]
    if a in theta.range_tv():
        avoid = set(theta.range_tv()) | ftv(body) | set(tys)
        b = fresh_name(a, avoid)
        tys = dict(tys)
        tys[a] = TyVar(b)
        new = theta._with(tys=tys)
        new._rtv = theta.range_tv() | {b}
        return b, new
    return a, (theta if tys is theta.tys else theta._with(tys=tys))


def _under_covar(c: str, theta: Subst, body) -> tuple[str, Subst]:
    cos = theta.cos
    if c in cos:
        cos = dict(cos)
        del cos[c]
    if c in theta.range_cv():
        avoid = set(theta.range_cv()) | fcv(body) | set(cos)
        d = fresh_name(c, avoid)
        cos = dict(cos)
        cos[c] = CoVar(d)
        new = theta._with(cos=cos)
        new._rcv = theta.range_cv() | {d}
        return d, new
    return c, (theta if cos is theta.cos else theta._with(cos=cos))


def _under_termvar(x: str, theta: Subst, body) -> tuple[str, Subst]:
    tms = theta.tms
    if x in tms:
        tms = dict(tms)
        del tms[x]
    if x in theta.range_xv():
        avoid = set(theta.range_xv()) | fxv(body) | set(tms)
        y = fresh_name(x, avoid)
        tms = dict(tms)
        tms[x] = Var(y)
        new = theta._with(tms=tms)
        new._rxv = theta.range_xv() | {y}
        return y, new
    return x, (theta if tms is theta.tms else theta._with(tms=tms))


def _sub(t, th: Subst):
    if th.is_empty():
        return t
    match t:
        case TyVar(a):
            return th.tys.get(a, t)
        case TyCon(h, args):
            return TyCon(h, tuple(_sub(x, th) for x in args)) if args else t
        case FamApp(f, args):
            return FamApp(f, tuple(_sub(x, th) for x in args)) if args else t
        case Arrow(d, c):
            return Arrow(_sub(d, th), _sub(c, th))
        case Forall(a, body):
            b, th2 = _under_tyvar(a, th, body)
            return Forall(b, _sub(body, th2))
        case Qual(p, body):
            return Qual(_sub(p, th), _sub(body, th))
        case Prop(l, r):
            return Prop(_sub(l, th), _sub(r, th))
        # coercions
        case CoVar(c):
            return th.cos.get(c, t)
        case Refl(ty):
            return Refl(_sub(ty, th))
        case Sym(co):
            return Sym(_sub(co, th))
        case Trans(a, b):
            return Trans(_sub(a, th), _sub(b, th))
        case ConCong(h, args):
            return ConCong(h, tuple(_sub(x, th) for x in args))
        case FamCong(f, args):
            return FamCong(f, tuple(_sub(x, th) for x in args))
        case ArrowCong(a, b):
            return ArrowCong(_sub(a, th), _sub(b, th))
        case ForallCong(a, body):
            b, th2 = _under_tyvar(a, th, body)
            return ForallCong(b, _sub(body, th2))
        case QualCong(a, b, c):
            return QualCong(_sub(a, th), _sub(b, th), _sub(c, th))
        case Nth(i, co):
            return Nth(i, _sub(co, th))
        case Inst(co, ty):
            return Inst(_sub(co, th), _sub(ty, th))
        case AxiomUse(ax, i, tys, res):
            return AxiomUse(ax, i, tuple(_sub(x, th) for x in tys),
                            tuple(_sub(q, th) for q in res))
        case EvalResolution(w, p):
            return EvalResolution(_sub(w, th), _sub(p, th))
        # expressions
        case Var(x):
            return th.tms.get(x, t)
        case Const():
            return t
        case Lam(x, ty, body):
            y, th2 = _under_termvar(x, th, body)
            return Lam(y, _sub(ty, th), _sub(body, th2))
        case App(f, a):
            return App(_sub(f, th), _sub(a, th))
        case TLam(a, body):
            b, th2 = _under_tyvar(a, th, body)
            return TLam(b, _sub(body, th2))
        case TApp(f, ty):
            return TApp(_sub(f, th), _sub(ty, th))
        case CLam(c, p, body):
            d, th2 = _under_covar(c, th, body)
            return CLam(d, _sub(p, th), _sub(body, th2))
        case CApp(f, co):
            return CApp(_sub(f, th), _sub(co, th))
        case Cast(e, co):
            return Cast(_sub(e, th), _sub(co, th))
        case Assume(chi, body):
            args = tuple(_sub(x, th) for x in chi.args)
            a, th2 = _under_tyvar(chi.var, th, body)
            c, th3 = _under_covar(chi.covar, th2, body)
            return Assume(EvalAssumption(a, c, chi.fam, args), _sub(body, th3))
        case tuple():
            return tuple(_sub(x, th) for x in t)
        case _:
            raise TypeError(f"subst: unexpected node {t!r}")


# --------------------------------------------------------------------------
# Alpha-equivalence


def canon(t):
    """Rename every bound variable to a name derived from its binding depth.

    Two terms are alpha-equivalent exactly when their canonical forms are
    structurally equal, so the result can also serve as a dictionary key.
    """
    return _canon(t, {}, 0)


def _bind(env: dict, ns: str, name: str, depth: int) -> tuple[dict, str]:
    new = f"%{depth}"
    env2 = dict(env)
    env2[(ns, name)] = new
    return env2, new


def _canon(t, env: dict, d: int):
    match t:
        case TyVar(a):
            n = env.get(("t", a))
            return t if n is None else TyVar(n)
        case TyCon(h, args):
            return TyCon(h, tuple(_canon(x, env, d) for x in args)) if args else t
        case FamApp(f, args):
            return FamApp(f, tuple(_canon(x, env, d) for x in args)) if args else t
        case Arrow(a, b):
            return Arrow(_canon(a, env, d), _canon(b, env, d))
        case Forall(a, body):
            env2, n = _bind(env, "t", a, d)
            return Forall(n, _canon(body, env2, d + 1))
        case Qual(p, body):
            return Qual(_canon(p, env, d), _canon(body, env, d))
        case Prop(l, r):
            return Prop(_canon(l, env, d), _canon(r, env, d))
        case CoVar(c):
            n = env.get(("c", c))
            return t if n is None else CoVar(n)
        case Refl(ty):
            return Refl(_canon(ty, env, d))
        case Sym(co):
            return Sym(_canon(co, env, d))
        case Trans(a, b):
            return Trans(_canon(a, env, d), _canon(b, env, d))
        case ConCong(h, args):
            return ConCong(h, tuple(_canon(x, env, d) for x in args))
        case FamCong(f, args):
            return FamCong(f, tuple(_canon(x, env, d) for x in args))
        case ArrowCong(a, b):
            return ArrowCong(_canon(a, env, d), _canon(b, env, d))
        case ForallCong(a, body):
            env2, n = _bind(env, "t", a, d)
            return ForallCong(n, _canon(body, env2, d + 1))
        case QualCong(a, b, c):
            return QualCong(_canon(a, env, d), _canon(b, env, d), _canon(c, env, d))
        case Nth(i, co):
            return Nth(i, _canon(co, env, d))
        case Inst(co, ty):
            return Inst(_canon(co, env, d), _canon(ty, env, d))
        case AxiomUse(ax, i, tys, res):
            return AxiomUse(ax, i, tuple(_canon(x, env, d) for x in tys),
                            tuple(_canon(q, env, d) for q in res))
        case EvalResolution(w, p):
            return EvalResolution(_canon(w, env, d), _canon(p, env, d))
        case Var(x):
            n = env.get(("x", x))
            return t if n is None else Var(n)
        case Const():
            return t
        case Lam(x, ty, body):
            env2, n = _bind(env, "x", x, d)
            return Lam(n, _canon(ty, env, d), _canon(body, env2, d + 1))
        case App(f, a):
            return App(_canon(f, env, d), _canon(a, env, d))
        case TLam(a, body):
            env2, n = _bind(env, "t", a, d)
            return TLam(n, _canon(body, env2, d + 1))
        case TApp(f, ty):
            return TApp(_canon(f, env, d), _canon(ty, env, d))
        case CLam(c, p, body):
            env2, n = _bind(env, "c", c, d)
            return CLam(n, _canon(p, env, d), _canon(body, env2, d + 1))
        case CApp(f, co):
            return CApp(_canon(f, env, d), _canon(co, env, d))
        case Cast(e, co):
            return Cast(_canon(e, env, d), _canon(co, env, d))
        case Assume(chi, body):
            args = tuple(_canon(x, env, d) for x in chi.args)
            env2, a = _bind(env, "t", chi.var, d)
            env3, c = _bind(env2, "c", chi.covar, d + 1)
            return Assume(EvalAssumption(a, c, chi.fam, args), _canon(body, env3, d + 2))
        case Equation(tvs, chis, fam, lhs, rhs):
            env2 = env
            names = []
            for a in tvs:
                env2, n = _bind(env2, "t", a, d)
                names.append(n)
                d += 1
            lhs2 = tuple(_canon(x, env2, d) for x in lhs)
            chis2 = []
            for chi in chis:
                args = tuple(_canon(x, env2, d) for x in chi.args)
                env2, a = _bind(env2, "t", chi.var, d)
                env2, c = _bind(env2, "c", chi.covar, d + 1)
                d += 2
                chis2.append(EvalAssumption(a, c, chi.fam, args))
            return Equation(tuple(names), tuple(chis2), fam, lhs2, _canon(rhs, env2, d))
        case tuple():
            return tuple(_canon(x, env, d) for x in t)
        case _:
            raise TypeError(f"canon: unexpected node {t!r}")


def alpha_eq(a, b) -> bool:
    """Equality up to renaming of bound variables."""
    if a == b:
        return True
    if type(a) is not type(b):
        return False
    return canon(a) == canon(b)


# --------------------------------------------------------------------------
# Family-application measure and one-hole contexts


def fam_count(t) -> int:
    """Number of family-application nodes in a type or proposition."""
    match t:
        case TyVar():
            return 0
        case TyCon(_, args):
            return sum(fam_count(x) for x in args)
        case FamApp(_, args):
            return 1 + sum(fam_count(x) for x in args)
        case Arrow(a, b) | Prop(a, b):
            return fam_count(a) + fam_count(b)
        case Forall(_, body):
            return fam_count(body)
        case Qual(p, body):
            return fam_count(p) + fam_count(body)
    raise TypeError(f"fam_count: not a type {t!r}")


def is_family_free(t) -> bool:
    match t:
        case TyVar():
            return True
        case TyCon(_, args):
            return all(is_family_free(x) for x in args)
        case FamApp():
            return False
        case Arrow(a, b) | Prop(a, b):
            return is_family_free(a) and is_family_free(b)
        case Forall(_, body):
            return is_family_free(body)
        case Qual(p, body):
            return is_family_free(p) and is_family_free(body)
    raise TypeError(f"is_family_free: not a type {t!r}")


def children(t: Type) -> tuple:
    """Immediate type children, in the order used for hole paths."""
    match t:
        case TyCon(_, args) | FamApp(_, args):
            return args
        case Arrow(a, b):
            return (a, b)
        case Forall(_, body):
            return (body,)
        case Qual(p, body):
            return (p.lhs, p.rhs, body)
    return ()


def replace_child(t: Type, i: int, new: Type) -> Type:
    match t:
        case TyCon(h, args):
            return TyCon(h, args[:i] + (new,) + args[i + 1:])
        case FamApp(f, args):
            return FamApp(f, args[:i] + (new,) + args[i + 1:])
        case Arrow(a, b):
            return Arrow(new, b) if i == 0 else Arrow(a, new)
        case Forall(a, _):
            return Forall(a, new)
        case Qual(p, body):
            if i == 0:
                return Qual(Prop(new, p.rhs), body)
            if i == 1:
                return Qual(Prop(p.lhs, new), body)
            return Qual(p, new)
    raise IndexError(f"no child {i} in {t}")


@dataclass(frozen=True, slots=True)
class TypeContextHole:
    """A type with one distinguished position, given as a child-index path."""

    root: Type
    path: tuple

    def plug(self, filler: Type) -> Type:
        return _plug(self.root, self.path, filler)

    def focus(self) -> Type:
        t = self.root
        for i in self.path:
            t = children(t)[i]
        return t

    def binders(self) -> tuple:
        """Type variables bound by ``Forall`` nodes above the hole."""
        out = []
        t = self.root
        for i in self.path:
            if isinstance(t, Forall):
                out.append(t.var)
            t = children(t)[i]
        return tuple(out)


def _plug(t: Type, path: tuple, filler: Type) -> Type:
    if not path:
        return filler
    i = path[0]
    return replace_child(t, i, _plug(children(t)[i], path[1:], filler))


def find_redexes(t: Type) -> list:
    """Every family application in ``t`` with its context, left-to-right preorder."""
    out: list = []

    def go(node: Type, path: tuple) -> None:
        if isinstance(node, FamApp):
            out.append((TypeContextHole(t, path), node.name, node.args))
        for i, ch in enumerate(children(node)):
            go(ch, path + (i,))

    go(t, ())
    return out


def type_size(t) -> int:
    match t:
        case TyVar():
            return 1
        case TyCon(_, args) | FamApp(_, args):
            return 1 + sum(type_size(x) for x in args)
        case Arrow(a, b) | Prop(a, b):
            return 1 + type_size(a) + type_size(b)
        case Forall(_, body):
            return 1 + type_size(body)
        case Qual(p, body):
            return 1 + type_size(p) + type_size(body)
    raise TypeError(f"type_size: not a type {t!r}")


def subterms(t: Type) -> Iterator[Type]:
    yield t
    for ch in children(t):
        yield from subterms(ch)


# --------------------------------------------------------------------------
# Assumption expansion


def expand_assumptions(chis: Iterable[EvalAssumption]) -> dict:
    """The substitution that replaces each assumption variable by the family
    application it stands for, fully expanded through earlier assumptions."""
    out: dict = {}
    for chi in chis:
        args = tuple(subst_types(out, a) for a in chi.args)
        out[chi.var] = FamApp(chi.fam, args)
    return out


def _show(node) -> str:
    from .printer import show
    return show(node)


Selector = Callable[[list], Optional[int]]
