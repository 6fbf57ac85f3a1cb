"""Random worlds and property suites that exercise the calculus' metatheory.

A *world* is a generated signature (total, open and closed families over a
fixed base of type constants) together with pools of closed types and
well-typed closed expressions.  Each suite samples from a world and checks one
property: type preservation, progress, the reduction measure, local
confluence, strategy independence, consistency of coercions, stability of
apartness under substitution, and the link between total families and
``total_eval``.

Everything is deterministic given the seed.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from . import program as P
from .diagnostics import CheckError, PreconditionError
from .evaluator import CoercedValue, Evaluator, FuelExhausted, Stepped, Stuck, Value
from .rewrite import Rewriter
from .signature import check_good_signature, check_signature
from .surface import ClassInfo, FamilyGuard, Instance, SurfaceEnv
from .syntax import (App, Arrow, ArrowCong, Assume, Cast, CApp, CLam, CoBind, ConCong, Const,
                     Context, CoVar, Equation, EvalAssumption, FamApp, FamCong, FamilyInfo,
                     Forall, ForallCong, Inst, Lam, Nth, Prop, Qual, QualCong, Refl, Signature,
                     Sym, TApp, TLam, TmBind, Trans, TyBind, TyCon, TyVar, Var, alpha_eq, canon,
                     children, fam_count, find_redexes, ftv, is_family_free, replace_child,
                     subst_types, type_size)
from .typecheck import check_coercion, check_type, infer_expr
from .unify import apart

SUITES = ("preservation", "progress", "measure", "local_confluence", "strategy",
          "consistency", "apart_stability", "totality_link")

# Share of pool types that carry family applications under constructors.
FAMILY_BIAS = 0.3

INT, BOOL, UNIT, ZERO = TyCon("Int"), TyCon("Bool"), TyCon("Unit"), TyCon("Z")
BASE_TYCONS = {"Int": 0, "Bool": 0, "Unit": 0, "Z": 0, "S": 1, "List": 1, "Maybe": 1, "Pair": 2}
BASE_CONSTS = {
    "MkInt": INT, "MkBool": BOOL, "MkUnit": UNIT, "MkZ": ZERO,
    "MkOne": TyCon("S", (ZERO,)), "MkList": TyCon("List", (INT,)),
    "MkMaybe": TyCon("Maybe", (BOOL,)), "MkPair": TyCon("Pair", (INT, BOOL)),
}
_CONSTS_BY_TYPE: dict = {}
for _k, _t in BASE_CONSTS.items():
    _CONSTS_BY_TYPE.setdefault(canon(_t), []).append(_k)
_NULLARY = [INT, BOOL, UNIT, ZERO]
_UNARY = ["S", "List", "Maybe"]


def _S(t):
    return TyCon("S", (t,))


# ---------------------------------------------------------------------------
# Enumeration


def closed_types(max_size: int, arrows: bool = True) -> list:
    """Every closed proper type over the base constants with size <= max_size,
    ordered by size."""
    by_size: dict = {1: list(_NULLARY)}
    for n in range(2, max_size + 1):
        out = [TyCon(h, (x,)) for h in _UNARY for x in by_size[n - 1]]
        for k in range(1, n - 1):
            for a in by_size[k]:
                for b in by_size[n - 1 - k]:
                    out.append(TyCon("Pair", (a, b)))
                    if arrows:
                        out.append(Arrow(a, b))
        by_size[n] = out
    return [t for n in range(1, max_size + 1) for t in by_size[n]]


def arg_tuples(arity: int, max_total: int, arrows: bool = True) -> list:
    """Closed argument tuples whose summed type size is at most ``max_total``."""
    pool = closed_types(max(1, max_total - arity + 1), arrows)
    sized = [(t, type_size(t)) for t in pool]
    out = []
    for combo in itertools.product(sized, repeat=arity):
        if sum(s for _, s in combo) <= max_total:
            out.append(tuple(t for t, _ in combo))
    return out


NAT_SIG = Signature(
    {"Z": 0, "S": 1}, {}, {"Plus": FamilyInfo(2, True)},
    {"plusAx": (
        Equation(("n",), (), "Plus", (ZERO, TyVar("n")), TyVar("n")),
        Equation(("m", "n"), (EvalAssumption("r", "c", "Plus", (TyVar("m"), TyVar("n"))),),
                 "Plus", (_S(TyVar("m")), TyVar("n")), _S(TyVar("r")))),
    })


def enumerate_small(bound: int, size: int = 5) -> Iterator:
    """Every closed type over ``Z``, ``S`` and the total family ``Plus`` with
    at most ``bound`` family applications and at most ``size`` nodes."""
    memo: dict = {}

    def of_size(n: int) -> list:
        if n in memo:
            return memo[n]
        out = []
        if n == 1:
            out.append(ZERO)
        else:
            out += [_S(t) for t in of_size(n - 1)]
            for k in range(1, n - 1):
                for a in of_size(k):
                    for b in of_size(n - 1 - k):
                        out.append(FamApp("Plus", (a, b)))
        memo[n] = out
        return out

    for n in range(1, size + 1):
        for t in of_size(n):
            if fam_count(t) <= bound:
                yield t


# ---------------------------------------------------------------------------
# Coercion building blocks


def lift(root, path: tuple, g):
    """Congruence coercion that rewrites ``root`` at ``path`` by ``g``."""
    if not path:
        return g
    i, rest = path[0], path[1:]
    parts = children(root)

    def at(k, x):
        return lift(x, rest, g) if k == i else Refl(x)

    match root:
        case TyCon(h, args):
            return ConCong(h, tuple(at(k, x) for k, x in enumerate(args)))
        case FamApp(f, args):
            return FamCong(f, tuple(at(k, x) for k, x in enumerate(args)))
        case Arrow():
            return ArrowCong(at(0, parts[0]), at(1, parts[1]))
        case Forall(v, body):
            return ForallCong(v, lift(body, rest, g))
        case Qual():
            return QualCong(at(0, parts[0]), at(1, parts[1]), at(2, parts[2]))
    raise ValueError(f"cannot descend into {root}")


def contraction(rw: Rewriter, ty):
    """``(coercion, result)`` where the coercion proves ``ty ~ result`` by
    reducing leftmost-innermost until nothing fires."""
    co = None
    while True:
        step = None
        for hole, fam, args in find_redexes(ty):
            red = rw.top_reduce(fam, args)
            if red is not None:
                step = (hole, red)
                break
        if step is None:
            return (co if co is not None else Refl(ty)), ty
        hole, red = step
        g = lift(ty, hole.path, red.proof)
        co = g if co is None else Trans(co, g)
        ty = hole.plug(red.reduct)


def _positions(t, path=()) -> Iterator:
    yield path, t
    for i, ch in enumerate(children(t)):
        yield from _positions(ch, path + (i,))


def _replace_at(t, path, new):
    if not path:
        return new
    return replace_child(t, path[0], _replace_at(children(t)[path[0]], path[1:], new))


# ---------------------------------------------------------------------------
# Worlds


@dataclass
class World:
    seed: int
    size: int
    sig: Signature
    classes: SurfaceEnv
    types: list                    # closed types; some carry family applications
    exprs: list                    # (expr, type) pairs, all well typed and closed
    rewriter: Rewriter = field(repr=False, default=None)
    expansions: dict = field(repr=False, default_factory=dict)   # canon(proper) -> [FamApp]
    stuck: list = field(repr=False, default_factory=list)        # family apps that never fire

    @property
    def total_families(self) -> list:
        return [f for f, info in self.sig.families.items() if info.total]


class _FamilyBuilder:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.families: dict = {}
        self.axioms: dict = {}
        self.totals: list = []

    def rhs(self, vars_: list, depth: int):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.3:
            if vars_ and rng.random() < 0.6:
                return TyVar(rng.choice(vars_))
            return rng.choice(_NULLARY)
        k = rng.random()
        if k < 0.45:
            return TyCon(rng.choice(_UNARY), (self.rhs(vars_, depth - 1),))
        if k < 0.7:
            return TyCon("Pair", (self.rhs(vars_, depth - 1), self.rhs(vars_, depth - 1)))
        if k < 0.9:
            return Arrow(self.rhs(vars_, depth - 1), self.rhs(vars_, depth - 1))
        return Forall("q", Arrow(TyVar("q"), self.rhs(vars_, depth - 1)))

    def _extra_assumption(self, scope: list, n: int):
        """An assumption calling an earlier total family, or ``None``."""
        if not self.totals or self.rng.random() < 0.5:
            return None
        g = self.rng.choice(self.totals)
        args = tuple(TyVar(self.rng.choice(scope)) for _ in range(self.families[g].arity))
        return EvalAssumption(f"s{n}", f"d{n}", g, args)

    def total(self, name: str) -> None:
        rng = self.rng
        arity = rng.choice([1, 1, 2])
        extra = ["b"] if arity == 2 else []
        xb = [TyVar(v) for v in extra]
        eqs = []
        shape = rng.choice(["nat", "nat", "list"])
        if shape == "nat":
            eqs.append(Equation(tuple(extra), (), name, (ZERO, *xb), self.rhs(extra, 2)))
            rec_pat = _S(TyVar("m"))
        else:
            rec_pat = TyCon("List", (TyVar("m"),))
        chis = [EvalAssumption("r", "c", name, (TyVar("m"), *xb))]
        x = self._extra_assumption(["m", "r", *extra], 0)
        if x is not None:
            chis.append(x)
        scope = ["m", *extra, *(c.var for c in chis)]
        eqs.append(Equation(("m", *extra), tuple(chis), name, (rec_pat, *xb), self.rhs(scope, 2)))
        if rng.random() < 0.5:
            eqs.append(Equation(("m", *extra), (), name, (TyCon("Maybe", (TyVar("m"),)), *xb),
                                self.rhs(["m", *extra], 2)))
        eqs.append(Equation(("a", *extra), (), name, (TyVar("a"), *xb), self.rhs(["a", *extra], 2)))
        self.families[name] = FamilyInfo(arity, True)
        self.axioms[f"{name.lower()}Ax"] = tuple(eqs)
        self.totals.append(name)

    def open_partial(self, name: str) -> None:
        rng = self.rng
        heads = [(INT, []), (BOOL, []), (TyCon("List", (TyVar("a"),)), ["a"]),
                 (TyCon("Maybe", (TyVar("a"),)), ["a"]), (_S(TyVar("a")), ["a"])]
        rng.shuffle(heads)
        chosen = heads[:rng.randint(2, 4)]
        self.families[name] = FamilyInfo(1, False)
        k = 0
        for pat, vs in chosen:
            chis = []
            if vs and rng.random() < 0.4:
                chis.append(EvalAssumption("r", "c", name, (TyVar(vs[0]),)))
            x = self._extra_assumption(vs or [], 1) if vs else None
            if x is not None:
                chis.append(x)
            scope = vs + [c.var for c in chis]
            self.axioms[f"{name.lower()}Ax{k}"] = (
                Equation(tuple(vs), tuple(chis), name, (pat,), self.rhs(scope, 2)),)
            k += 1
        if rng.random() < 0.6:
            # An overlapping but compatible pair: both sides agree on Pair Int Int.
            body = self.rhs(["a"], 2)
            self.axioms[f"{name.lower()}Ax{k}"] = (
                Equation(("a",), (), name, (TyCon("Pair", (TyVar("a"), INT)),), body),)
            self.axioms[f"{name.lower()}Ax{k + 1}"] = (
                Equation(("b",), (), name, (TyCon("Pair", (INT, TyVar("b"))),),
                         subst_types({"a": TyVar("b")}, body)),)

    def closed_partial(self, name: str) -> None:
        rng = self.rng
        a, b = TyVar("a"), TyVar("b")
        templates = [
            [(("a",), (a, a)), (("a", "b"), (a, b))],
            [(("a",), (TyCon("List", (a,)), INT)), (("a",), (a, a)), ((), (BOOL, INT))],
            [(("a", "b"), (TyCon("Pair", (a, b)), a)), (("a",), (TyCon("Maybe", (a,)), a)),
             (("a", "b"), (TyCon("List", (a,)), b))],
        ]
        eqs = []
        for vs, lhs in rng.choice(templates):
            chis = []
            x = self._extra_assumption(list(vs), 0) if vs else None
            if x is not None:
                chis.append(x)
            eqs.append(Equation(vs, tuple(chis), name, lhs,
                                self.rhs(list(vs) + [c.var for c in chis], 2)))
        self.families[name] = FamilyInfo(2, False)
        self.axioms[f"{name.lower()}Ax"] = tuple(eqs)


def _world_classes(sig: Signature) -> SurfaceEnv:
    """A class table guarding every partial family by one class per family."""
    env = SurfaceEnv(ty_cons=dict(sig.ty_cons))
    for f, info in sig.families.items():
        if info.total:
            env.families[f] = FamilyGuard(info.arity, None, True)
            continue
        cls = "C" + f
        params = tuple(f"p{i}" for i in range(info.arity))
        axs = sig.axioms_for(f)
        closed = any(len(eqs) > 1 for _, eqs in axs)
        ci = ClassInfo(cls, params, (), (f,), closed)
        for ax, eqs in axs:
            for i, eq in enumerate(eqs):
                ctx = tuple(P.Pred("C" + chi.fam, chi.args) for chi in eq.assumps
                            if not sig.families[chi.fam].total)
                ci.instances.append(Instance(ctx, P.Pred(cls, eq.lhs_args), f"{ax}#{i}"))
        env.classes[cls] = ci
        env.families[f] = FamilyGuard(info.arity, cls)
    return env


def gen_world(seed: int, size: int = 3, n_exprs: Optional[int] = None) -> World:
    """A random world, identical for identical arguments.  ``size`` 0 gives an
    empty signature and empty pools."""
    rng = random.Random(f"world:{seed}:{size}")
    if size <= 0:
        sig = Signature()
        return World(seed, size, sig, SurfaceEnv(), [], [], Rewriter(sig))
    fb = _FamilyBuilder(rng)
    for k in range(min(3, 1 + rng.randrange(max(1, size)))):
        fb.total(f"T{k}")
    for k in range(1 + (size > 2 and rng.random() < 0.5)):
        fb.open_partial(f"P{k}")
    fb.closed_partial("Q0")
    sig = Signature(dict(BASE_TYCONS), dict(BASE_CONSTS), fb.families, fb.axioms)
    problems = check_signature(sig) or check_good_signature(sig)
    if problems:
        raise AssertionError(f"generated signature rejected: {problems[0]}")
    w = World(seed, size, sig, _world_classes(sig), [], [], Rewriter(sig))
    _build_tables(w)
    g = Gen(w, rng)
    n_types = 20 * size
    while len(w.types) < n_types:
        if rng.random() < FAMILY_BIAS:
            t = g.pretype_with_families()
        else:
            t = g.proper_type(3)
        w.types.append(t)
    target = n_exprs if n_exprs is not None else 10 * size
    while len(w.exprs) < target:
        item = g.closed_expr()
        if item is not None:
            w.exprs.append(item)
    return w


def _build_tables(w: World) -> None:
    small = closed_types(3, arrows=False)
    for f, info in w.sig.families.items():
        tuples = [(t,) for t in small] if info.arity == 1 else arg_tuples(info.arity, 3, False)
        for args in tuples:
            red = w.rewriter.top_reduce(f, args)
            app = FamApp(f, args)
            if red is None:
                w.stuck.append(app)
            elif is_family_free(red.reduct):
                w.expansions.setdefault(canon(red.reduct), []).append(app)


# ---------------------------------------------------------------------------
# Generators


class Gen:
    """Type, coercion and expression generators bound to one world."""

    def __init__(self, world: World, rng: random.Random):
        self.w = world
        self.rng = rng
        self.sig = world.sig
        self.rw = world.rewriter
        self.counter = 0
        self.provable = [(app, k) for k, apps in world.expansions.items() for app in apps]

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    # -- types -------------------------------------------------------------------

    def proper_type(self, depth: int, tyvars: tuple = (), binders: bool = True):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.25:
            if tyvars and rng.random() < 0.4:
                return TyVar(rng.choice(tyvars))
            return rng.choice(_NULLARY)
        k = rng.random()
        if k < 0.4:
            return TyCon(rng.choice(_UNARY), (self.proper_type(depth - 1, tyvars, binders),))
        if k < 0.6:
            return TyCon("Pair", (self.proper_type(depth - 1, tyvars, binders),
                                  self.proper_type(depth - 1, tyvars, binders)))
        if k < 0.85 or not binders:
            return Arrow(self.proper_type(depth - 1, tyvars, binders),
                         self.proper_type(depth - 1, tyvars, binders))
        if k < 0.95:
            v = self.fresh("a")
            return Forall(v, self.proper_type(depth - 1, tyvars + (v,), binders))
        prop = self.provable_prop()
        return Qual(prop[0], self.proper_type(depth - 1, tyvars, binders))

    def expand(self, ty, p: float = 0.5, depth: int = 2):
        """A pretype that reduces to ``ty``: closed subterms are replaced by
        family applications that reduce to them."""
        rng = self.rng
        if depth > 0 and not ftv(ty) and rng.random() < p:
            apps = self.w.expansions.get(canon(ty))
            if apps:
                app = rng.choice(apps)
                return FamApp(app.name, tuple(self.expand(x, p * 0.6, depth - 1)
                                              for x in app.args))
        kids = children(ty)
        if not kids:
            return ty
        out = ty
        for i, ch in enumerate(kids):
            out = replace_child(out, i, self.expand(ch, p, depth))
        return out

    def pretype_with_families(self):
        """A closed type with family applications under constructors; some
        of them may be stuck."""
        for _ in range(20):
            base = self.proper_type(3, binders=self.rng.random() < 0.3)
            t = self.expand(base, 0.6)
            if self.w.stuck and self.rng.random() < 0.2:
                pos = [pth for pth, x in _positions(t) if not ftv(x) and pth]
                if pos:
                    t = _replace_at(t, self.rng.choice(pos), self.rng.choice(self.w.stuck))
            if fam_count(t) > 0:
                return t
        return FamApp(*self._some_app())

    def _some_app(self):
        app, _ = self.rng.choice(self.provable)
        return app.name, app.args

    def provable_prop(self):
        """``(prop, proof)`` for a closed proposition with a known proof."""
        rng = self.rng
        if self.provable and rng.random() < 0.75:
            app, _ = rng.choice(self.provable)
            red = self.rw.top_reduce(app.name, app.args)
            return Prop(app, red.reduct), red.proof
        t = self.proper_type(1, binders=False)
        return Prop(t, t), Refl(t)

    # -- self-coercions -------------------------------------------------------

    def loop(self, ctx: Context, ty, depth: int = 2):
        """A coercion proving ``ty ~ ty``, usually not reflexivity."""
        rng = self.rng
        k = rng.random()
        if depth <= 0 or k < 0.15:
            return Refl(ty)
        if k < 0.35:
            e = self.expand(ty, 0.7)
            if e != ty:
                # ty ~ nf ~ e ~ nf ~ ty; ty itself may still hold family applications
                ke, _ = contraction(self.rw, e)
                kt, _ = contraction(self.rw, ty)
                return Trans(Trans(kt, Sym(ke)), Trans(ke, Sym(kt)))
        if k < 0.5:
            return self._cong_loop(ctx, ty, depth)
        if k < 0.6:
            return Sym(self.loop(ctx, ty, depth - 1))
        if k < 0.7:
            return Trans(self.loop(ctx, ty, depth - 1), self.loop(ctx, ty, depth - 1))
        if k < 0.78:
            other = self.proper_type(1, binders=False)
            if rng.random() < 0.5:
                return Nth(0, ArrowCong(self.loop(ctx, ty, depth - 1), Refl(other)))
            return Nth(1, self.loop(ctx, Arrow(other, ty), depth - 1))
        if k < 0.86:
            v = self.fresh("i")
            return Inst(ForallCong(v, self.loop(ctx, ty, depth - 1)), self.proper_type(1))
        for c, p in self._covars(ctx):
            if alpha_eq(p.rhs, ty):
                return Trans(Sym(CoVar(c)), CoVar(c))
            if alpha_eq(p.lhs, ty):
                return Trans(CoVar(c), Sym(CoVar(c)))
        return self._cong_loop(ctx, ty, depth)

    def _covars(self, ctx: Context):
        return [(b.name, b.prop) for b in ctx.bindings if isinstance(b, CoBind)]

    def _cong_loop(self, ctx: Context, ty, depth: int):
        match ty:
            case TyCon(h, args):
                return ConCong(h, tuple(self.loop(ctx, x, depth - 1) for x in args))
            case Arrow(a, b):
                return ArrowCong(self.loop(ctx, a, depth - 1), self.loop(ctx, b, depth - 1))
            case Forall(v, body):
                inner = ctx if ctx.has_tyvar(v) else ctx.extend(TyBind(v))
                return ForallCong(v, self.loop(inner, body, depth - 1))
            case Qual(p, body):
                return QualCong(self.pre_loop(p.lhs), self.loop(ctx, p.rhs, depth - 1),
                                self.loop(ctx, body, depth - 1))
        return Refl(ty)

    def pre_loop(self, ty):
        """A self-coercion for a pretype that may be a family application."""
        if isinstance(ty, FamApp):
            k = self.rng.random()
            red = self.rw.top_reduce(ty.name, ty.args)
            if red is not None and k < 0.5:
                return Trans(red.proof, Sym(red.proof))
            return FamCong(ty.name, tuple(self.pre_loop(x) for x in ty.args))
        if is_family_free(ty) and not ftv(ty):
            return self.loop(Context(), ty, 1)
        return Refl(ty)

    # -- coercions between expansions ------------------------------------------

    def path(self, a, c, ty, depth: int):
        """A coercion proving ``a ~ c`` where both reduce to ``ty``."""
        rng = self.rng
        k = rng.random()
        if depth <= 0 or k < 0.3:
            ka, _ = contraction(self.rw, a)
            kc, _ = contraction(self.rw, c)
            return Trans(ka, Sym(kc))
        if k < 0.45:
            b = self.expand(ty, 0.5)
            return Trans(self.path(a, b, ty, depth - 1), self.path(b, c, ty, depth - 1))
        if k < 0.55:
            return Sym(self.path(c, a, ty, depth - 1))
        if k < 0.75 and type(a) is type(c) is type(ty) and not isinstance(ty, (TyVar, FamApp)):
            ka, kc, kt = children(a), children(c), children(ty)
            if isinstance(ty, TyCon):
                if a.name == c.name == ty.name:
                    return ConCong(ty.name, tuple(self.path(x, y, z, depth - 1)
                                                  for x, y, z in zip(ka, kc, kt)))
            elif isinstance(ty, Arrow):
                return ArrowCong(*(self.path(x, y, z, depth - 1) for x, y, z in zip(ka, kc, kt)))
            elif isinstance(ty, Forall) and a.var == c.var == ty.var:
                return ForallCong(ty.var, self.path(ka[0], kc[0], kt[0], depth - 1))
        if k < 0.85:
            other = self.proper_type(1, binders=False)
            if rng.random() < 0.5:
                return Nth(0, self.path(Arrow(a, other), Arrow(c, other), Arrow(ty, other),
                                        depth - 1))
            return Nth(0, self.path(TyCon("List", (a,)), TyCon("List", (c,)),
                                    TyCon("List", (ty,)), depth - 1))
        v = self.fresh("i")
        return Inst(ForallCong(v, self.path(a, c, ty, depth - 1)), self.proper_type(1))

    def closed_coercion(self):
        """``(coercion, lhs, rhs, normal)``: a random closed well-typed coercion."""
        ty = self.proper_type(3)
        a, c = self.expand(ty, 0.6), self.expand(ty, 0.6)
        g = self.path(a, c, ty, 3)
        return g, a, c, ty

    # -- expressions ------------------------------------------------------------------

    def closed_expr(self, depth: int = 3):
        """A closed well-typed ``(expr, type)``, or ``None`` on a rare dead end."""
        for _ in range(10):
            ty = self.inhabited_type(3)
            e = self.expr(Context(), ty, depth)
            if e is not None:
                got = infer_expr(self.sig, Context(), e)
                if not alpha_eq(got, ty):
                    raise AssertionError(f"generated {e} has type {got}, wanted {ty}")
                return e, ty
        return None

    def inhabited_type(self, depth: int, tyvars: tuple = ()):
        rng = self.rng
        k = rng.random()
        if depth <= 0 or k < 0.4:
            return rng.choice(list(BASE_CONSTS.values()))
        if k < 0.7:
            return Arrow(self.proper_type(1, tyvars, binders=False),
                         self.inhabited_type(depth - 1, tyvars))
        if k < 0.85:
            v = self.fresh("a")
            inner = self.inhabited_type(depth - 1, tyvars + (v,))
            return Forall(v, Arrow(TyVar(v), inner) if rng.random() < 0.5 else inner)
        prop, _ = self.provable_prop()
        return Qual(prop, self.inhabited_type(depth - 1, tyvars))

    def _vars_of(self, ctx: Context, key):
        return [b.name for b in ctx.bindings if isinstance(b, TmBind) and canon(b.ty) == key]

    def _inhabitable(self, ctx: Context):
        rng = self.rng
        pool = list(BASE_CONSTS.values())
        pool += [b.ty for b in ctx.bindings if isinstance(b, TmBind)]
        t = rng.choice(pool)
        if rng.random() < 0.25:
            tv = tuple(ctx.tyvars())
            return Arrow(self.proper_type(1, tv, binders=False), t)
        return t

    def expr(self, ctx: Context, ty, depth: int):
        rng = self.rng
        key = canon(ty)
        leaves = self._vars_of(ctx, key)
        consts = _CONSTS_BY_TYPE.get(key, [])
        intro = isinstance(ty, (Arrow, Forall, Qual))
        if depth <= 0:
            if leaves:
                return Var(rng.choice(leaves))
            if consts:
                return Const(rng.choice(consts))
            return self._intro(ctx, ty, 0) if intro else None
        options = ["beta", "tbeta", "cbeta", "assume", "cast", "elim", "tcbeta"]
        weights = [2, 2, 1.5, 1.5, 2, 2, 1]
        if leaves or consts:
            options.append("leaf")
            weights.append(3)
        if intro:
            options.append("intro")
            weights.append(4)
        order = []
        opts, wts = list(options), list(weights)
        while opts:
            i = rng.choices(range(len(opts)), wts)[0]
            order.append(opts.pop(i))
            wts.pop(i)
        for how in order:
            e = getattr(self, "_" + how)(ctx, ty, depth)
            if e is not None:
                return e
        return None

    def _leaf(self, ctx, ty, depth):
        key = canon(ty)
        pool = [Var(x) for x in self._vars_of(ctx, key)]
        pool += [Const(k) for k in _CONSTS_BY_TYPE.get(key, [])]
        return self.rng.choice(pool) if pool else None

    def _intro(self, ctx, ty, depth):
        match ty:
            case Arrow(a, b):
                x = self.fresh("x")
                body = self.expr(ctx.extend(TmBind(x, a)), b, depth - 1)
                return None if body is None else Lam(x, a, body)
            case Forall(v, body):
                inner = ctx.extend(TyBind(v)) if not ctx.has_tyvar(v) else None
                if inner is None:
                    return None
                e = self.expr(inner, body, depth - 1)
                return None if e is None else TLam(v, e)
            case Qual(p, body):
                c = self.fresh("c")
                e = self.expr(ctx.extend(CoBind(c, p)), body, depth - 1)
                return None if e is None else CLam(c, p, e)
        return None

    def _beta(self, ctx, ty, depth):
        s = self._inhabitable(ctx)
        x = self.fresh("x")
        body = self.expr(ctx.extend(TmBind(x, s)), ty, depth - 1)
        if body is None:
            return None
        arg = self.expr(ctx, s, depth - 1)
        return None if arg is None else App(Lam(x, s, body), arg)

    def _elim(self, ctx, ty, depth):
        s = self._inhabitable(ctx)
        f = self.expr(ctx, Arrow(s, ty), depth - 1)
        if f is None:
            return None
        arg = self.expr(ctx, s, depth - 1)
        return None if arg is None else App(f, arg)

    def _tbeta(self, ctx, ty, depth):
        rng = self.rng
        v = self.fresh("a")
        closed = [x for _, x in _positions(ty) if not ftv(x) and is_family_free(x)]
        rho = rng.choice(closed) if closed and rng.random() < 0.7 else self.proper_type(1)
        abstracted = _abstract(ty, rho, v)
        inner = ctx.extend(TyBind(v))
        body = self.expr(inner, abstracted, depth - 1)
        if body is None:
            abstracted = ty
            body = self.expr(inner, ty, depth - 1)
            if body is None:
                return None
        fn = TLam(v, body)
        if rng.random() < 0.4:
            fn = Cast(fn, ForallCong(v, self.loop(inner, abstracted, 2)))
        return TApp(fn, rho)

    def _cbeta(self, ctx, ty, depth):
        prop, proof = self.provable_prop()
        c = self.fresh("c")
        body = self.expr(ctx.extend(CoBind(c, prop)), ty, depth - 1)
        if body is None:
            return None
        fn = CLam(c, prop, body)
        if self.rng.random() < 0.4:
            fn = Cast(fn, QualCong(self.pre_loop(prop.lhs), self.loop(ctx, prop.rhs, 1),
                                   self.loop(ctx, ty, 2)))
        return CApp(fn, proof)

    def _with_witness(self, ctx, ty, depth, a: str, c: str, rho, proof):
        """Body at ``ty`` that also consumes a value cast to type variable ``a``."""
        if self.rng.random() < 0.5:
            x = self.fresh("x")
            body = self.expr(ctx.extend(TmBind(x, TyVar(a))), ty, depth - 1)
            arg = self.expr(ctx, rho, depth - 1)
            if body is not None and arg is not None:
                return App(Lam(x, TyVar(a), body), Cast(arg, Trans(Sym(proof), CoVar(c))))
        return self.expr(ctx, ty, depth - 1)

    def _assume(self, ctx, ty, depth):
        totals = self.w.total_families
        if not totals:
            return None
        f = self.rng.choice(totals)
        args = tuple(self.proper_type(2, binders=False) for _ in range(self.sig.families[f].arity))
        red = self.rw.top_reduce(f, args)
        if red is None:
            return None
        a, c = self.fresh("a"), self.fresh("c")
        inner = ctx.extend(TyBind(a)).extend(CoBind(c, Prop(FamApp(f, args), TyVar(a))))
        body = self._with_witness(inner, ty, depth, a, c, red.reduct, red.proof)
        return None if body is None else Assume(EvalAssumption(a, c, f, args), body)

    def _tcbeta(self, ctx, ty, depth):
        app, _ = (self.rng.choice(self.provable) if self.provable else (None, None))
        if app is None:
            return None
        red = self.rw.top_reduce(app.name, app.args)
        a, c = self.fresh("a"), self.fresh("c")
        prop = Prop(app, TyVar(a))
        inner = ctx.extend(TyBind(a)).extend(CoBind(c, prop))
        body = self._with_witness(inner, ty, depth, a, c, red.reduct, red.proof)
        if body is None:
            return None
        return CApp(TApp(TLam(a, CLam(c, prop, body)), red.reduct), red.proof)

    def _cast(self, ctx, ty, depth):
        e = self.expr(ctx, ty, depth - 1)
        return None if e is None else Cast(e, self.loop(ctx, ty, 2))

    # -- open types for apartness ------------------------------------------------

    def open_type(self, vars_: tuple, depth: int):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.3:
            if vars_ and rng.random() < 0.6:
                return TyVar(rng.choice(vars_))
            return rng.choice(_NULLARY)
        k = rng.random()
        if k < 0.5:
            return TyCon(rng.choice(_UNARY), (self.open_type(vars_, depth - 1),))
        if k < 0.8:
            return TyCon("Pair", (self.open_type(vars_, depth - 1),
                                  self.open_type(vars_, depth - 1)))
        return Arrow(self.open_type(vars_, depth - 1), self.open_type(vars_, depth - 1))


def _abstract(ty, rho, v: str):
    """Replace closed occurrences of ``rho`` in ``ty`` by type variable ``v``."""
    if alpha_eq(ty, rho):
        return TyVar(v)
    kids = children(ty)
    out = ty
    for i, ch in enumerate(kids):
        out = replace_child(out, i, _abstract(ch, rho, v))
    return out


# ---------------------------------------------------------------------------
# Shrinking


def _expr_children(e) -> list:
    match e:
        case Lam(_, _, b) | TLam(_, b) | CLam(_, _, b) | Assume(_, b):
            return [b]
        case App(f, a):
            return [f, a]
        case TApp(f, _) | CApp(f, _) | Cast(f, _):
            return [f]
    return []


def _expr_replace(e, i: int, new):
    match e:
        case Lam(x, t, _):
            return Lam(x, t, new)
        case TLam(a, _):
            return TLam(a, new)
        case CLam(c, p, _):
            return CLam(c, p, new)
        case Assume(chi, _):
            return Assume(chi, new)
        case App(f, a):
            return App(new, a) if i == 0 else App(f, new)
        case TApp(_, t):
            return TApp(new, t)
        case CApp(_, g):
            return CApp(new, g)
        case Cast(_, g):
            return Cast(new, g)
    raise IndexError(i)


def _subterm_candidates(x, kids: Callable, replace: Callable) -> Iterator:
    """Every term obtained by replacing one subterm by one of its children."""
    for k in kids(x):
        yield k
    for i, ch in enumerate(kids(x)):
        for cand in _subterm_candidates(ch, kids, replace):
            yield replace(x, i, cand)


def shrink(x, fails: Callable, kind: str = "type", budget: int = 400):
    """Greedy minimisation by subterm replacement, preserving ``fails``."""
    if kind == "type":
        kids, repl = (lambda t: list(children(t))), replace_child
    else:
        kids, repl = _expr_children, _expr_replace
    tries = 0
    improved = True
    while improved and tries < budget:
        improved = False
        for cand in _subterm_candidates(x, kids, repl):
            tries += 1
            if tries > budget:
                break
            try:
                bad = fails(cand)
            except Exception:
                bad = False
            if bad:
                x = cand
                improved = True
                break
    return x


# ---------------------------------------------------------------------------
# Suites


@dataclass
class SuiteReport:
    suite: str
    cases: int = 0
    passed: int = 0
    failed: int = 0
    counterexamples: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def add(self, ok: bool, example: Optional[str] = None) -> None:
        self.cases += 1
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if example is not None and len(self.counterexamples) < 5:
                self.counterexamples.append(example)

    def bump(self, key: str, n: int = 1) -> None:
        self.stats[key] = self.stats.get(key, 0) + n

    def merge(self, other: "SuiteReport") -> None:
        self.cases += other.cases
        self.passed += other.passed
        self.failed += other.failed
        room = 5 - len(self.counterexamples)
        self.counterexamples += other.counterexamples[:max(0, room)]
        for k, v in other.stats.items():
            self.stats[k] = self.stats.get(k, 0) + v
        self.seconds += other.seconds

    def to_json(self) -> dict:
        return {"suite": self.suite, "cases": self.cases, "passed": self.passed,
                "failed": self.failed, "counterexamples": self.counterexamples,
                "stats": self.stats, "seconds": round(self.seconds, 3)}

    def summary(self) -> str:
        status = "ok" if self.ok else "FAILED"
        return (f"{self.suite}: {status} ({self.passed}/{self.cases} passed, "
                f"{self.seconds:.2f}s)")


def run_suite(name: str, world: World, cases: int) -> SuiteReport:
    """Check ``cases`` samples of one property against ``world``."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    rng = random.Random(f"suite:{name}:{world.seed}:{world.size}:{cases}")
    report = SuiteReport(name)
    start = time.perf_counter()
    if world.size > 0:
        globals()["_suite_" + name](world, cases, Gen(world, rng), report)
    report.seconds = time.perf_counter() - start
    return report


def _expr_pool(world: World, gen: Gen, cases: int) -> Iterator:
    for i in range(cases):
        if i < len(world.exprs):
            yield world.exprs[i]
        else:
            item = None
            while item is None:
                item = gen.closed_expr()
            yield item


def _preservation_fails(sig: Signature, e, fuel: int = 500) -> Optional[str]:
    try:
        ty = infer_expr(sig, Context(), e)
    except CheckError:
        return None
    ev = Evaluator(sig)
    for _ in range(fuel):
        r = ev.step(e)
        if not isinstance(r, Stepped):
            return None
        try:
            ty2 = infer_expr(sig, Context(), r.expr)
        except CheckError as err:
            return f"{r.rule} produced an ill-typed term: {err.diagnostic}"
        if not alpha_eq(ty, ty2):
            return f"{r.rule} changed the type from {ty} to {ty2}"
        e = r.expr
    return None


def _suite_preservation(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    sig = world.sig
    ev = Evaluator(sig, world.rewriter)
    for e, ty in _expr_pool(world, gen, cases):
        bad = None
        cur = e
        for _ in range(2000):
            r = ev.step(cur)
            if not isinstance(r, Stepped):
                break
            report.bump(r.rule)
            report.bump("steps")
            try:
                ty2 = infer_expr(sig, Context(), r.expr)
            except CheckError as err:
                bad = f"{r.rule} produced an ill-typed term: {err.diagnostic}"
                break
            if not alpha_eq(ty, ty2):
                bad = f"{r.rule} changed the type from {ty} to {ty2}"
                break
            cur = r.expr
        if bad is None:
            report.add(True)
        else:
            small = shrink(e, lambda x: _preservation_fails(sig, x) is not None, "expr")
            report.add(False, f"{small}  --  {_preservation_fails(sig, small) or bad}")


def _canonical(v, ty) -> bool:
    if isinstance(ty, Arrow):
        return isinstance(v, Lam)
    if isinstance(ty, Forall):
        return isinstance(v, TLam)
    if isinstance(ty, Qual):
        return isinstance(v, CLam)
    return isinstance(v, Const)


def _progress_fails(sig: Signature, e) -> Optional[str]:
    try:
        ty = infer_expr(sig, Context(), e)
        res, _ = Evaluator(sig).eval(e, 500)
    except (CheckError, FuelExhausted):
        return None
    if isinstance(res, Stuck):
        return f"stuck at {res.expr}: {res.reason}"
    if isinstance(res, Value) and not _canonical(res.expr, ty):
        return f"value {res.expr} is not canonical for {ty}"
    return None


def _suite_progress(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    sig = world.sig
    ev = Evaluator(sig, world.rewriter)
    for e, ty in _expr_pool(world, gen, cases):
        try:
            res, trace = ev.eval(e)
        except FuelExhausted:
            report.bump("fuel_exhausted")
            report.add(True)
            continue
        report.bump("steps", len(trace))
        bad = None
        if isinstance(res, Stuck):
            bad = f"stuck: {res.reason}"
        elif isinstance(res, Value):
            report.bump("values")
            if not _canonical(res.expr, ty):
                bad = f"value {res.expr} is not canonical for {ty}"
        elif isinstance(res, CoercedValue):
            report.bump("coerced_values")
            inner = res.expr.expr
            if not isinstance(inner, (Const, Lam, TLam, CLam)):
                bad = f"coerced value wraps a non-value {inner}"
        if bad is None:
            report.add(True)
        else:
            small = shrink(e, lambda x: _progress_fails(sig, x) is not None, "expr")
            report.add(False, f"{small}  --  {_progress_fails(sig, small) or bad}")


def _reducible_type(world: World, gen: Gen):
    for _ in range(50):
        t = gen.pretype_with_families()
        if world.rewriter.firing_redexes(t):
            return t
    return gen.pretype_with_families()


def _suite_measure(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    rw = world.rewriter
    steps = 0
    while steps < cases:
        t = _reducible_type(world, gen)
        start = fam_count(t)
        n = 0
        while steps < cases:
            firing = rw.firing_redexes(t)
            if not firing:
                break
            _, t2, _ = gen.rng.choice(firing)
            before, after = fam_count(t), fam_count(t2)
            steps += 1
            n += 1
            if after != before - 1:
                small = shrink(t, lambda x: _measure_fails(rw, x), "type")
                report.add(False, f"{t} -> {t2}: measure {before} -> {after} (minimal: {small})")
            else:
                report.add(True)
            t = t2
        if not rw.firing_redexes(t) and is_family_free(t):
            report.bump("chains_normalized")
            if n != start:
                report.add(False, f"chain from {start} family applications took {n} steps")


def _measure_fails(rw: Rewriter, t) -> bool:
    return any(fam_count(t2) != fam_count(t) - 1 for _, t2, _ in rw.firing_redexes(t))


def _peaks(rw: Rewriter, t) -> list:
    firing = rw.firing_redexes(t)
    return [(a[1], b[1]) for a, b in itertools.combinations(firing, 2)]


def _suite_local_confluence(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    rw = world.rewriter
    tries = 0
    while report.cases < cases and tries < cases * 20:
        tries += 1
        t = gen.pretype_with_families()
        # Walk a random prefix of a reduction so peaks also occur mid-chain.
        for _ in range(gen.rng.randrange(2)):
            nxt = rw.step_type(t, lambda fs: gen.rng.randrange(len(fs)))
            t = nxt or t
        if len(rw.firing_redexes(t)) < 2:
            # Some worlds rarely yield two redexes at once; pair samples up.
            t = TyCon("Pair", (t, _reducible_type(world, gen)))
        for t1, t2 in _peaks(rw, t):
            if report.cases >= cases:
                break
            if rw.join(t1, t2) is None:
                small = shrink(t, lambda x: any(rw.join(a, b) is None for a, b in _peaks(rw, x)))
                report.add(False, f"peak {t1} <~ {t} ~> {t2} does not join (minimal: {small})")
            else:
                report.add(True)


def _suite_strategy(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    rw = world.rewriter
    for i in range(cases):
        t = world.types[i] if i < len(world.types) else gen.pretype_with_families()
        n1, _ = rw.normalize(t, "innermost")
        n2, _ = rw.normalize(t, "rightmost")
        n3, _ = rw.normalize(t, random.Random(f"{world.seed}:{i}"))
        ok = alpha_eq(n1, n2) and alpha_eq(n1, n3)
        report.add(ok, None if ok else f"{t}: {n1} / {n2} / {n3}")


def _suite_consistency(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    rw = world.rewriter
    for _ in range(cases):
        g, a, c, ty = gen.closed_coercion()
        try:
            joined, witness, prop = rw.consistent_endpoints(g)
        except CheckError as err:
            report.add(False, f"generated coercion {g} is ill typed: {err.diagnostic}")
            continue
        bad = None
        if not joined:
            bad = f"endpoints of {g} do not join: {prop}"
        elif is_family_free(prop.lhs) and is_family_free(prop.rhs):
            report.bump("proper_endpoints")
            if not alpha_eq(prop.lhs, prop.rhs):
                bad = f"{g} relates distinct proper types: {prop}"
        elif not alpha_eq(witness, rw.normal_form(ty)):
            bad = f"common reduct {witness} differs from expected {rw.normal_form(ty)}"
        report.add(bad is None, bad)


def _suite_apart_stability(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    rng = gen.rng
    patterns = [eq.lhs_args for eqs in world.sig.axioms.values() for eq in eqs]
    tries = 0
    while report.cases < cases and tries < cases * 50:
        tries += 1
        if patterns and rng.random() < 0.5:
            sigma = rng.choice(patterns)
        else:
            n = rng.choice([1, 2])
            sigma = tuple(gen.open_type(("a", "b"), 2) for _ in range(n))
        tau = tuple(gen.open_type(("x", "y"), 2) for _ in sigma)
        if set().union(*(ftv(s) for s in sigma)) & {"x", "y", "z"}:
            continue
        if not apart(sigma, tau):
            continue
        theta = {v: gen.open_type(("x", "y", "z"), 2) for v in ("x", "y") if rng.random() < 0.8}
        tau2 = tuple(subst_types(theta, t) for t in tau)
        ok = apart(sigma, tau2)
        report.add(ok, None if ok else f"{sigma} apart from {tau} but not from {tau2}")


def _suite_totality_link(world: World, cases: int, gen: Gen, report: SuiteReport) -> None:
    ev = Evaluator(world.sig, world.rewriter)
    for f in world.total_families:
        arity = world.sig.families[f].arity
        for args in arg_tuples(arity, 4):
            try:
                q = ev.total_eval(f, args)
                got = check_coercion(world.sig, Context(), q.proof)
                check_type(world.sig, Context(), q.witness)
            except (CheckError, PreconditionError) as err:
                report.add(False, f"{f} {' '.join(map(str, args))}: {err}")
                continue
            want = Prop(FamApp(f, args), q.witness)
            ok = alpha_eq(got, want)
            report.add(ok, None if ok else f"proof shows {got}, expected {want}")


# ---------------------------------------------------------------------------
# Campaigns


def fuzz(seed: int = 0, cases: int = 1000, suites: Iterable[str] = SUITES,
         worlds: int = 10, size: int = 3) -> dict:
    """Run each suite over ``worlds`` generated worlds, splitting ``cases``
    evenly; returns merged reports keyed by suite name."""
    suites = list(suites)
    worlds = max(1, worlds)
    per = [cases // worlds + (1 if i < cases % worlds else 0) for i in range(worlds)]
    merged = {s: SuiteReport(s) for s in suites}
    for i in range(worlds):
        need_exprs = max(per[i] if {"preservation", "progress"} & set(suites) else 0, 0)
        w = gen_world(seed + i, size, n_exprs=min(need_exprs, 10 * size))
        for s in suites:
            n = per[i] if s != "totality_link" else 0
            merged[s].merge(run_suite(s, w, n))
    return merged


# ---------------------------------------------------------------------------
# Random programs for round-trip testing


def gen_program(seed: int) -> P.Program:
    """A random program mixing kernel and surface declarations."""
    rng = random.Random(f"program:{seed}")
    w = gen_world(seed, rng.randint(1, 3), n_exprs=rng.randint(0, 4))
    decls: list = [P.DataDecl(h, n) for h, n in w.sig.ty_cons.items()]
    decls += [P.ConstDecl(k, t) for k, t in w.sig.term_consts.items()]
    decls += [P.FamilyDecl(f, info.arity, info.total) for f, info in w.sig.families.items()]
    decls += [P.AxiomDecl(ax, eqs[0].fam, eqs) for ax, eqs in w.sig.axioms.items()]
    for i, (e, ty) in enumerate(w.exprs):
        decls.append(P.TermDecl(f"t{i}", ty if rng.random() < 0.5 else None, e))
    g = Gen(w, rng)
    decls.append(P.DataKindDecl("Nat", (("NZ", ()), ("NS", (TyCon("Nat"),)))))
    fams = [f"SF{i}" for i in range(rng.randint(1, 3))]
    surface_t = lambda vs: _surface_type(g, vs, fams, 2)
    for k, f in enumerate(fams):
        params = tuple((f"v{j}", "Nat" if rng.random() < 0.3 else None) for j in range(2))
        kind = rng.random()
        if kind < 0.4:
            decls.append(P.TypeFamilyDecl(f, params, False, None))
            for _ in range(rng.randint(0, 2)):
                lhs = tuple(g.open_type(("u", "w"), 1) for _ in params)
                decls.append(P.TypeInstanceDecl(f, lhs, surface_t(("u", "w"))))
        else:
            eqs = tuple(P.FamilyEquation(f, tuple(g.open_type(("u",), 1) for _ in params),
                                         surface_t(("u",)))
                        for _ in range(rng.randint(1, 3)))
            decls.append(P.TypeFamilyDecl(f, params, kind < 0.7, eqs))
            if rng.random() < 0.3:
                decls.append(P.TotalPragma(f))
    decls.append(P.ClassDecl("Base", ("p",), (), ("AF",), False, ()))
    decls.append(P.ClassDecl("Sub", ("p",), (P.Pred("Base", (TyVar("p"),)),), (), False, ()))
    head = g.open_type(("p",), 2)
    decls.append(P.InstanceDecl((P.Pred("Sub", (TyVar("p"),)),) if "p" in ftv(head) else (),
                                P.Pred("Base", (head,)),
                                (P.AssocDef("AF", (head,), surface_t(("p",))),)))
    closed_insts = tuple(P.InstanceDecl((), P.Pred("Ord2", (g.open_type(("p", "q"), 1),
                                                             g.open_type(("p", "q"), 1))))
                         for _ in range(rng.randint(1, 3)))
    decls.append(P.ClassDecl("Ord2", ("p", "q"), (), (), True, closed_insts))
    return P.Program(tuple(decls))


def _surface_type(g: Gen, vs: tuple, fams: list, depth: int):
    rng = g.rng
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.3:
            return FamApp(rng.choice(fams), (g.open_type(vs, 1), g.open_type(vs, 1)))
        return g.open_type(vs, 1)
    k = rng.random()
    if k < 0.4:
        return TyCon("List", (_surface_type(g, vs, fams, depth - 1),))
    if k < 0.6:
        return Arrow(_surface_type(g, vs, fams, depth - 1), _surface_type(g, vs, fams, depth - 1))
    if k < 0.75:
        return Forall("z", _surface_type(g, vs + ("z",), fams, depth - 1))
    if k < 0.9:
        pred = P.Pred("Base", (g.open_type(vs, 1),))
        return P.Constrained((pred,), _surface_type(g, vs, fams, depth - 1))
    return FamApp(rng.choice(fams), (_surface_type(g, vs, fams, depth - 1), g.open_type(vs, 1)))


__all__ = ["SUITES", "World", "Gen", "SuiteReport", "gen_world", "run_suite", "fuzz",
           "enumerate_small", "closed_types", "arg_tuples", "shrink", "lift", "contraction",
           "gen_program", "NAT_SIG", "FAMILY_BIAS"]
