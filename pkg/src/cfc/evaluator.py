"""Call-by-name small-step evaluation of closed expressions.

Values are constants and the three abstraction forms; a value wrapped in a
single cast is a coerced value.  Casts that block a beta step are pushed
inward by the push rules, and nested casts fuse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .diagnostics import CheckError, PreconditionError, fail
from .rewrite import Rewriter
from .syntax import (App, Assume, CApp, Cast, CLam, Const, Context, EvalResolution, Inst, Lam,
                     Nth, Signature, Subst, Sym, TApp, TLam, Trans, Var, ftv, subst_apply)
from .typecheck import check_type

DEFAULT_FUEL = 10_000


@dataclass(frozen=True)
class Stepped:
    expr: object
    rule: str


@dataclass(frozen=True)
class Value:
    expr: object


@dataclass(frozen=True)
class CoercedValue:
    expr: object


@dataclass(frozen=True)
class Stuck:
    expr: object
    reason: str


StepResult = Union[Stepped, Value, CoercedValue, Stuck]


class FuelExhausted(Exception):
    def __init__(self, last, trace: list):
        super().__init__(f"no value after {len(trace)} steps")
        self.last = last
        self.trace = trace


def is_value(e) -> bool:
    return isinstance(e, (Const, Lam, TLam, CLam))


class Evaluator:
    def __init__(self, sig: Signature, rewriter: Optional[Rewriter] = None):
        self.sig = sig
        self.rewriter = rewriter or Rewriter(sig)

    # -- assumption resolution ---------------------------------------

    def total_eval(self, fam: str, args: Sequence) -> EvalResolution:
        """Reduce a total family at closed proper arguments, with proof."""
        info = self.sig.families.get(fam)
        if info is None or not info.total:
            raise PreconditionError(f"{fam} is not a total family")
        args = tuple(args)
        if len(args) != info.arity:
            raise PreconditionError(f"{fam} expects {info.arity} argument(s)")
        for a in args:
            if ftv(a):
                raise PreconditionError(f"argument {a} is not closed")
            check_type(self.sig, Context(), a)
        red = self.rewriter.top_reduce(fam, args)
        if red is None:
            raise fail("NoMatchingEquation",
                       f"total family {fam} does not reduce at {' '.join(map(str, args))}; "
                       "its totality claim is wrong", "S_Resolve")
        return EvalResolution(red.reduct, red.proof)

    # -- stepping ------------------------------------------------------

    def step(self, e) -> StepResult:
        if is_value(e):
            return Value(e)
        match e:
            case Cast(inner, g2):
                if is_value(inner):
                    return CoercedValue(e)
                if isinstance(inner, Cast) and is_value(inner.expr):
                    return Stepped(Cast(inner.expr, Trans(inner.co, g2)), "S_Trans")
                r = self.step(inner)
                if isinstance(r, Stepped):
                    return Stepped(Cast(r.expr, g2), "S_Cast")
                return _stuck(e, r)
            case App(fn, arg):
                if isinstance(fn, Lam):
                    return Stepped(subst_apply(Subst(tms={fn.var: arg}), fn.body), "S_Beta")
                if isinstance(fn, Cast) and is_value(fn.expr):
                    g = fn.co
                    pushed = App(fn.expr, Cast(arg, Sym(Nth(0, g))))
                    return Stepped(Cast(pushed, Nth(1, g)), "S_Push")
                r = self.step(fn)
                if isinstance(r, Stepped):
                    return Stepped(App(r.expr, arg), "S_App")
                return _stuck(e, r)
            case TApp(fn, ty):
                if isinstance(fn, TLam):
                    return Stepped(subst_apply(Subst(tys={fn.var: ty}), fn.body), "S_TBeta")
                if isinstance(fn, Cast) and is_value(fn.expr):
                    return Stepped(Cast(TApp(fn.expr, ty), Inst(fn.co, ty)), "S_TPush")
                r = self.step(fn)
                if isinstance(r, Stepped):
                    return Stepped(TApp(r.expr, ty), "S_TApp")
                return _stuck(e, r)
            case CApp(fn, co):
                if isinstance(fn, CLam):
                    return Stepped(subst_apply(Subst(cos={fn.covar: co}), fn.body), "S_CBeta")
                if isinstance(fn, Cast) and is_value(fn.expr):
                    eta = fn.co
                    arg = Trans(Trans(Nth(0, eta), co), Sym(Nth(1, eta)))
                    return Stepped(Cast(CApp(fn.expr, arg), Nth(2, eta)), "S_CPush")
                r = self.step(fn)
                if isinstance(r, Stepped):
                    return Stepped(CApp(r.expr, co), "S_CApp")
                return _stuck(e, r)
            case Assume(chi, body):
                try:
                    q = self.total_eval(chi.fam, chi.args)
                except (CheckError, PreconditionError) as err:
                    return Stuck(e, f"cannot resolve assumption: {err}")
                theta = Subst(tys={chi.var: q.witness}, cos={chi.covar: q.proof})
                return Stepped(subst_apply(theta, body), "S_Resolve")
            case Var(x):
                return Stuck(e, f"free variable {x}")
        raise TypeError(f"step: not an expression {e!r}")

    def eval(self, e, fuel: int = DEFAULT_FUEL):
        """Step until a (coerced) value.  Returns ``(final_result, trace)`` where
        ``trace`` lists every ``Stepped`` result in order."""
        trace: list = []
        for _ in range(fuel + 1):
            r = self.step(e)
            if not isinstance(r, Stepped):
                return r, trace
            if len(trace) == fuel:
                break
            trace.append(r)
            e = r.expr
        raise FuelExhausted(e, trace)


def _stuck(e, inner: StepResult) -> Stuck:
    if isinstance(inner, Stuck):
        return Stuck(e, inner.reason)
    what = "value" if isinstance(inner, Value) else "coerced value"
    return Stuck(e, f"no rule applies to {type(e).__name__} with a {what} in head position")


def step(sig: Signature, e) -> StepResult:
    return Evaluator(sig).step(e)


def eval_expr(sig: Signature, e, fuel: int = DEFAULT_FUEL):
    return Evaluator(sig).eval(e, fuel)


def total_eval(sig: Signature, fam: str, args: Sequence) -> EvalResolution:
    return Evaluator(sig).total_eval(fam, args)


__all__ = ["Stepped", "Value", "CoercedValue", "Stuck", "StepResult", "FuelExhausted",
           "Evaluator", "step", "eval_expr", "total_eval", "is_value", "DEFAULT_FUEL"]
