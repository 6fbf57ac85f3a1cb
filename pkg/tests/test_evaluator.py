import pytest

from cfc.diagnostics import PreconditionError
from cfc.evaluator import CoercedValue, Evaluator, FuelExhausted, Stepped, Value
from cfc.syntax import Context, alpha_eq
from cfc.typecheck import check_coercion, infer_expr

from .conftest import co, ex, ty


def test_beta(plus):
    r = Evaluator(plus.sig).step(ex("(\\x:Int. x) MkInt"))
    assert r == Stepped(ex("MkInt"), "S_Beta")


def test_cast_fusion(plus):
    r = Evaluator(plus.sig).step(ex("(MkInt |> refl Int) |> refl Int"))
    assert r == Stepped(ex("MkInt |> refl Int ; refl Int"), "S_Trans")


def test_resolve(plus):
    ev = Evaluator(plus.sig)
    r = ev.step(ex("assume (a | c : Plus Z Z ~ a) in MkInt"))
    assert r == Stepped(ex("MkInt"), "S_Resolve")


def test_resolve_substitutes_witness_and_proof(plus):
    ev = Evaluator(plus.sig)
    e = ex("assume (a | c : Plus Z Z ~ a) in (/\\b. \\x:Int. x) [a]")
    r = ev.step(e)
    assert r.rule == "S_Resolve" and r.expr == ex("(/\\b. \\x:Int. x) [Z]")


def test_eval_examples(plus):
    ev = Evaluator(plus.sig)
    res, trace = ev.eval(ex("(\\x:Int. x) ((\\y:Int. y) MkInt)"))
    assert res == Value(ex("MkInt")) and len(trace) == 2
    res, trace = ev.eval(ex("MkInt"))
    assert res == Value(ex("MkInt")) and trace == []


def test_push_trace(plus):
    ev = Evaluator(plus.sig)
    res, trace = ev.eval(ex("((\\x:Int. x) |> refl Int -> refl Int) MkInt"))
    assert [s.rule for s in trace] == ["S_Push", "S_Cast", "S_Trans"]
    assert isinstance(res, CoercedValue)
    first = trace[0].expr
    assert first == ex("(\\x:Int. x) (MkInt |> sym (nth 0 (refl Int -> refl Int)))"
                       " |> nth 1 (refl Int -> refl Int)")


def test_tpush_and_cpush(plus):
    ev = Evaluator(plus.sig)
    e = ex("((/\\a. \\x:Int. x) |> forall a. refl (Int -> Int)) [Z]")
    assert ev.step(e).rule == "S_TPush"
    e = ex("((\\c:(Plus Z Z ~ Z). MkInt) |> (refl (Plus Z Z) ~ refl Z) => refl Int) <plusAx[0] Z>")
    r = ev.step(e)
    assert r.rule == "S_CPush"
    assert alpha_eq(infer_expr(plus.sig, Context(), r.expr), ty("Int"))


def test_fuel(plus):
    with pytest.raises(FuelExhausted):
        Evaluator(plus.sig).eval(ex("(\\x:Int. x) ((\\y:Int. y) MkInt)"), 1)


def test_total_eval(plus):
    ev = Evaluator(plus.sig)
    q = ev.total_eval("Plus", (ty("Z"), ty("Z")))
    assert q.witness == ty("Z") and q.proof == co("plusAx[0] Z")
    q = ev.total_eval("Plus", (ty("S Z"), ty("Z")))
    assert q.witness == ty("S Z") and q.proof == co("plusAx[1] Z Z {(Z | plusAx[0] Z)}")
    assert check_coercion(plus.sig, Context(), q.proof).lhs == ty("Plus (S Z) Z")


def test_total_eval_on_partial_family(onlyint):
    with pytest.raises(PreconditionError):
        Evaluator(onlyint.sig).total_eval("OnlyInt", (ty("Int"),))


def test_total_eval_requires_closed_proper_args(plus):
    with pytest.raises(PreconditionError):
        Evaluator(plus.sig).total_eval("Plus", (ty("a"), ty("Z")))


def test_corpus_terms_evaluate(plus, nat):
    for mod in (plus, nat):
        ev = Evaluator(mod.sig)
        for info in mod.terms.values():
            res, trace = ev.eval(info.closed)
            assert isinstance(res, (Value, CoercedValue))
            for s in trace:
                assert alpha_eq(infer_expr(mod.sig, Context(), s.expr), info.ty)
