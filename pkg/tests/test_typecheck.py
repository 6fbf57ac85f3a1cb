import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfc.diagnostics import CheckError
from cfc.harness import Gen, gen_world
from cfc.syntax import (AxiomUse, CoBind, Context, EvalAssumption, EvalResolution, Prop, Refl,
                        TmBind, TyBind, TyCon, TyVar, alpha_eq)
from cfc.typecheck import (check_coercion, check_ctx, check_prop, check_resolutions, check_type,
                           infer_expr)

from .conftest import co, ex, ty

E = Context()


def code_of(fn, *args):
    with pytest.raises(CheckError) as info:
        fn(*args)
    return info.value.code


def test_check_type(plus):
    check_type(plus.sig, E, ty("Int -> Int"))
    assert code_of(check_type, plus.sig, E, ty("Plus Z Z")) == "FamilyOutsideProp"
    check_type(plus.sig, E, ty("forall a. (Plus Z Z ~ a) => a -> a"))
    assert code_of(check_type, plus.sig, E, ty("a")) == "UnboundTyVar"
    assert code_of(check_type, plus.sig, E, ty("S")) == "ArityMismatch"
    assert code_of(check_type, plus.sig, E, ty("Nope")) == "UndeclaredTyCon"


def test_check_prop(plus):
    check_prop(plus.sig, E, Prop(ty("Int"), ty("Int")))
    check_prop(plus.sig, E, Prop(ty("Plus Z Z"), ty("Z")))
    assert code_of(check_prop, plus.sig, E, Prop(ty("Plus (Plus Z Z) Z"), ty("Z"))) == \
        "NestedFamilyInProp"


def test_check_ctx(plus):
    check_ctx(plus.sig, E)
    check_ctx(plus.sig, Context([TyBind("a"), CoBind("c", Prop(ty("Plus a a"), ty("a")))]))
    assert code_of(check_ctx, plus.sig, Context([TyBind("a"), TyBind("a")])) == \
        "DuplicateBinding"
    assert code_of(check_ctx, plus.sig, Context([TmBind("x", ty("b"))])) == \
        "IllFormedBindingType"


def test_check_coercion(plus, equ):
    assert check_coercion(plus.sig, E, co("refl Int")) == Prop(ty("Int"), ty("Int"))
    assert check_coercion(plus.sig, E, co("plusAx[0] Z")) == Prop(ty("Plus Z Z"), ty("Z"))
    assert code_of(check_coercion, equ.sig, E, co("equAx[1] Int Int")) == \
        "ConflictWithEarlierEquation"
    assert check_coercion(equ.sig, E, co("equAx[1] Int Bool")) == \
        Prop(ty("Equ Int Bool"), ty("False"))


def test_coercion_errors(plus):
    assert code_of(check_coercion, plus.sig, E, co("c")) == "UnboundCoVar"
    assert code_of(check_coercion, plus.sig, E, co("nth 0 (refl Int)")) == "BadDecomposition"
    assert code_of(check_coercion, plus.sig, E, co("refl Int @ Int")) == "BadDecomposition"
    assert code_of(check_coercion, plus.sig, E, co("plusAx[5] Z")) == "AxiomIndexOutOfRange"
    assert code_of(check_coercion, plus.sig, E, co("plusAx[1] Z Z")) == "ResolutionMismatch"


def test_recursive_axiom_use(plus):
    prop = check_coercion(plus.sig, E, co("plusAx[1] Z Z {(Z | plusAx[0] Z)}"))
    assert prop == Prop(ty("Plus (S Z) Z"), ty("S Z"))


def test_nth_and_inst(plus):
    assert check_coercion(plus.sig, E, co("nth 1 (refl (Int -> Z))")) == Prop(ty("Z"), ty("Z"))
    p = check_coercion(plus.sig, E, co("(forall a. refl (a -> a)) @ Int"))
    assert p == Prop(ty("Int -> Int"), ty("Int -> Int"))


def test_check_resolutions(plus):
    chi = EvalAssumption("r", "c", "Plus", (ty("Z"), ty("Z")))
    check_resolutions(plus.sig, E, [], [])
    check_resolutions(plus.sig, E, [EvalResolution(ty("Z"), co("plusAx[0] Z"))], [chi])
    assert code_of(check_resolutions, plus.sig, E,
                   [EvalResolution(ty("Int"), co("refl Int"))], [chi]) == "ProofPropMismatch"
    assert code_of(check_resolutions, plus.sig, E, [], [chi]) == "LengthMismatch"


def test_infer_expr(plus):
    assert infer_expr(plus.sig, E, ex("\\x:Int. x")) == ty("Int -> Int")
    assert infer_expr(plus.sig, E, ex("assume (a | c : Plus Z Z ~ a) in MkInt")) == ty("Int")
    assert code_of(infer_expr, plus.sig, E,
                   ex("assume (a | c : Plus Z Z ~ a) in (\\x:a. x)")) == "SkolemEscape"


def test_infer_expr_errors(plus, onlyint):
    assert code_of(infer_expr, plus.sig, E, ex("x")) == "UnboundVar"
    assert code_of(infer_expr, plus.sig, E, ex("MkInt MkInt")) == "AppShapeMismatch"
    assert code_of(infer_expr, plus.sig, E, ex("MkInt |> refl Z")) == "CastPropMismatch"
    assert code_of(infer_expr, plus.sig, E,
                   ex("MkInt |> sym (plusAx[0] Int) ; sym (plusAx[0] Int)")) == \
        "TransMismatch"
    assert code_of(infer_expr, onlyint.sig, E,
                   ex("assume (a | c : OnlyInt Int ~ a) in MkInt")) == "AssumeOnPartialFamily"


def test_cast_to_pretype_rejected(plus):
    e = ex("MkZ |> sym (plusAx[0] Z)")
    sig = plus.sig
    from cfc.syntax import Signature
    sig2 = Signature(sig.ty_cons, {**sig.term_consts, "MkZ": ty("Z")}, sig.families, sig.axioms)
    assert code_of(infer_expr, sig2, E, e) == "ImproperCastTarget"


def test_type_regularity_and_weakening():
    w = gen_world(7, 3, n_exprs=40)
    for e, t in w.exprs:
        got = infer_expr(w.sig, E, e)
        check_type(w.sig, E, got)
        assert alpha_eq(got, t)
        weak = Context([TyBind("zz"), TmBind("yy", TyCon("Int"))])
        assert alpha_eq(infer_expr(w.sig, weak, e), t)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_type_substitution_preserves_typing(seed):
    """Typing an open body then instantiating its type variable agrees with
    typing the instantiated body."""
    import random
    from cfc.syntax import TLam, TApp
    w = gen_world(seed % 5, 2, n_exprs=0)
    g = Gen(w, random.Random(seed))
    ctx = Context([TyBind("q")])
    target = g.inhabited_type(2, ("q",))
    body = g.expr(ctx, target, 2)
    if body is None:
        return
    rho = g.proper_type(2)
    poly = infer_expr(w.sig, E, TLam("q", body))
    inst = infer_expr(w.sig, E, TApp(TLam("q", body), rho))
    from cfc.syntax import subst_types
    assert alpha_eq(inst, subst_types({"q": rho}, poly.body))


def test_determinism(plus):
    e = ex("(\\x:Int. x) MkInt")
    assert infer_expr(plus.sig, E, e) == infer_expr(plus.sig, E, e)
    g = co("sym (plusAx[0] Z) ; plusAx[0] Z")
    assert check_coercion(plus.sig, E, g) == check_coercion(plus.sig, E, g)
