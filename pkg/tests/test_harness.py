import pytest

from cfc import harness
from cfc.harness import (NAT_SIG, Gen, closed_types, contraction, enumerate_small, fuzz,
                         gen_world, lift, shrink)
from cfc.rewrite import Rewriter
from cfc.signature import check_good_signature, check_signature
from cfc.syntax import Context, FamApp, Refl, TyCon, fam_count, is_family_free, type_size
from cfc.typecheck import check_coercion, infer_expr

from .conftest import ty


@pytest.fixture(scope="module")
def world():
    return gen_world(1, 3)


def test_deterministic():
    a, b = gen_world(1, 3), gen_world(1, 3)
    fields = lambda w: (w.sig.families, w.sig.axioms, w.sig.term_consts, w.types, w.exprs)
    assert fields(a) == fields(b)
    assert fields(gen_world(2, 3)) != fields(a)


def test_size_zero_world_is_empty():
    w = gen_world(0, 0)
    assert not w.sig.families and not w.exprs and not w.types
    assert all(r.cases == 0 for r in fuzz(0, 10, worlds=1, size=0).values())


def test_world_signature_is_good(world):
    check_signature(world.sig)
    check_good_signature(world.sig)
    assert world.total_families


def test_world_expressions_are_well_typed(world):
    for e, t in world.exprs:
        assert infer_expr(world.sig, Context(), e) == t


def test_closed_types_sizes():
    ts = closed_types(3)
    assert all(type_size(t) <= 3 for t in ts)
    assert len(ts) == len(set(ts))
    assert TyCon("List", (TyCon("Int"),)) in ts


def test_enumerate_small():
    ts = list(enumerate_small(1, 4))
    assert ty("Plus Z Z") in ts and ty("S (Plus Z Z)") in ts
    assert ty("Plus (Plus Z Z) Z") not in ts
    assert all(fam_count(t) <= 1 and type_size(t) <= 4 for t in ts)


def test_contraction_and_lift():
    rw = Rewriter(NAT_SIG)
    t = ty("S (Plus (S Z) (Plus Z Z))")
    co, nf = contraction(rw, t)
    assert nf == ty("S (S Z)") and is_family_free(nf)
    assert check_coercion(NAT_SIG, Context(), co).lhs == t
    g = lift(TyCon("S", (TyCon("Z"),)), (0,), Refl(TyCon("Z")))
    p = check_coercion(NAT_SIG, Context(), g)
    assert p.lhs == p.rhs == ty("S Z")


def test_shrink_preserves_failure():
    t = ty("S (Plus (S (Plus Z Z)) (S Z))")
    fails = lambda u: isinstance(u, FamApp) or any(
        isinstance(x, FamApp) for x in [u] + list(getattr(u, "args", ())))
    small = shrink(t, lambda u: fam_count(u) >= 1)
    assert fam_count(small) >= 1
    assert type_size(small) <= type_size(ty("Plus Z Z"))
    assert fails(small)


def test_shrink_expression(world):
    e, t = max(world.exprs, key=lambda p: len(repr(p[0])))
    small = shrink(e, lambda x: True, kind="expr")
    assert len(repr(small)) <= len(repr(e))


def test_provable_props_check(world):
    import random
    g = Gen(world, random.Random(0))
    for _ in range(30):
        co, lhs, rhs, _ = g.closed_coercion()
        p = check_coercion(world.sig, Context(), co)
        assert (p.lhs, p.rhs) == (lhs, rhs)


@pytest.mark.parametrize("suite", harness.SUITES)
def test_each_suite_passes_small(suite):
    [r] = fuzz(7, 30, [suite], worlds=3).values()
    assert r.ok, r.counterexamples
    assert r.cases > 0


def test_run_suite_rejects_unknown(world):
    with pytest.raises(ValueError):
        harness.run_suite("nope", world, 1)

