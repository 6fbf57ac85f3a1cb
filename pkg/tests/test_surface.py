import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfc import load_source
from cfc.diagnostics import CheckError
from cfc.harness import arg_tuples
from cfc.program import Pred
from cfc.rewrite import Rewriter
from cfc.surface import WILD, check_totality, flatten_equation, ordered_ftv
from cfc.syntax import Arrow, FamApp, TyCon, TyVar

from .conftest import corpus, ty


def T(src, fams=()):
    from cfc.parser import parse_type
    return parse_type(src, ("Elem", "F", "G", "Plus", "Loop", "AF") + tuple(fams))


def P(cls, *args):
    return Pred(cls, tuple(T(a) for a in args))


@pytest.fixture(scope="module")
def collects():
    return corpus("collects.cfc")


def unguarded(env, preds, tyvars, t):
    with pytest.raises(CheckError) as info:
        env.st_check_type(preds, tyvars, t)
    assert info.value.code == "UnguardedFamilyUse"
    return info.value.diagnostic.extra["predicate"]


def test_st_check_type_examples(collects, nat):
    collects.env.st_check_type([P("Collects", "c")], ["c"], T("Elem c -> c -> c"))
    src = "data Int : 0\ndata Bool : 0\nclass C a where { type F a }\ninstance C Int where { type F Int = Int }"
    env = load_source(src).env
    assert unguarded(env, [], [], T("F Bool")) == "C Bool"
    env.st_check_type([], [], T("F Int"))
    nat.env.st_check_type([], ["a", "m", "n"], T("Vec a (Plus m n)"))


def test_st_check_type_scope_and_arity(collects):
    with pytest.raises(CheckError) as info:
        collects.env.st_check_type([], [], T("List b"))
    assert info.value.code in ("UnboundTyVar", "ArityMismatch")
    with pytest.raises(CheckError) as info:
        collects.env.st_check_type([], ["b"], T("b"))
        collects.env.st_check_type([], [], T("b"))
    assert info.value.code == "UnboundTyVar"


def test_qualified_type_discharges_its_own_guard(collects):
    t = T("forall c. Collects c => Elem c -> c")
    collects.env.st_check_type([], [], t)
    assert collects.env.infer_constraints([], t) == ()


def test_entails_examples():
    env = load_source("data Int : 0\nclass C a\nclass C2 a\ninstance C2 Int").env
    assert env.entails([P("C", "a")], P("C", "a"))
    assert env.entails([], P("C2", "Int"))
    assert not env.entails([], P("C2", "a"))


def test_closed_class_commits_to_first_instance():
    env = corpus("closed_class.cfc").env
    r = env.entails([], P("Sub", "Sum Int Bool", "Sum Int Bool"))
    assert r and r.derivation.source == "instance Sub f f"
    r = env.entails([], P("Sub", "Int", "Sum Bool Int"))
    assert r and r.derivation.source == "instance Sub f g => Sub f (Sum h g)"
    assert not env.entails([], P("Sub", "Int", "Bool"))
    # Not apart from an earlier head, so resolution waits rather than skipping it.
    assert not env.entails([], P("Sub", "a", "Sum b a"))


def test_superclass_entailment():
    env = corpus("superclass.cfc").env
    r = env.entails([P("D", "a")], P("C", "a"))
    assert r and r.derivation.by == "superclass"
    env.st_check_type([P("D", "a")], ["a"], T("F a"))


def test_depth_exceeded_reported_distinctly():
    env = load_source("data Int : 0\ndata List : 1\nclass D a\ninstance D [a] => D a").env
    r = env.entails([], P("D", "Int"))
    assert not r and r.depth_exceeded
    r = load_source("data Int : 0\nclass D a").env.entails([], P("D", "Int"))
    assert not r and not r.depth_exceeded


def test_entailment_monotone():
    env = corpus("closed_class.cfc").env
    assert env.entails([P("Sub", "a", "b"), P("Sub", "b", "c")], P("Sub", "a", "b"))


def test_infer_constraints_examples(collects):
    assert collects.env.infer_constraints(["c"], T("Elem c -> c -> c")) == (P("Collects", "c"),)
    assert collects.env.infer_constraints(["a"], T("a -> a")) == ()
    env = corpus("elaborate.cfc").env
    assert env.infer_constraints(["t"], T("G Int t")) == (P("CG", "Int", "t"),)


def test_infer_drops_predicates_entailed_by_instances(collects):
    assert collects.env.infer_constraints(["a"], T("Elem [a] -> a")) == ()


def test_infer_keeps_guard_over_subclass():
    env = corpus("superclass.cfc").env
    assert env.infer_constraints(["a"], T("F a")) == (P("C", "a"),)


def test_infer_unliftable_guard(collects):
    with pytest.raises(CheckError) as info:
        collects.env.infer_constraints([], T("forall c. Elem c -> c"))
    assert info.value.code == "UnliftableConstraint"


_ENV_SRC = """data Int : 0
data List : 1
data Maybe : 1
class A a where { type FA a }
class B a b where { type FB a b }
class A a => S a
instance A Int where { type FA Int = Int }
instance A a => A [a] where { type FA [a] = FA a }
instance B Int b where { type FB Int b = b }
"""
_ENV = load_source(_ENV_SRC).env


def _surface_types():
    leaf = st.sampled_from([TyVar("a"), TyVar("b"), TyCon("Int")])

    def ext(inner):
        return st.one_of(
            st.builds(lambda x: TyCon("List", (x,)), inner),
            st.builds(Arrow, inner, inner),
            st.builds(lambda x: FamApp("FA", (x,)), inner),
            st.builds(lambda x, y: FamApp("FB", (x, y)), inner, inner))
    return st.recursive(leaf, ext, max_leaves=6)


@settings(max_examples=200, deadline=None)
@given(_surface_types())
def test_inferred_context_is_sound_and_minimal(t):
    vs = ordered_ftv(t)
    preds = _ENV.infer_constraints(vs, t)
    _ENV.st_check_type(preds, vs, t)
    for i in range(len(preds)):
        fewer = preds[:i] + preds[i + 1:]
        with pytest.raises(CheckError):
            _ENV.st_check_type(fewer, vs, t)


@settings(max_examples=100, deadline=None)
@given(_surface_types(), st.sampled_from([P("A", "a"), P("S", "b"), P("B", "a", "b")]))
def test_st_check_monotone(t, extra):
    vs = sorted(set(ordered_ftv(t)) | {"a", "b"})
    preds = _ENV.infer_constraints(vs, t)
    _ENV.st_check_type(preds + (extra,), vs, t)


def test_elaboration_examples():
    mod = corpus("elaborate.cfc")
    assert mod.ok
    inst = [d for d in mod.elaborated if type(d).__name__ == "InstanceDecl"]
    assert [(d.context, d.head) for d in inst] == \
        [((P("CG", "Int", "t"),), Pred("CF", (T("Int"), T("Maybe t"))))]
    mod = corpus("loopy.cfc")
    assert mod.ok
    [i] = [d for d in mod.elaborated if type(d).__name__ == "InstanceDecl"]
    assert i.context == (Pred("CLoop", ()),) and i.head == Pred("CLoop", ())
    mod = load_source("type family F t")
    [c] = mod.elaborated
    assert c.name == "CF" and c.assoc == ("F",) and mod.env.classes["CF"].instances == []


def test_flatten_equation():
    eq = flatten_equation("Plus", (T("S m"), T("n")), T("S (Plus m n)"))
    assert [(a.var, a.covar, a.fam) for a in eq.assumps] == [("r'", "c0", "Plus")]
    assert eq.rhs == T("S r'") and eq.tyvars == ("m", "n")
    eq = flatten_equation("Quad", (T("n"),), T("Double (Double n)", ("Double",)))
    assert [a.args for a in eq.assumps] == [(T("n"),), (TyVar("r'"),)]
    assert eq.rhs == TyVar("r'2")


NAT = {"Nat": (("Z", ()), ("S", (TyCon("Nat"),)))}


def test_totality_examples():
    plus = [((T("Z"), T("n")), T("n")), ((T("S m"), T("n")), T("S (Plus m n)"))]
    assert check_totality("Plus", [("m", "Nat"), ("n", "Nat")], plus, NAT)
    r = check_totality("OnlyInt", [("a", None)], [((T("Int"),), T("True"))], NAT)
    assert not r and r.uncovered == (WILD,)
    r = check_totality("Loop", [], [((), T("[Loop]", ("Loop",)))], NAT)
    assert not r and "Loop" in r.reason
    r = check_totality("OnlyInt", [("a", None)], [((T("Int"),), T("True"))], NAT, pragma=True)
    assert r and r.unsafe


def test_totality_rejects_unknown_callee_and_swapped_recursion():
    calls_partial = [((T("n"),), T("G n n", ("G",)))]
    assert not check_totality("H", [("n", "Nat")], calls_partial, NAT)
    assert check_totality("H", [("n", "Nat")], calls_partial, NAT, total_families={"G"})
    # Each call shrinks some argument, but no single position always shrinks.
    swap = [((T("Z"), T("b")), T("Z")), ((T("a"), T("Z")), T("Z")),
            ((T("S a"), T("S b")), T("H (S (S a)) b", ("H",)))]
    swap2 = swap[:2] + [((T("S a"), T("S b")), T("H b (S (S a))", ("H",)))]
    assert not check_totality("H", [("a", "Nat"), ("b", "Nat")], swap2, NAT)


def test_total_module_diagnostics():
    assert [d.code for d in corpus("onlyint_total.cfc").diagnostics] == ["NotTotal"]
    mod = corpus("pragma.cfc")
    assert mod.ok and [w.code for w in mod.warnings] == ["UnsafeTotal"]
    assert mod.unsafe_total == {"OnlyInt"}


def test_totality_link(nat):
    """Families accepted as total reduce on every closed Nat tuple."""
    rw = Rewriter(nat.sig)
    nats = [TyCon("Z")]
    for _ in range(4):
        nats.append(TyCon("S", (nats[-1],)))
    for fam, info in nat.sig.families.items():
        assert info.total
        for args in itertools.product(nats, repeat=info.arity):
            assert rw.top_reduce(fam, args) is not None, (fam, args)
    assert rw.normal_form(T("Quad (S Z)", ("Quad",))) == T("S (S (S (S Z)))")


def test_open_type_instance_requires_open_family():
    mod = load_source("data Int : 0\ntype family total F a where { F a = Int }\n"
                      "type instance F Int = Int")
    assert "NotAnOpenFamily" in [d.code for d in mod.diagnostics]


def test_closed_class_cannot_be_extended():
    src = open(corpus.__globals__["CORPUS"] / "closed_class.cfc").read()
    mod = load_source(src + "\ninstance Sub Int Int")
    assert "ClosedClassExtension" in [d.code for d in mod.diagnostics]
