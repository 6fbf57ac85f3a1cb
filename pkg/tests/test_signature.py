from cfc import load_source
from cfc.conflict import compat, no_conflict
from cfc.signature import check_good_signature, check_signature
from cfc.syntax import Equation, EvalAssumption, FamilyInfo, Signature, TyCon, TyVar, fam_count

from .conftest import ty

HEAD = "data Int : 0\ndata Bool : 0\ndata Char : 0\ndata True : 0\ndata False : 0\ndata List : 1\n"


def codes(src: str) -> list:
    return [d.code for d in load_source(HEAD + src).diagnostics]


def eq(tyvars, fam, lhs, rhs, assumps=()):
    return Equation(tuple(tyvars), tuple(assumps), fam, tuple(ty(x) for x in lhs), ty(rhs))


EQU = (eq(["a"], "Equ", ["a", "a"], "True"), eq(["a", "b"], "Equ", ["a", "b"], "False"))


def test_plus_signature_ok(plus):
    assert check_signature(plus.sig) == [] and check_good_signature(plus.sig) == []


def test_empty_signature_ok():
    assert check_signature(Signature()) == [] and check_good_signature(Signature()) == []


def test_family_in_rhs():
    assert codes("family Loop : 0 partial\naxiom ax : Loop { Loop ~ [Loop] }") == ["FamilyInRHS"]


def test_family_in_lhs():
    src = "family F : 1 partial\naxiom ax : F { F (F Int) ~ Int }"
    assert codes(src) == ["FamilyInLHS"]


def test_undeclared_family_and_arity():
    sig = Signature({"Int": 0}, {}, {"F": FamilyInfo(1, False)},
                    {"ax": (eq([], "G", ["Int"], "Int"),), "bx": (eq([], "F", ["Int", "Int"], "Int"),)})
    assert [d.code for d in check_signature(sig)] == ["UndeclaredFamily", "ArityMismatch"]


def test_ill_scoped_equation_reports_all():
    src = "family F : 1 partial\naxiom ax : F { F Int ~ b ; forall a a. F a ~ a }"
    assert codes(src) == ["IllScopedEquation", "IllScopedEquation"]


def test_bad_assumption():
    src = ("family F : 1 total\n"
           "axiom ax : F { forall a [r | c : F a a ~ r] [s | c : F a ~ s]. F [a] ~ Int ;"
           " forall a. F a ~ Int }")
    assert codes(src).count("BadAssumption") == 2


def test_assumption_may_mention_earlier_assumption_vars():
    src = ("family F : 1 total\n"
           "axiom ax : F { forall a [r | c : F a ~ r] [s | d : F r ~ s]. F [a] ~ s ;"
           " forall a. F a ~ Int }")
    assert codes(src) == []


def test_good_open_axioms():
    assert codes("family F : 1 partial\naxiom a1 : F { F Int ~ Bool }\n"
                 "axiom a2 : F { F Char ~ Int }") == []
    assert codes("family F : 1 partial\naxiom a1 : F { F Int ~ Bool }\n"
                 "axiom a2 : F { F Int ~ Int }") == ["IncompatibleOpenEquations"]


def test_closed_family_clash():
    src = ("family Equ : 2 partial\n"
           "axiom e1 : Equ { forall a. Equ a a ~ True ; forall a b. Equ a b ~ False }\n"
           "axiom e2 : Equ { Equ Int Bool ~ False }")
    assert "ClosedFamilyClash" in codes(src)


def test_mixed_family_axiom():
    sig = Signature({"Int": 0}, {}, {"F": FamilyInfo(1, False), "G": FamilyInfo(1, False)},
                    {"ax": (eq([], "F", ["Int"], "Int"), eq([], "G", ["Int"], "Int"))})
    assert [d.code for d in check_good_signature(sig)] == ["MixedFamilyAxiom"]


def test_unbound_or_unused():
    sig = Signature({"Int": 0}, {}, {"F": FamilyInfo(1, False)},
                    {"ax": (eq(["a", "b"], "F", ["a"], "a"),)})
    [d] = check_good_signature(sig)
    assert d.code == "UnboundOrUnusedTyVar" and d.axiom == "ax" and d.index == 0


def test_diagnostics_carry_spans():
    [d] = load_source(HEAD + "family Loop : 0 partial\naxiom ax : Loop {\n  Loop ~ [Loop]\n}",
                      "x.cfc").diagnostics
    assert d.span.file == "x.cfc" and d.span.line == 9 and d.axiom == "ax" and d.index == 0


def test_compat_examples():
    a = eq([], "F", ["Int"], "Bool")
    assert compat(a, a)
    assert compat(a, eq([], "F", ["Char"], "Int"))
    assert not compat(EQU[0], EQU[1])


def test_compat_expands_assumptions():
    chi = EvalAssumption("r", "c", "G", (TyVar("a"),))
    e1 = eq(["a"], "F", ["[a]"], "List r", [chi])
    e2 = Equation(("b",), (EvalAssumption("s", "d", "G", (TyVar("b"),)),), "F",
                  (ty("[b]"),), ty("List s"))
    assert compat(e1, e2)
    e3 = Equation(("b",), (EvalAssumption("s", "d", "G", (TyCon("Int"),)),), "F",
                  (ty("[b]"),), ty("List s"))
    assert not compat(e1, e3)


def test_no_conflict_examples():
    assert no_conflict(EQU, 1, (ty("Int"), ty("Bool")), 0)
    assert not no_conflict(EQU, 1, (ty("Int"), ty("Int")), 0)


def test_accepted_signatures_have_family_free_rhs(nat, plus):
    for sig in (nat.sig, plus.sig):
        assert check_signature(sig) == []
        assert all(fam_count(e.rhs) == 0 for eqs in sig.axioms.values() for e in eqs)
