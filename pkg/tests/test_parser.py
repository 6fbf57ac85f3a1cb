import pytest

from cfc.harness import gen_program
from cfc.parser import ParseError, parse_program, parse_type
from cfc.printer import show, show_program
from cfc.program import program_alpha_eq
from cfc.syntax import Arrow, FamApp, Forall, Prop, Qual, TyCon, TyVar

from .conftest import CORPUS, co, ex, ty


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.cfc")), ids=lambda p: p.name)
def test_corpus_roundtrip(path):
    prog = parse_program(path.read_text(), str(path))
    again = parse_program(show_program(prog))
    assert program_alpha_eq(prog, again)


@pytest.mark.parametrize("seed", range(40))
def test_generated_roundtrip(seed):
    prog = gen_program(seed)
    assert program_alpha_eq(prog, parse_program(show_program(prog)))


def test_type_syntax():
    assert ty("[Int]") == TyCon("List", (TyCon("Int"),))
    assert ty("a -> b -> c") == Arrow(TyVar("a"), Arrow(TyVar("b"), TyVar("c")))
    assert ty("forall a b. a") == Forall("a", Forall("b", TyVar("a")))
    assert ty("(Plus Z Z ~ a) => a") == Qual(Prop(FamApp("Plus", (TyCon("Z"), TyCon("Z"))),
                                                  TyVar("a")), TyVar("a"))
    assert parse_type("F Int") == TyCon("F", (TyCon("Int"),))
    assert parse_type("F Int", {"F"}) == FamApp("F", (TyCon("Int"),))


@pytest.mark.parametrize("src", [
    "refl Int", "sym (refl Int)", "refl Int ; refl Int", "nth 0 (refl (Int -> Int))",
    "(forall a. refl a) @ Int", "c", "plusAx[1] Z Z {(Z | plusAx[0] Z)}",
    "cong List (refl Int)", "refl Int -> refl Int", "(c ~ refl Int) => refl Int",
    "cong Plus (refl Z, refl Z)",
])
def test_coercion_roundtrip(src):
    g = co(src)
    assert co(show(g)) == g


@pytest.mark.parametrize("src", [
    "\\x:Int. x", "/\\a. \\x:a. x", "\\c:(Plus Z Z ~ Z). MkInt", "f x y", "e [Int]",
    "e <refl Int>", "e |> refl Int", "assume (a | c : Plus Z Z ~ a) in MkInt",
    "\\x:(Plus Z Z ~ Z) => Int. x", "\\x:forall a. a. x",
])
def test_expression_roundtrip(src):
    e = ex(src)
    assert ex(show(e)) == e


def test_comments_and_whitespace():
    prog = parse_program("-- header\ndata Int : 0 -- trailing\n\n  const MkInt : Int\n")
    assert len(prog.decls) == 2


@pytest.mark.parametrize("src,line,col", [
    ("data Int : 0\nconst K : (Int", 2, 15),
    ("data Int :", 1, 11),
    ("axiom ax : F { F Int ~ }", 1, 24),
    ("term t = \\x:Int x", 1, 18),
])
def test_parse_errors_have_spans(src, line, col):
    with pytest.raises(ParseError) as info:
        parse_program(src, "bad.cfc")
    d = info.value.diagnostic
    assert d.code == "ParseError"
    assert (d.span.file, d.span.line, d.span.column) == ("bad.cfc", line, col)


def test_unicode_input_accepted():
    prog = parse_program("-- λ comment ∀\ndata Int : 0\n")
    assert len(prog.decls) == 1
