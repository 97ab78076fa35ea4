from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdavec.parse import ParseError, parse_program, parse_term, parse_type, show_term, show_type
from lambdavec.rewrite import alpha_key
from lambdavec.scalar import HALF_SQRT2, Scalar
from lambdavec.syntax import (
    Abs, App, Arrow, Forall, Scale, Sum, TScale, TSum, TVar, TyAbs, TyApp, Var, Zero,
    alpha_eq, alpha_eq_ty, erase, free_type_vars, free_vars, is_basis, subst_term,
    subst_term_type, subst_type, summands, term_size,
)
from oracle import scalars, tnames, types, units

names = st.sampled_from(["x", "y", "z"])
erased_terms = st.recursive(
    st.one_of(st.builds(Var, names), st.just(Zero())),
    lambda inner: st.one_of(
        st.builds(lambda x, b: Abs(x, None, b), names, inner),
        st.builds(App, inner, inner),
        st.builds(Scale, scalars, inner),
        st.builds(Sum, inner, inner),
    ),
    max_leaves=8,
)

annotated_terms = st.recursive(
    st.builds(Var, names),
    lambda inner: st.one_of(
        st.builds(Abs, names, units, inner),
        st.builds(App, inner, inner),
        st.builds(Scale, scalars, inner),
        st.builds(Sum, inner, inner),
        st.builds(Zero, inner),
        st.builds(TyAbs, tnames, inner),
        st.builds(TyApp, inner, units),
    ),
    max_leaves=8,
)


@settings(max_examples=300)
@given(erased_terms)
def test_erased_round_trip(t):
    assert alpha_key(parse_term(show_term(t))) == alpha_key(t)


@settings(max_examples=300)
@given(annotated_terms)
def test_annotated_print_is_stable(t):
    text = show_term(t)
    again = parse_term(text)
    assert show_term(again) == text
    assert alpha_key(again) == alpha_key(t)


@settings(max_examples=300)
@given(types)
def test_type_round_trip(ty):
    assert show_type(parse_type(show_type(ty))) == show_type(ty)


def test_grammar_examples():
    assert parse_term(r"\x. x") == Abs("x", None, Var("x"))
    assert parse_term("(f) a b") == App(App(Var("f"), Var("a")), Var("b"))
    assert parse_term("t - r") == Sum(Var("t"), Scale(Scalar.of(-1), Var("r")))
    assert parse_term("sqrt2/2 . x") == Scale(HALF_SQRT2, Var("x"))
    assert parse_term("0<x>") == Zero(Var("x"))
    assert parse_term("f[X]") == TyApp(Var("f"), TVar("X"))
    assert parse_type("X->Y->X") == Arrow(TVar("X"), Arrow(TVar("Y"), TVar("X")))
    assert parse_type("!X.X->X") == Forall("X", Arrow(TVar("X"), TVar("X")))


def test_printing_conventions():
    assert show_type(parse_type("!X.!Y.X->Y->X")) == "!X.!Y.X->(Y->X)"
    assert show_type(parse_type("(X->X)->X")) == "(X->X)->X"
    assert show_type(parse_type("2 . (A + B)")) == "2 . (A + B)"
    assert show_term(parse_term(r"(\x. x) y")) == r"(\x. x) y"
    assert show_term(parse_term("(1 + i) . x")) == "(1 + i) . x"


def test_program_statements():
    prog = parse_program("""
        type T = !X.X->X;
        assume b : T;
        let id = /\\X. \\x:X. x;
        let twice = (id[T]) b;   # a comment
    """)
    assert prog.aliases["T"] == Forall("X", Arrow(TVar("X"), TVar("X")))
    assert prog.assumptions == {"b": prog.aliases["T"]}
    assert isinstance(prog.defs["twice"], App)
    assert alpha_eq(prog.defs["twice"].fun.body, prog.defs["id"])


def test_let_inlining_avoids_capture():
    prog = parse_program("let k = \\x. y; let t = \\y. k;")
    inner = prog.defs["t"]
    assert free_vars(inner) == {"y"}


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_program("let a = x;\nlet b = (x;\n")
    assert info.value.line == 2


@pytest.mark.parametrize("text", ["\\x x", "x +", "!X.", "let"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_term(text)


def test_free_variables():
    t = parse_term(r"\x:X. (x) y + /\Y. z[Y->W]")
    assert free_vars(t) == {"y", "z"}
    assert free_type_vars(t) == {"X", "W"}


def test_term_substitution_is_capture_avoiding():
    t = parse_term(r"\y. (x) y")
    out = subst_term(t, "x", Var("y"))
    assert free_vars(out) == {"y"}
    assert alpha_eq(out, parse_term(r"\w. (y) w"))


def test_type_substitution_is_capture_avoiding():
    ty = parse_type("!Y.X->Y")
    out = subst_type(ty, "X", TVar("Y"))
    assert alpha_eq_ty(out, parse_type("!Z.Y->Z"))
    t = subst_term_type(parse_term(r"/\Y. \x:X. x"), {"X": TVar("Y")})
    assert free_type_vars(t) == {"Y"}


def test_alpha_equivalence():
    assert alpha_eq(parse_term(r"/\X. \x:X. x"), parse_term(r"/\Y. \y:Y. y"))
    assert not alpha_eq(parse_term(r"\x:X. x"), parse_term(r"\x:Y. x"))
    assert alpha_eq_ty(parse_type("!X.X->X"), parse_type("!Z.Z->Z"))


def test_basis_terms_and_erasure():
    assert is_basis(parse_term("x"))
    assert is_basis(parse_term(r"/\X. \x:X. x"))
    assert not is_basis(parse_term("x + y"))
    assert not is_basis(parse_term("(f) x"))
    e = erase(parse_term(r"(/\X. \x:X. x)[A] 0<y>"))
    assert e == App(Abs("x", None, Var("x")), Zero())
    assert term_size(e) == 4


def test_summands_flatten():
    t = parse_term("a + (b + c) + d")
    assert [s.name for s in summands(t)] == ["a", "b", "c", "d"]
