from __future__ import annotations

from dataclasses import replace

import pytest

from lambdavec.audit import TypedTermGenerator
from lambdavec.checker import (
    DomainMismatch, EscapingTypeVar, ForallExpected, HeterogeneousFunctionSummands,
    MissingAnnotation, MissingWitness, NotAnArrow, TypeMismatch, UnboundVariable, check,
    infer, replay,
)
from lambdavec.encodings import prelude
from lambdavec.parse import parse_term, parse_type, show_term, show_type
from lambdavec.syntax import TVar
from lambdavec.typesys import equiv

P = prelude()


def t(text):
    return parse_term(text, P)


def ty(text):
    return parse_type(text, P)


def typeof(text, ctx=None):
    return infer(ctx or {}, t(text)).type


@pytest.mark.parametrize("term, expected", [
    ("id", "!X.X->X"),
    ("true", "TT"),
    ("false", "FF"),
    ("id[A]", "A->A"),
    (r"\x:A. x + x", "A->2 . A"),
    ("2 . true + false", "2 . TT + FF"),
    ("0<true>", "0 . TT"),
    ("(id) (true + false)", "TT + FF"),
    ("(id + 2 . id) true", "3 . TT"),
    ("Htrue", "sqrt2/2 . TT + sqrt2/2 . FF"),
    ("Hplus", "TT + 0 . FF"),
])
def test_infer_examples(term, expected):
    assert equiv(typeof(term), ty(expected))


def test_context_and_application():
    ctx = {"b": TVar("U"), "f": ty("U->V")}
    assert equiv(typeof("(f) (2 . b)", ctx), ty("2 . V"))


@pytest.mark.parametrize("term, ctx, error", [
    ("y", {}, UnboundVariable),
    ("(x) y", {"x": TVar("A"), "y": TVar("A")}, NotAnArrow),
    (r"(\x:A. x) y", {"y": TVar("B")}, DomainMismatch),
    ("x[A]", {"x": TVar("A")}, ForallExpected),
    (r"((\x:A. x) + /\X. \y:X. y) z", {"z": TVar("A")}, HeterogeneousFunctionSummands),
    (r"((\x:A. x) + \y:B. y) z", {"z": TVar("A")}, HeterogeneousFunctionSummands),
    (r"\x. x", {}, MissingAnnotation),
    ("0", {}, MissingWitness),
])
def test_errors(term, ctx, error):
    with pytest.raises(error):
        infer(ctx, parse_term(term))


def test_domain_mismatch_reports_offending_summand():
    with pytest.raises(DomainMismatch) as info:
        infer({"a": TVar("A"), "b": TVar("B")}, parse_term(r"(\x:A. x) (a + b)"))
    assert info.value.index == 1


def test_polymorphic_functions_match_each_argument_summand():
    d = infer({"a": TVar("A"), "b": TVar("B")}, t("(id) (a + 2 . b)"))
    assert equiv(d.type, ty("A + 2 . B"))


def test_check_uses_quantifier_steps():
    d = check({}, parse_term(r"\x:A. x"), ty("!A.A->A"))
    assert replay(d)
    d = check({}, t("id"), ty("(B->B)->(B->B)"))
    assert replay(d) and d.rule in ("forallE", "equiv")
    with pytest.raises(TypeMismatch):
        check({}, t("true"), ty("FF"))
    with pytest.raises(EscapingTypeVar):
        check({"x": TVar("X")}, parse_term("x"), ty("!X.X"))


def test_binder_renamed_away_from_context():
    d = infer({"x": TVar("X")}, t("(true[X][X]) x"))
    assert equiv(d.type, ty("X->X"))
    assert replay(d)


def test_replay_detects_corruption():
    d = infer({"a": TVar("A")}, t("(id) a"))
    assert d.rule == "equiv" and replay(d)
    app = d.premises[0]
    assert app.rule == "->E"
    wrong = ({x: TVar("B") for x in app.payload["prefix"]},)
    bad = replace(d, premises=(replace(app, payload={**app.payload, "subs": wrong}),))
    result = replay(bad)
    assert not result and result.path == (0,)
    assert not replay(replace(d, type=TVar("B")))


def test_pretty_and_dict():
    d = infer({}, t("(id) true"))
    text = d.pretty(show_term, show_type)
    assert text.splitlines()[0].startswith("[equiv]")
    assert text.splitlines()[1].startswith("  [->E]")
    assert d.to_dict(show_term, show_type)["premises"][0]["rule"] == "->E"
    assert d.size() == len(list(d.nodes()))


def test_derivations_use_known_rules():
    rules = {"ax", "0I", "->I", "->E", "forallI", "forallE", "alphaI", "+I", "equiv"}
    for name, term in P.defs.items():
        assert {n.rule for n in infer({}, term).nodes()} <= rules


def test_replay_of_infer_on_generated_terms():
    gen = TypedTermGenerator(seed=7)
    for _, term, d in gen.samples(1000):
        assert replay(d), show_term(term)
