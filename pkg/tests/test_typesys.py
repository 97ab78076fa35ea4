from __future__ import annotations

import pytest
from hypothesis import given, settings

from lambdavec.parse import parse_type, show_type
from lambdavec.scalar import HALF_SQRT2, Scalar
from lambdavec.syntax import TVar
from lambdavec.typesys import (
    MissingEvidence, canon, canon_pairs, embed, equiv, match_unit, order_leq, prec_chain,
    prec_step, preceq,
)
from oracle import types

ALIASES = {
    "TT": "(!X.!Y.X->(Y->X))",
    "FF": "(!X.!Y.X->(Y->Y))",
    "I": "(!X.X->X)",
    "Bo": "(Z->Z)",
}


def ty(text):
    for k, v in ALIASES.items():
        text = text.replace(k, v)
    return parse_type(text)


def pairs(text):
    return [(str(c), show_type(u)) for c, u in canon_pairs(ty(text))]


def test_canon_merges_equivalent_units():
    assert pairs("2 . A + 3 . A") == [("5", "A")]
    assert pairs("1 . A") == [("1", "A")]
    assert pairs("2 . (A + B) + A") == [("3", "A"), ("2", "B")]
    assert pairs("2 . 3 . A") == [("6", "A")]
    assert pairs("(!X.X->X) + !Y.Y->Y") == [("2", "!X.X->X")]


def test_canon_keeps_zero_coefficients():
    assert pairs("X + 0 . A") == [("1", "X"), ("0", "A")]
    assert pairs("A + -1 . A") == [("0", "A")]


def test_canon_normalizes_codomains():
    assert equiv(ty("A->(B + B)"), ty("A->2 . B"))
    assert not equiv(ty("A->(B + B)"), ty("A->B"))


def test_hadamard_thunk_type():
    h = canon(ty("sqrt2/2 . (TT + -1 . FF)"))
    assert h.coefficients() == [HALF_SQRT2, -HALF_SQRT2]


@pytest.mark.parametrize("a, b, expected", [
    ("A + B", "B + A", True),
    ("(A + B) + C", "A + (B + C)", True),
    ("2 . (A + B)", "2 . A + 2 . B", True),
    ("2 . A", "2 . B", False),
    ("0 . A + B", "B", False),
    ("!X.X->X", "!Y.Y->Y", True),
    ("!X.!Y.X->Y", "!Y.!X.X->Y", False),
])
def test_equivalence(a, b, expected):
    assert equiv(ty(a), ty(b)) is expected


@settings(max_examples=200, deadline=None)
@given(types)
def test_canon_is_idempotent(t):
    c = canon(t)
    assert canon(c.embed()) == c
    assert equiv(c.embed(), t)
    units = c.units()
    assert all(not equiv(units[i], units[j]) for i in range(len(units)) for j in range(i + 1, len(units)))


def test_prec_step_quantifies_every_summand():
    out = prec_step(ty("2 . (X->X) + 3 . (X->A)"), gen_vars=["X"])
    assert any(equiv(o, ty("2 . (!X.X->X) + 3 . !X.X->A")) for o in out)
    assert prec_step(ty("X->X"), gen_vars=["X"], held=["X"], candidates=[]) == []


def test_prec_step_instantiates():
    out = prec_step(ty("!X.X->X"), gen_vars=[], candidates=[ty("Bo")])
    assert any(equiv(o, ty("Bo->Bo")) for o in out)


@pytest.mark.parametrize("a, b, expected", [
    ("A->B", "A->B", True),
    ("!X.(A->X)", "A->X", True),
    ("!X.X->X", "Bo->Bo", True),
    ("Bo->Bo", "!X.X->X", False),
    ("2 . (X->X) + 3 . (X->A)", "2 . (!X.X->X) + 3 . !X.X->A", True),
    ("2 . (X->X)", "3 . !X.X->X", False),
    ("TT", "FF", False),
])
def test_preceq(a, b, expected):
    assert preceq(ty(a), ty(b)) is expected


def test_preceq_respects_held_variables():
    assert not preceq(ty("X->X"), ty("!X.X->X"), held=["X"])
    chain = prec_chain(ty("!X.X->X"), ty("(A->A)->(A->A)"))
    assert chain is not None and equiv(chain[-1], ty("(A->A)->(A->A)"))


@pytest.mark.parametrize("pattern, pvars, target, expected", [
    ("X", ["X"], "Bo", {"X": "Z->Z"}),
    ("X->X", ["X"], "Bo->Bo", {"X": "Z->Z"}),
    ("X->X", ["X"], "Bo->A", None),
    ("I->(sqrt2/2 . (TT + FF))", [], "I->(sqrt2/2 . (TT + FF))", {}),
    ("X->(A + B)", ["X"], "C->(B + A)", {"X": "C"}),
    ("!Y.X->Y", ["X"], "!Z.A->Z", {"X": "A"}),
])
def test_match_unit(pattern, pvars, target, expected):
    got = match_unit(ty(pattern), pvars, ty(target))
    if expected is None:
        assert got is None
    else:
        assert {k: show_type(v) for k, v in got.items()} == expected


def test_order_examples():
    assert order_leq(ty("TT"), ty("TT + 0 . FF"))
    assert order_leq(ty("A->B"), ty("A->B"))
    assert not order_leq(ty("0 . A + 2 . B"), ty("2 . B"))
    assert not order_leq(ty("TT"), ty("FF"))


def test_order_factorisation_needs_evidence():
    t1, t2 = ty("A->A"), ty("B->B")
    target = embed([(Scalar.of(2), t1), (Scalar.of(3), t2)])
    assert order_leq(ty("5 . (A->A)"), target, evidence=[(t1, t2)])
    with pytest.raises(MissingEvidence):
        order_leq(ty("5 . (A->A)"), target)


def test_order_congruence_under_arrows():
    ev = [(ty("A->A"), ty("B->B"))]
    assert order_leq(ty("C->5 . (A->A)"), ty("C->(2 . (A->A) + 3 . (B->B))"), evidence=ev)
    assert order_leq(ty("C->TT"), ty("C->(TT + 0 . FF)"))


def test_order_does_not_collapse_distinct_variables():
    assert not order_leq(TVar("X"), TVar("Y"))
    assert not order_leq(ty("!X.!Y.X->(Y->X)"), ty("!X.!Y.X->(Y->Y)"))
