from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy

from lambdavec.checker import infer
from lambdavec.encodings import (
    FALSE, I_TYPE, TRUE, TT, NotABasisCombination, apply_encoded, basis, basis_type,
    encode_if, encode_map2, encode_matrix, map2_type, pair, pair_type, parse_matrix, prelude,
    proj, read_coefficients, release, thunk,
)
from lambdavec.parse import parse_term, parse_type
from lambdavec.rewrite import ac_key, normalize
from lambdavec.scalar import HALF_SQRT2, Scalar
from lambdavec.syntax import App, Scale, Sum, TVar, Var, alpha_eq
from lambdavec.typesys import equiv
from oracle import to_sympy


def test_prelude_definitions_type():
    p = prelude()
    assert {"id", "true", "false", "H", "Htrue", "Hfalse", "Hplus"} <= set(p.defs)
    for term in p.defs.values():
        infer({}, term)


def test_basis_terms():
    assert alpha_eq(basis(2, 1), prelude().defs["true"])
    assert alpha_eq(basis(2, 2), prelude().defs["false"])
    assert equiv(infer({}, basis(3, 2)).type, basis_type(3, 2))
    with pytest.raises(ValueError):
        basis(2, 3)


def test_thunk_and_release():
    body = Sum(Var("a"), Var("a"))
    th = thunk(body)
    assert infer({"a": TVar("A")}, th).type.dom == I_TYPE
    out = normalize(release(th), ctx={"a": TVar("A")}).final
    assert ac_key(out) == ac_key(parse_term("2 . a"))


def test_thunk_avoids_capturing_free_variables():
    th = thunk(Var("f"))
    assert th.var != "f"


@pytest.mark.parametrize("alpha, beta", [(1, 0), (0, 1), (HALF_SQRT2, HALF_SQRT2), (Scalar(0, 0, 1), 2)])
def test_linear_conditional(alpha, beta):
    ctx = {"a": TVar("A"), "b": TVar("B")}
    r = Sum(Scale(Scalar.of(alpha), TRUE), Scale(Scalar.of(beta), FALSE))
    term = encode_if(r, Var("a"), Var("b"), ctx)
    infer(ctx, term)
    got = normalize(term, ctx=ctx).final
    want = normalize(Sum(Scale(Scalar.of(alpha), Var("a")), Scale(Scalar.of(beta), Var("b")))).final
    assert ac_key(got) == ac_key(want)


def test_map2_encoding_types():
    h = HALF_SQRT2
    term = encode_map2(h, h, h, -h)
    assert equiv(infer({}, term).type, map2_type(h, h, h, -h))


def _oracle(entries, v):
    m = sympy.Matrix([[to_sympy(Scalar.of(e)) for e in row] for row in entries])
    x = sympy.Matrix([to_sympy(Scalar.of(e)) for e in v])
    return [sympy.nsimplify(sympy.expand(y)) for y in m * x]


@pytest.mark.parametrize("n, entries, v", [
    (2, [[HALF_SQRT2, HALF_SQRT2], [HALF_SQRT2, -HALF_SQRT2]], [1, 0]),
    (2, [[0, 1], [1, 0]], [Fraction(1, 3), Scalar(0, 0, 1)]),
    (3, [[1, 2, 0], [0, 1, Scalar(0, 0, 1)], [3, 0, 1]], [1, 2, 3]),
])
def test_apply_encoded_matches_matrix_product(n, entries, v):
    got = apply_encoded(encode_matrix(n, entries), v)
    want = _oracle(entries, v)
    assert all(sympy.simplify(to_sympy(g) - w) == 0 for g, w in zip(got, want))


def test_apply_encoded_random_small():
    rng = random.Random(3)
    for _ in range(5):
        entries = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(2)] for _ in range(2)]
        v = [Fraction(rng.randint(-3, 3)) for _ in range(2)]
        got = apply_encoded(encode_matrix(2, entries), v)
        want = [sum(entries[i][j] * v[j] for j in range(2)) for i in range(2)]
        assert got == [Scalar.of(w) for w in want]


def test_matrix_validation():
    with pytest.raises(ValueError):
        encode_matrix(2, [[1, 2]])
    with pytest.raises(ValueError):
        apply_encoded(encode_matrix(2, [[1, 0], [0, 1]]), [1, 2, 3])


def test_read_coefficients_rejects_other_terms():
    assert read_coefficients(Sum(TRUE, Scale(Scalar.of(2), TRUE)), 2) == [Scalar.of(3), Scalar.of(0)]
    with pytest.raises(NotABasisCombination):
        read_coefficients(Var("x"), 2)


def test_parse_matrix():
    n, rows = parse_matrix("# hadamard\n2\nsqrt2/2 sqrt2/2\nsqrt2/2 -sqrt2/2\n")
    assert n == 2 and rows[1][1] == -HALF_SQRT2
    with pytest.raises(ValueError):
        parse_matrix("2\n1 0\n")


def test_pairs_and_projections():
    ctx = {"b": TVar("U"), "c": TVar("V")}
    p = pair(Var("b"), Var("c"), TVar("U"), TVar("V"))
    assert equiv(infer(ctx, p).type, pair_type(TVar("U"), TVar("V")))
    for i, want in ((1, "b"), (2, "c")):
        term = App(proj(i), p)
        assert equiv(infer(ctx, term).type, TVar("U" if i == 1 else "V"))
        assert normalize(term, ctx=ctx).final == Var(want)


def test_truth_type():
    assert equiv(TT, parse_type("!X.!Y.X->(Y->X)"))
