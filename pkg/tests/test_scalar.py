from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdavec.scalar import HALF_SQRT2, I, SQRT2, Scalar, ScalarSyntaxError, parse_scalar
from oracle import same, scalars, to_sympy


def test_constants():
    assert SQRT2 * SQRT2 == Scalar.of(2)
    assert I * I == Scalar.of(-1)
    assert HALF_SQRT2 * HALF_SQRT2 == Scalar.of(Fraction(1, 2))
    assert HALF_SQRT2 + HALF_SQRT2 == SQRT2


@settings(deadline=None)
@given(scalars, scalars)
def test_operations_match_symbolic_oracle(x, y):
    assert same(to_sympy(x + y), to_sympy(x) + to_sympy(y))
    assert same(to_sympy(x * y), to_sympy(x) * to_sympy(y))
    assert same(to_sympy(x - y), to_sympy(x) - to_sympy(y))


@settings(max_examples=60, deadline=None)
@given(scalars)
def test_inverse_matches_symbolic_oracle(x):
    if x.is_zero():
        with pytest.raises(ZeroDivisionError):
            x.inverse()
        return
    assert x * x.inverse() == Scalar.of(1)
    assert same(to_sympy(x.inverse()), 1 / to_sympy(x))


@given(scalars)
def test_print_parse_round_trip(x):
    assert parse_scalar(str(x)) == x


@pytest.mark.parametrize("text, expected", [
    ("sqrt2/2", HALF_SQRT2),
    ("-sqrt2/2", -HALF_SQRT2),
    ("1+i", Scalar(1, 0, 1)),
    ("(1 - i)/2", Scalar(Fraction(1, 2), 0, Fraction(-1, 2))),
    ("2*i*sqrt2", Scalar(0, 0, 0, 2)),
    ("3", Scalar.of(3)),
])
def test_parse_examples(text, expected):
    assert parse_scalar(text) == expected


@pytest.mark.parametrize("text", ["", "1 +", "sqrt3", "(1", "1/0"])
def test_parse_errors(text):
    with pytest.raises((ScalarSyntaxError, ZeroDivisionError)):
        parse_scalar(text)


def test_hash_consistent_with_equality():
    assert hash(Scalar.of(1)) == hash(parse_scalar("2/2"))
    assert len({Scalar.of(1), parse_scalar("1"), HALF_SQRT2 * SQRT2}) == 1


@given(st.integers(-5, 5), st.integers(1, 5))
def test_rational_embedding(n, d):
    assert Scalar.of(Fraction(n, d)) == Scalar.of(n) / d
