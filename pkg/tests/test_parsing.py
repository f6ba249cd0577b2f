import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from superquant.parsing import ParseError, parse_operator, parse_scalar, parse_superfunction
from superquant.sampling import random_operator
from superquant.scalars import LAM, MU
from superquant.superfunctions import SuperFunction

from conftest import rational_functions, superfunctions


def test_superfunction_examples():
    f = parse_superfunction("3/2*x^2*xi1 + xi1*xi2")
    assert f.f1 == [0, 0, Fraction(3, 2)]
    assert f.f12 == [1]
    assert not f.f0 and not f.f2
    assert parse_superfunction("xi2*xi1") == -parse_superfunction("xi1*xi2")
    assert parse_superfunction("xi1^2") == 0
    assert parse_superfunction("(x + 1)^2") == parse_superfunction("x^2 + 2*x + 1")


def test_operator_examples():
    A = parse_operator("dx^2 + x*dx*Dbar1")
    assert A.terms == {(2, 0, 0): SuperFunction.constant(1), (1, 1, 0): SuperFunction.x()}
    assert parse_operator("Dbar2*Dbar1") == parse_operator("-Dbar1*Dbar2")
    assert parse_operator("Dbar1*xi1") == parse_operator("1 - xi1*Dbar1")
    assert parse_operator("dxi1") == parse_operator("Dbar1 + xi1*dx")
    assert parse_operator("dx", 1, 2).source_weight == 1


def test_scalar_examples():
    assert parse_scalar("lam/(lam-mu)") == LAM / (LAM - MU)
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert isinstance(parse_scalar("lam - lam + 2"), Fraction)
    assert parse_scalar("t^2", {"t": Fraction(3)}) == 9


@pytest.mark.parametrize(
    "text,pos",
    [("x +", 3), ("x * * x", 4), ("2 $ x", 2), ("(x", 2), ("x^y", 2), ("", 0), ("x)", 1)],
)
def test_syntax_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as err:
        parse_superfunction(text)
    assert err.value.position == pos


def test_type_errors():
    with pytest.raises(ParseError):
        parse_superfunction("dx")
    with pytest.raises(ParseError):
        parse_scalar("x")
    with pytest.raises(ParseError):
        parse_superfunction("1/x")
    with pytest.raises(ParseError):
        parse_scalar("1/0")


@settings(max_examples=200)
@given(rational_functions)
def test_scalar_round_trip(r):
    assert parse_scalar(str(r)) == r


@settings(max_examples=200)
@given(superfunctions(max_degree=5))
def test_superfunction_round_trip(f):
    assert parse_superfunction(str(f)) == f


@settings(max_examples=200)
@given(superfunctions(max_degree=2, coeffs=rational_functions))
def test_symbolic_superfunction_round_trip(f):
    assert parse_superfunction(str(f)) == f


@settings(max_examples=200)
@given(st.integers(0, 2**32))
def test_operator_round_trip(seed):
    A = random_operator(random.Random(seed), max_k2=5)
    assert parse_operator(str(A)) == A


@settings(max_examples=50)
@given(st.integers(0, 2**32), rational_functions)
def test_symbolic_operator_round_trip(seed, c):
    A = random_operator(random.Random(seed), max_k2=4).scale(c)
    assert parse_operator(str(A)) == A
