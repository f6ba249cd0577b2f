import random
from fractions import Fraction

import pytest

from superquant.contact import AFF_NAMES, OSP_NAMES, generator, lie_derivative
from superquant.operators import DiffOperator, lie_operator
from superquant.parsing import parse_operator as op, parse_superfunction as sf
from superquant.sampling import random_symbol
from superquant.scalars import LAM, MU
from superquant.superfunctions import MASKS, ParityError, SuperFunction, partial_x
from superquant.symbols import (
    Symbol,
    induced_action_check,
    leading_operator,
    principal_keys,
    principal_symbol,
    symbol_action,
    symbol_at,
)

ZERO = SuperFunction()


def monomial_operators(max_k2=4, max_degree=4):
    for l in range(3):
        for m in (0, 1):
            for n in (0, 1):
                if 2 * l + m + n <= max_k2:
                    for d in range(max_degree + 1):
                        for mask in MASKS:
                            yield DiffOperator.monomial(l, m, n, SuperFunction.monomial(d, mask))


def test_principal_keys():
    assert principal_keys(0) == ((0, 0, 0), None)
    assert principal_keys(1) == ((0, 1, 0), (0, 0, 1))
    assert principal_keys(4) == ((2, 0, 0), (1, 1, 1))
    assert principal_keys(3) == ((1, 1, 0), (1, 0, 1))


def test_principal_symbol_examples():
    S = principal_symbol(op("Dbar1"))
    assert (S.F1, S.F2, S.order) == (1, ZERO, Fraction(1, 2))
    S = principal_symbol(op("x*dx^2 + xi1*dx*Dbar1"))
    assert (S.F1, S.F2, S.order) == (sf("x"), ZERO, 2)
    S = principal_symbol(op("dx*Dbar1*Dbar2"))
    assert (S.F1, S.F2, S.order) == (ZERO, 1, 2)


def test_symbol_parity():
    assert Symbol(sf("xi1"), sf("x*xi2"), 1, LAM, MU).parity() == 1
    with pytest.raises(ParityError):
        Symbol(sf("xi1"), sf("x"), 1, LAM, MU).parity()
    with pytest.raises(ValueError):
        Symbol(sf("1"), sf("x"), 0, LAM, MU)


@pytest.mark.parametrize("k2", range(5))
def test_action_of_translation_differentiates(k2):
    S = Symbol(sf("x^3*xi1 + x*xi2"), sf("x^2*xi2") if k2 else ZERO, k2, LAM, MU)
    T = symbol_action(sf("1"), S)
    assert (T.F1, T.F2) == (partial_x(S.F1), partial_x(S.F2))


def test_twist_from_xi12_at_half_integer_order():
    f = sf("xi1*xi2")
    S = Symbol(sf("x"), sf("x^2"), 1, LAM, MU)
    T = symbol_action(f, S)
    w = MU - LAM - Fraction(1, 2)
    # Dbar1Dbar2(xi1 xi2) = -1: F1 gains +1/2 F2, F2 gains -1/2 F1
    assert T.F1 - lie_derivative(f, w, S.F1) == sf("1/2*x^2")
    assert T.F2 - lie_derivative(f, w, S.F2) == sf("-1/2*x")


def test_integer_order_action_does_not_mix():
    S1 = Symbol(sf("x^2"), ZERO, 2, LAM, MU)
    S2 = Symbol(ZERO, sf("x^2"), 2, LAM, MU)
    assert not symbol_action(sf("x^2"), S1).F2
    assert not symbol_action(sf("x^2"), S2).F1


@pytest.mark.parametrize("name", OSP_NAMES)
def test_induced_action_on_monomial_operators(name):
    f = generator(name)
    for A in monomial_operators():
        assert induced_action_check(f, A), (name, str(A))


def test_induced_action_exhibits_twist():
    assert induced_action_check(sf("xi1*xi2"), op("Dbar1"))
    assert induced_action_check(sf("1"), op("x*dx^2"))
    B = lie_operator(sf("xi1*xi2"), op("Dbar1"))
    assert symbol_at(B, 1).F2  # the twist moves Dbar1 into Dbar2


def test_symbol_action_depends_only_on_delta():
    c = 7 * MU - 3 * LAM  # any symbolic shift
    for name in OSP_NAMES:
        for k2 in range(5):
            S = Symbol(sf("x^3*xi1*xi2 + x"), sf("x*xi1*xi2") if k2 else ZERO, k2, LAM, MU)
            T = Symbol(S.F1, S.F2, k2, LAM + c, MU + c)
            a, b = symbol_action(generator(name), S), symbol_action(generator(name), T)
            assert (a.F1, a.F2) == (b.F1, b.F2)


def test_principal_symbol_of_leading_operator_is_identity():
    rng = random.Random(5)
    for _ in range(100):
        S = random_symbol(rng, rng.randint(0, 4))
        if not S:
            continue
        back = principal_symbol(leading_operator(S))
        assert back.k2 <= S.k2
        assert symbol_at(leading_operator(S), S.k2) == S


@pytest.mark.parametrize("name", AFF_NAMES)
def test_naive_lift_is_affine_equivariant(name):
    f = generator(name)
    for k2 in range(5):
        for d in range(7):
            for mask in MASKS:
                F = SuperFunction.monomial(d, mask)
                for S in (Symbol(F, ZERO, k2, LAM, MU), Symbol(ZERO, F, k2, LAM, MU) if k2 else None):
                    if S is None:
                        continue
                    assert lie_operator(f, leading_operator(S)) == leading_operator(symbol_action(f, S))


def test_naive_lift_fails_for_x2():
    S = Symbol(sf("x"), ZERO, 2, LAM, MU)
    assert lie_operator(sf("x^2"), leading_operator(S)) != leading_operator(symbol_action(sf("x^2"), S))


def test_json_record():
    S = Symbol(sf("xi1"), sf("x*xi2"), 3, LAM, MU)
    data = S.to_json()
    assert data["k2"] == 3 and data["lam"] == "lam" and data["mu"] == "mu"
