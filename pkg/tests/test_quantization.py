import json
import random
from fractions import Fraction

import pytest

from superquant.contact import OSP_NAMES, generator
from superquant.operators import DiffOperator, lie_operator
from superquant.parsing import parse_operator as op, parse_superfunction as sf
from superquant.quantization import (
    ORDERS2,
    SOLVER_RESONANCES,
    OrderError,
    coefficient_table,
    empty_symbol,
    full_quantize,
    full_resonant_set,
    quantization_map,
    quantize,
    resonant_set,
    symbol_map,
)
from superquant.sampling import random_fraction, random_operator, random_symbol
from superquant.scalars import LAM, MU, RationalFunction, ResonanceError, evaluate, substitute_delta
from superquant.superfunctions import MASKS, SuperFunction
from superquant.symbols import Symbol, principal_symbol, symbol_action, symbol_at

from conftest import check_golden

ZERO = SuperFunction()
HALF = Fraction(1, 2)


def test_order_half_example():
    A = quantize(Symbol(sf("xi1"), ZERO, 1, LAM, MU))
    assert A == op("xi1*Dbar1") - DiffOperator.multiplication(SuperFunction.constant(LAM / (LAM - MU)))
    assert str(A) == "xi1*Dbar1 - (lam/(lam-mu))"


def test_constant_symbols_quantize_to_their_leading_term():
    assert quantize(Symbol(ZERO, sf("1"), 2, LAM, MU)) == op("Dbar1*Dbar2")
    assert quantize(Symbol(sf("1"), ZERO, 4, LAM, MU)) == op("dx^2")


def test_order_half_coefficients():
    for s in (1, -1):
        table = coefficient_table(1, LAM, MU, s)
        assert table == {"C11": s * LAM / (LAM - MU), "C12": s * LAM / (LAM - MU)}


def test_order_two_leading_coefficient():
    c = coefficient_table(4, LAM, MU, 1)["C41"]
    assert c == LAM * (2 * LAM + 1) / ((LAM - MU + 2) * (2 * LAM - 2 * MU + 3))


def test_resonant_sets():
    assert resonant_set(HALF) == {0}
    assert resonant_set(1) == {HALF, 1}
    assert resonant_set(Fraction(3, 2)) == {1}
    assert resonant_set(2) == {1, Fraction(3, 2), 2}
    assert full_resonant_set() == {0, HALF, 1, Fraction(3, 2), 2}
    with pytest.raises(OrderError):
        resonant_set(Fraction(5, 2))


@pytest.mark.parametrize("k2", ORDERS2)
def test_shipped_resonances_match_a_fresh_derivation(k2, derived):
    found = set(derived(k2, 1).singular_deltas) | set(derived(k2, -1).singular_deltas)
    assert found == SOLVER_RESONANCES[k2]


def test_coefficient_denominators_are_resonance_factors():
    # every denominator factor vanishes identically at mu = lam + d for a resonant d
    for k2 in ORDERS2:
        deltas = resonant_set(Fraction(k2, 2))
        for s in (1, -1):
            for tag, c in coefficient_table(k2, LAM, MU, s).items():
                for f, _ in c.factor_denominator():
                    f = RationalFunction(f)
                    assert any(not substitute_delta(f, d) for d in deltas), (k2, tag, str(f))


def test_numeric_resonant_weights_raise():
    S = Symbol(sf("x"), sf("x^2"), 2, Fraction(1), Fraction(2))
    with pytest.raises(ResonanceError):
        quantize(S)
    with pytest.raises(ResonanceError):
        quantize(Symbol(sf("x"), ZERO, 1, LAM, LAM))
    with pytest.raises(OrderError):
        quantize(Symbol(sf("x"), ZERO, 5, LAM, MU))


def slot_symbols(k2, max_degree):
    for d in range(max_degree + 1):
        for mask in MASKS:
            F = SuperFunction.monomial(d, mask)
            yield Symbol(F, ZERO, k2, LAM, MU)
            yield Symbol(ZERO, F, k2, LAM, MU)


@pytest.mark.parametrize("name", OSP_NAMES)
@pytest.mark.parametrize("k2", ORDERS2)
def test_equivariance_on_low_monomials(k2, name):
    f = generator(name)
    for S in slot_symbols(k2, 3):
        assert lie_operator(f, quantize(S)) == quantize(symbol_action(f, S))


def test_naive_lift_is_not_equivariant():
    # the correction terms matter: dropping them breaks x^2-equivariance
    S = Symbol(sf("x^2"), ZERO, 2, LAM, MU)
    A = quantize(S)
    lead = DiffOperator({(1, 0, 0): sf("x^2")}, LAM, MU)
    assert A != lead
    assert lie_operator(sf("x^2"), lead) != quantize(symbol_action(sf("x^2"), S))


def test_principal_symbol_preserved():
    rng = random.Random(21)
    for _ in range(200):
        k2 = rng.choice(ORDERS2)
        S = random_symbol(rng, k2)
        if not S:
            continue
        assert symbol_at(quantize(S), k2) == S
        assert principal_symbol(quantize(S)).k2 == k2


def test_specialization_coherence():
    rng = random.Random(22)
    checked = 0
    while checked < 20:
        lam, mu = random_fraction(rng), random_fraction(rng)
        if mu - lam in full_resonant_set():
            continue
        k2 = rng.choice(ORDERS2)
        S = random_symbol(rng, k2)
        symbolic = quantize(S)
        numeric = quantize(Symbol(S.F1, S.F2, k2, lam, mu))
        for key, a in symbolic.items():
            assert a.map_coefficients(lambda c: evaluate(c, lam, mu)) == numeric.coefficient(*key)
        assert len(numeric.terms) <= len(symbolic.terms)
        checked += 1


def test_symbol_map_examples():
    symbols = symbol_map(op("dx^2"))
    assert symbols[4] == Symbol(sf("1"), ZERO, 4, LAM, MU)
    assert not any(symbols[:4])
    assert not full_quantize([empty_symbol(k2) for k2 in range(5)])
    A = op("x*dx*Dbar1")
    assert full_quantize(symbol_map(A)) == A


def test_symbol_map_rejects_high_order():
    with pytest.raises(OrderError):
        symbol_map(op("dx^2*Dbar1"))


def test_round_trips_on_random_operators():
    rng = random.Random(23)
    for _ in range(100):
        A = random_operator(rng, max_k2=4)
        assert full_quantize(symbol_map(A)) == A
    for _ in range(30):
        symbols = [random_symbol(rng, k2) for k2 in range(5)]
        back = symbol_map(full_quantize(symbols))
        assert back == symbols


def test_round_trip_at_numeric_weights():
    rng = random.Random(24)
    A = random_operator(rng, max_k2=4, lam=Fraction(1, 3), mu=Fraction(5, 7))
    assert full_quantize(symbol_map(A)) == A


def test_coefficient_tables_golden():
    data = {str(Fraction(k2, 2)): quantization_map(Fraction(k2, 2)).to_json() for k2 in ORDERS2}
    check_golden("coefficients.json", json.dumps(data, indent=2, sort_keys=True) + "\n")
