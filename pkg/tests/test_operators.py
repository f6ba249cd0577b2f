import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from superquant.contact import OSP_NAMES, WeightMismatchError, contact_bracket, generator, lie_derivative
from superquant.operators import (
    DiffOperator,
    ZeroOperatorError,
    compose,
    contact_order,
    lie_operator,
    normalize,
    rewrite_normalize,
    super_commutator,
    to_json,
)
from superquant.parsing import parse_operator as op, parse_superfunction as sf
from superquant.sampling import random_hamiltonian, random_operator, random_superfunction
from superquant.scalars import LAM, MU
from superquant.superfunctions import MASKS, ParityError, SuperFunction

from conftest import fractions

ONE = SuperFunction.constant(1)


def basis_functions(max_degree=6):
    for n in range(max_degree + 1):
        for mask in MASKS:
            yield SuperFunction.monomial(n, mask)


# normal form ------------------------------------------------------------------

def test_normalize_examples():
    assert normalize(["dxi1"]) == op("Dbar1 + xi1*dx")
    assert normalize(["Dbar2", "Dbar1"]) == op("-Dbar1*Dbar2")
    assert normalize(["Dbar1", sf("xi1")]) == op("1 - xi1*Dbar1")


def test_compose_examples():
    Dbar1, dx = op("Dbar1", LAM, LAM), op("dx", LAM, LAM)
    assert compose(Dbar1, Dbar1) == -dx
    x = DiffOperator.multiplication(sf("x"), LAM, LAM)
    assert compose(dx, x) == op("1 + x*dx", LAM, LAM)
    A = op("x*dx*Dbar1 + xi2*Dbar2", LAM, MU)
    assert compose(A, DiffOperator.identity(LAM)) == A
    assert compose(DiffOperator.identity(MU), A) == A


def test_compose_weight_mismatch():
    with pytest.raises(WeightMismatchError):
        compose(op("dx", LAM, MU), op("dx", LAM, MU))


def test_contact_order_examples():
    for k in range(1, 5):
        A = DiffOperator.monomial(k - 1, 1, 1)
        assert contact_order(A) == k
    assert contact_order(op("Dbar1")) == Fraction(1, 2)
    assert contact_order(op("x^2")) == 0
    with pytest.raises(ZeroOperatorError):
        contact_order(DiffOperator())
    assert DiffOperator().in_fine_filtration(0)


def test_classical_filtration_counts_dbar_as_first_order():
    A = op("dx*Dbar1")
    assert A.in_fine_filtration(Fraction(3, 2)) and not A.in_fine_filtration(1)
    assert A.in_classical_filtration(2) and not A.in_classical_filtration(1)


def test_parity_of_operators():
    assert op("xi1*Dbar1 + dx").parity() == 0
    assert op("Dbar1 + xi1*dx").parity() == 1
    with pytest.raises(ParityError):
        op("Dbar1 + dx").parity()


def test_lie_operator_examples():
    A = DiffOperator.multiplication(sf("x^3 + xi1*xi2*x"))
    assert lie_operator(ONE, A) == DiffOperator.multiplication(sf("3*x^2 + xi1*xi2"))
    assert not lie_operator(ONE, op("dx"))
    B = lie_operator(sf("x^2"), op("dx*Dbar1"))
    assert contact_order(B) <= Fraction(3, 2)


def test_lie_operator_rejects_inhomogeneous():
    with pytest.raises(ParityError):
        lie_operator(sf("1 + xi1"), op("dx"))
    with pytest.raises(ParityError):
        lie_operator(sf("x"), op("dx + Dbar1"))


# properties ---------------------------------------------------------------

def _random_word(rng, length):
    atoms = ["dx", "dxi1", "dxi2", "Dbar1", "Dbar2"]
    word = []
    for _ in range(length):
        if rng.random() < 0.4:
            word.append(random_superfunction(rng, max_degree=2, terms=2))
        else:
            word.append(rng.choice(atoms))
    return word


def test_rewrite_confluence_on_random_words():
    rng = random.Random(7)
    for _ in range(100):
        word = _random_word(rng, rng.randint(1, 6))
        direct = normalize(word)
        for seed in (1, 2):
            assert rewrite_normalize(word, random.Random(seed)) == direct


@pytest.mark.parametrize("seed", range(100))
def test_compose_associative(seed):
    rng = random.Random(seed)
    A, B, C = (
        random_operator(rng, max_k2=3, lam=w1, mu=w2, max_degree=2, terms=3)
        for w1, w2 in ((LAM + 2, MU), (LAM + 1, LAM + 2), (LAM, LAM + 1))
    )
    A, B, C = (next(P.homogeneous_parts())[1] if P else P for P in (A, B, C))
    assert compose(compose(A, B), C) == compose(A, compose(B, C))


@pytest.mark.parametrize("seed", range(30))
def test_compose_agrees_with_application(seed):
    # oracle: composing operators is applying them one after the other
    rng = random.Random(1000 + seed)
    A = random_operator(rng, max_k2=4, lam=LAM, mu=MU)
    B = random_operator(rng, max_k2=4, lam=MU, mu=LAM)
    AB = compose(B, A).with_weights(LAM, LAM)
    for h in basis_functions(5):
        assert AB(h) == B(A(h))


@pytest.mark.parametrize("seed", range(20))
def test_compose_respects_contact_order(seed):
    rng = random.Random(2000 + seed)
    A = random_operator(rng, max_k2=4, lam=MU, mu=MU)
    B = random_operator(rng, max_k2=4, lam=LAM, mu=MU)
    AB = compose(A, B)
    if AB:
        assert AB.contact_order2() <= A.contact_order2() + B.contact_order2()


def _monomial_ops(max_k2=4, max_degree=4):
    for l in range(3):
        for m in (0, 1):
            for n in (0, 1):
                if 2 * l + m + n > max_k2:
                    continue
                for d in range(max_degree + 1):
                    for mask in MASKS:
                        yield DiffOperator.monomial(l, m, n, SuperFunction.monomial(d, mask))


@pytest.mark.parametrize("name", OSP_NAMES)
def test_filtration_stability_on_generators(name):
    f = generator(name)
    for A in _monomial_ops():
        B = lie_operator(f, A)
        assert B.in_fine_filtration(A.contact_order())


def test_filtration_stability_on_random_hamiltonians():
    rng = random.Random(11)
    for _ in range(20):
        f = random_hamiltonian(rng, max_degree=3)
        for A in _monomial_ops(max_degree=2):
            assert lie_operator(f, A).in_fine_filtration(A.contact_order())


def test_lie_operator_acts_as_commutator():
    # oracle: L(A) h = L^mu(A h) -/+ A(L^lam h)
    f, A = sf("x*xi1"), op("x*dx*Dbar2 + xi1*Dbar1*Dbar2")
    B = lie_operator(f, A)
    for h in basis_functions(4):
        sign = 1 if A.parity() else -1
        expected = lie_derivative(f, MU, A(h)) + A(lie_derivative(f, LAM, h)).scale(sign)
        assert B(h) == expected


@pytest.mark.parametrize("f", OSP_NAMES)
@pytest.mark.parametrize("g", OSP_NAMES)
def test_representation_property(f, g):
    F, G = generator(f), generator(g)
    H = contact_bracket(F, G)
    sign = -1 if F.parity() and G.parity() else 1
    for A in (op("x^2*dx*Dbar1 + xi2*dx^2"), op("xi1*xi2*Dbar1*Dbar2 + x*Dbar2")):
        for part in A.homogeneous_parts():
            P = part[1]
            lhs = lie_operator(H, P) if H else P.scale(0)
            rhs = lie_operator(F, lie_operator(G, P)) - lie_operator(G, lie_operator(F, P)).scale(sign)
            assert lhs == rhs


def test_super_commutator_of_dbars():
    D1, D2 = op("Dbar1", LAM, LAM), op("Dbar2", LAM, LAM)
    assert not super_commutator(D1, D2)
    assert super_commutator(D1, D1) == op("-2*dx", LAM, LAM)


@given(st.integers(0, 10**6))
def test_text_round_trip(seed):
    A = random_operator(random.Random(seed), max_k2=4)
    assert op(str(A)) == A


@given(fractions, fractions)
def test_numeric_weights_survive_json(lam, mu):
    A = op("x*dx + xi1*Dbar2", lam, mu)
    data = to_json(A)
    assert data["lam"] == str(lam) and data["mu"] == str(mu)
    assert [(t["l"], t["m"], t["n"]) for t in data["terms"]] == [(0, 0, 1), (1, 0, 0)]
