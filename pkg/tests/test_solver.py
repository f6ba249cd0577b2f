from fractions import Fraction

import pytest

from superquant.linalg import rank
from superquant.quantization import ORDERS2, AnsatzTerm, OrderError, coefficient_table, resonant_set
from superquant.scalars import LAM, MU, RationalFunction
from superquant.solver import (
    INCONSISTENT,
    TRIVIAL_GENERATORS,
    UNIQUE,
    InternalConsistencyError,
    assemble_system,
    build_ansatz,
    derive,
    derive_and_compare,
    residual,
    solve_status,
    specialized_check,
)

from conftest import check_golden

HALF = Fraction(1, 2)
ONE = RationalFunction(1)


def k_of(k2):
    return Fraction(k2, 2)


def system_rank(system):
    return rank(system.rows, len(system.unknowns))


def contains(system, coeffs: dict, rhs=0) -> bool:
    """True iff the equation sum coeffs[t] * t = rhs lies in the row space."""
    row = [coeffs.get(t, 0) for t in system.unknowns] + [rhs]
    rows = [list(r) for r in system.rows]
    return rank(rows + [row], None) == rank(rows, None)


# ansatz ---------------------------------------------------------------------

def test_ansatz_sizes():
    assert [len(build_ansatz(k_of(k2))) for k2 in ORDERS2] == [2, 6, 10, 14]
    assert [len(build_ansatz(k_of(k2), family="full")) for k2 in ORDERS2] == [4, 12, 20, 28]


def test_ansatz_examples():
    half = build_ansatz(HALF)
    assert [t.describe() for t in half] == ["Dbar1(F1)", "Dbar2(F2)"]
    assert sorted(t.tag for t in build_ansatz(1)) == ["C11", "C12", "C13", "C14", "C21", "C22"]
    assert sorted(t.tag for t in build_ansatz(2)) == sorted(
        f"C{i}{j}" for i in range(1, 5) for j in range(1, 5) if not (i == 4 and j > 2)
    )


def test_ansatz_terms_have_the_right_order():
    for k2 in ORDERS2:
        for t in build_ansatz(k_of(k2), family="full"):
            a, b, c = t.post
            assert t.deriv_order2 >= 1
            assert t.deriv_order2 + 2 * a + b + c == k2


def test_ansatz_errors():
    with pytest.raises(ValueError):
        build_ansatz(1, s=0)
    with pytest.raises(OrderError):
        build_ansatz(Fraction(5, 2))
    assert len(build_ansatz(Fraction(5, 2), family="full")) > 0


# assembly -----------------------------------------------------------------

@pytest.mark.parametrize("s", (1, -1))
def test_reference_equation_at_order_half(s):
    system = assemble_system(build_ansatz(HALF, s), HALF, s)
    assert contains(system, {"C11": 2 * (MU - LAM - HALF), "C12": ONE}, -s * 2 * LAM)
    assert contains(system, {"C11": ONE, "C12": 2 * (MU - LAM - HALF)}, -s * 2 * LAM)
    assert contains(system, {"C11": ONE, "C12": -ONE})


@pytest.mark.parametrize("s", (1, -1))
def test_reference_equation_at_order_one(s):
    system = assemble_system(build_ansatz(1, s), 1, s)
    assert contains(system, {"C11": 2 * (MU - LAM - 1)}, s)


def test_reference_equation_at_order_three_halves():
    k = Fraction(3, 2)
    even = assemble_system(build_ansatz(k, 1), k, 1)
    odd = assemble_system(build_ansatz(k, -1), k, -1)
    for s, system in ((1, even), (-1, odd)):
        # the form with the parity sign on the C21 term only holds in both branches
        eq = {"C31": 4 * (LAM - MU + 1), "C32": -ONE, "C11": -2 * LAM, "C21": -s * 2 * LAM}
        assert contains(system, eq)
    listed = {"C31": 4 * (LAM - MU + 1), "C32": -ONE, "C11": -2 * LAM, "C21": -2 * LAM}
    assert contains(even, listed)
    assert not contains(odd, {t: -c if t in ("C11", "C21") else c for t, c in listed.items()})


@pytest.mark.parametrize("k2", ORDERS2)
def test_affine_generators_give_no_equations(k2):
    for s in (1, -1):
        system = assemble_system(build_ansatz(k_of(k2), s), k_of(k2), s, generators=TRIVIAL_GENERATORS)
        assert system.rows == []


def test_xi12_alone_forces_reflection_symmetry():
    system = assemble_system(build_ansatz(HALF), HALF, 1, generators=("xi12",))
    assert len(system.rows) == 1
    assert contains(system, {"C11": ONE, "C12": -ONE})


def test_wrong_order_term_is_a_consistency_error():
    bad = build_ansatz(1) + [AnsatzTerm("bad", 1, (0, 1, 0), (0, 0, 0))]
    with pytest.raises(InternalConsistencyError):
        assemble_system(bad, 1, 1)


# solving ------------------------------------------------------------------

@pytest.mark.parametrize("k2", ORDERS2)
@pytest.mark.parametrize("s", (1, -1))
def test_unique_and_equal_to_closed_forms(k2, s, derived):
    report = derived(k2, s)
    assert report.status == UNIQUE
    assert report.rank == len(report.unknowns)
    assert report.solution == coefficient_table(k2, LAM, MU, s)
    assert residual(report.system, report.solution) == []


def test_solution_examples(derived):
    for s in (1, -1):
        assert derived(1, s).solution["C11"] == s * LAM / (LAM - MU)
        assert derived(2, s).solution["C21"] == -LAM / (MU - LAM - 1)
        assert derived(4, s).solution["C41"] == LAM * (2 * LAM + 1) / ((LAM - MU + 2) * (2 * LAM - 2 * MU + 3))


@pytest.mark.parametrize("k2", ORDERS2)
def test_derive_and_compare(k2):
    for s in (1, -1):
        ok, diff = derive_and_compare(k_of(k2), s)
        assert ok, diff


@pytest.mark.parametrize("k2", ORDERS2)
def test_singular_deltas_match_resonant_sets(k2, derived):
    for s in (1, -1):
        assert set(derived(k2, s).singular_deltas) == resonant_set(k_of(k2))
        assert derived(k2, s).singular_lams == {}


def test_order_one_at_delta_one_is_not_unique():
    system = assemble_system(build_ansatz(1), 1, 1)
    assert solve_status(system.specialize_delta(1)) != UNIQUE
    assert solve_status(system.specialize_delta(HALF)) != UNIQUE


def test_order_three_halves_is_regular_at_three_halves(derived):
    # the global resonance 3/2 does not affect order 3/2 itself
    for s in (1, -1):
        status, matches = specialized_check(Fraction(3, 2), s, Fraction(3, 2))
        assert status == UNIQUE and matches
        assert Fraction(3, 2) not in derived(3, s).singular_deltas
    assert derived(3, 1).singular_deltas == {Fraction(1): INCONSISTENT}


@pytest.mark.parametrize("k2", ORDERS2)
def test_random_regular_deltas(k2):
    for d in (Fraction(-7, 3), Fraction(1, 5), Fraction(5, 2), Fraction(11, 4)):
        status, matches = specialized_check(k_of(k2), 1, d)
        assert status == UNIQUE and matches


@pytest.mark.parametrize("k2", ORDERS2)
def test_bound_stability(k2, derived):
    for s in (1, -1):
        base = derived(k2, s)
        wider = derive(k_of(k2), s, bound=k2 + 5, confirm=False)
        assert wider.rank == base.rank
        assert wider.solution == base.solution
        assert len(wider.system.rows) >= len(base.system.rows)


@pytest.mark.parametrize("k2", ORDERS2)
def test_xi12_and_x2_determine_the_solution(k2):
    for s in (1, -1):
        full = assemble_system(build_ansatz(k_of(k2), s), k_of(k2), s)
        sub = full.restrict(("xi12", "x2"))
        assert system_rank(sub) == system_rank(full) == len(full.unknowns)
        assert rank([list(r) for r in sub.rows], None) == rank([list(r) for r in full.rows], None)


@pytest.mark.parametrize("k2", ORDERS2)
def test_full_ansatz_has_no_extra_terms(k2):
    report = derive(k_of(k2), 1, family="full", confirm=False)
    assert report.status == UNIQUE
    closed = coefficient_table(k2, LAM, MU, 1)
    for tag, v in report.solution.items():
        assert v == 0 or v in closed.values(), tag
    assert sum(1 for v in report.solution.values() if v) == sum(1 for v in closed.values() if v)


def test_experimental_order_five_halves_runs():
    report = derive(Fraction(5, 2), 1, family="full", confirm=False)
    assert report.status in (UNIQUE, "underdetermined", INCONSISTENT)
    assert report.unknown_count == len(build_ansatz(Fraction(5, 2), family="full"))


@pytest.mark.parametrize("k2", ORDERS2)
@pytest.mark.parametrize("s", (1, -1))
def test_report_golden(k2, s, derived):
    label = "even" if s > 0 else "odd"
    check_golden(f"solver/order{k2}_{label}.json", derived(k2, s).dumps() + "\n")
