"""Re-derivation of the equivariant quantization maps from an ansatz.

The unknown coefficients of an affine-equivariant ansatz are fixed by asking
that ``lie_operator(f, Q(S)) == Q(symbol_action(f, S))`` for every osp(2|2)
generator ``f`` and every basis symbol ``S``.  Each normal-form coefficient
of the difference is one linear equation over Q[lam, mu].

The two parity branches are coupled by the odd generators: they map an
s-symbol to a (-s)-symbol.  Equivariance under D_1, D_2 forces
``c^(-s) = (-1)^{p(P)} c^(s)`` for a term whose derivative monomial P has
parity p(P), and this relation is substituted while assembling a branch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .contact import OSP_NAMES, generator
from .linalg import back_substitute, bareiss_echelon, primitive_row, row_key
from .operators import DiffOperator, lie_operator
from .quantization import PRINCIPAL, TERMS, AnsatzTerm, OrderError, coefficient_table
from .scalars import (
    LAM,
    MU,
    RationalFunction,
    ResonanceError,
    poly_str,
    scalar_str,
    substitute_delta,
    substitute_lam,
)
from .superfunctions import MASKS, SuperFunction, mask_parity
from .symbols import Symbol, principal_keys, symbol_action

# generators whose equations the affine-equivariant ansatz satisfies identically
TRIVIAL_GENERATORS = ("1", "x", "xi1", "xi2")

UNIQUE = "unique"
UNDERDETERMINED = "underdetermined"
INCONSISTENT = "inconsistent"


class InternalConsistencyError(AssertionError):
    """A generator expected to give only trivial equations gave a real one."""


def _to_k2(k) -> int:
    k2 = Fraction(k) * 2
    if k2.denominator != 1 or k2 < 0:
        raise OrderError(f"contact order {k} is not a nonnegative half-integer")
    return int(k2)


# ansatz -----------------------------------------------------------------

def _monomials_of_order2(j: int) -> list:
    """Constant monomials dx^a Dbar1^b Dbar2^c (b, c <= 1) of doubled order j."""
    if j == 0:
        return [(0, 0, 0)]
    if j % 2 == 0:
        return [(j // 2, 0, 0), (j // 2 - 1, 1, 1)]
    return [((j - 1) // 2, 1, 0), ((j - 1) // 2, 0, 1)]


def _full_tag(slot, deriv, post):
    return "A{}_{}{}{}_{}{}{}".format(slot, *deriv, *post)


def principal_terms(k2: int) -> tuple:
    if k2 in PRINCIPAL:
        return PRINCIPAL[k2]
    k1, kk2 = principal_keys(k2)
    out = [AnsatzTerm("P1", 1, (0, 0, 0), k1)]
    if kk2 is not None:
        out.append(AnsatzTerm("P2", 2, (0, 0, 0), kk2))
    return tuple(out)


def build_ansatz(k, s: int = 1, family: str = "symmetric") -> list:
    """Unknown ansatz terms for contact order k.

    ``family="symmetric"`` gives the reflection-symmetric families with 2, 6, 10,
    14 unknowns for k = 1/2, 1, 3/2, 2.  ``family="full"`` gives every
    constant-coefficient term ``(P F_slot) o M`` of the right order (the
    general affine-equivariant ansatz); it is the only choice above k = 2.
    """
    if s not in (1, -1):
        raise ValueError("parity sign must be +1 or -1")
    k2 = _to_k2(k)
    if family == "symmetric":
        if k2 == 0:
            return []
        if k2 not in TERMS:
            raise OrderError(f"no fixed term family at contact order {Fraction(k2, 2)}; use family='full'")
        return list(TERMS[k2])
    if family != "full":
        raise ValueError(f"unknown ansatz family {family!r}")
    out = []
    slots = (1,) if k2 == 0 else (1, 2)
    for slot in slots:
        for j in range(1, k2 + 1):
            for deriv in _monomials_of_order2(j):
                for post in _monomials_of_order2(k2 - j):
                    out.append(AnsatzTerm(_full_tag(slot, deriv, post), slot, deriv, post))
    return out


# system -----------------------------------------------------------------

@dataclass
class LinearSystem:
    """Rows ``sum_j a_j c_j = b`` stored as ``(a_1, ..., a_n, b)``."""

    k2: int
    s: int
    unknowns: tuple
    rows: list
    sources: list  # tuple of generator names per row
    bound: int

    @property
    def order(self) -> Fraction:
        return Fraction(self.k2, 2)

    def restrict(self, names) -> LinearSystem:
        """Rows produced by at least one of the given generators."""
        names = set(names)
        keep = [(r, src) for r, src in zip(self.rows, self.sources) if names & set(src)]
        return LinearSystem(
            self.k2, self.s, self.unknowns, [r for r, _ in keep], [src for _, src in keep], self.bound
        )

    def map_entries(self, fn) -> LinearSystem:
        rows = [tuple(fn(v) if v else v for v in r) for r in self.rows]
        return LinearSystem(self.k2, self.s, self.unknowns, rows, list(self.sources), self.bound)

    def specialize_delta(self, delta) -> LinearSystem:
        """Substitute mu = lam + delta in every entry."""
        return self.map_entries(lambda v: substitute_delta(v, delta))

    def specialize(self, lam, mu) -> LinearSystem:
        """Substitute numeric weights in every entry."""
        from .scalars import evaluate

        return self.map_entries(lambda v: evaluate(v, lam, mu))

    def matrix_strings(self) -> list:
        return [[scalar_str(v) for v in r] for r in self.rows]


def _term_parity_sign(t: AnsatzTerm) -> int:
    return -1 if t.deriv_parity else 1


def _basis_symbols(k2: int, s: int, bound: int):
    masks = [m for m in MASKS if mask_parity(m) == (0 if s > 0 else 1)]
    zero = SuperFunction()
    slots = (1,) if k2 == 0 else (1, 2)
    for slot in slots:
        for n in range(bound + 1):
            for mask in masks:
                F = SuperFunction.monomial(n, mask)
                F1, F2 = (F, zero) if slot == 1 else (zero, F)
                yield Symbol(F1, F2, k2, LAM, MU)


def _collect(op: DiffOperator, acc: dict, j: int, sign: int):
    for key, g in op.items():
        for mono, c in g.items():
            acc.setdefault((key, mono), {})
            cur = acc[(key, mono)].get(j, 0)
            acc[(key, mono)][j] = cur + c * sign


def _equations(f: SuperFunction, S: Symbol, principal, terms, odd_f: bool) -> list:
    """Coefficient vectors (a_1..a_n, b) from one generator and one symbol."""
    T = symbol_action(f, S)
    acc: dict = {}
    n = len(terms)
    # j = n collects the constant part E_0 (principal terms)
    for t in principal:
        _collect(lie_operator(f, t.apply(S)), acc, n, 1)
        if T:
            _collect(t.apply(T), acc, n, -1)
    for j, t in enumerate(terms):
        _collect(lie_operator(f, t.apply(S)), acc, j, 1)
        if T:
            sigma = _term_parity_sign(t) if odd_f else 1
            _collect(t.apply(T), acc, j, -sigma)
    rows = []
    for key in sorted(acc):
        entries = acc[key]
        row = [entries.get(j, 0) for j in range(n)]
        rhs = -entries.get(n, 0)
        if any(row) or rhs:
            rows.append(tuple(_as_scalar(v) for v in row) + (_as_scalar(rhs),))
    return rows


def _as_scalar(v):
    if isinstance(v, RationalFunction):
        return v if v else 0
    return RationalFunction(v) if v else 0


def assemble_system(terms, k, s: int, generators=OSP_NAMES, bound: int | None = None,
                    check_affine: bool = True) -> LinearSystem:
    """Equivariance equations for the ansatz ``terms`` in parity branch s.

    ``bound`` is the largest x-degree of the basis monomials (default 2k + 3).
    """
    k2 = _to_k2(k)
    if bound is None:
        bound = k2 + 3
    terms = list(terms)
    principal = principal_terms(k2)
    seen: dict = {}
    rows, sources = [], []
    for name in generators:
        f = generator(name)
        odd_f = bool(f.parity())
        for S in _basis_symbols(k2, s, bound):
            for row in _equations(f, S, principal, terms, odd_f):
                if check_affine and name in TRIVIAL_GENERATORS:
                    raise InternalConsistencyError(
                        f"generator {name} gives a nontrivial equation at order {Fraction(k2, 2)}, "
                        f"s={s}, symbol {S}"
                    )
                prow = primitive_row(row)
                key = row_key(prow)
                if key in seen:
                    idx = seen[key]
                    if name not in sources[idx]:
                        sources[idx] = sources[idx] + (name,)
                    continue
                seen[key] = len(rows)
                rows.append(prow)
                sources.append((name,))
    return LinearSystem(k2, s, tuple(t.tag for t in terms), rows, sources, bound)


# solving ----------------------------------------------------------------

@dataclass
class SolverReport:
    k2: int
    s: int
    family: str
    unknowns: tuple
    system: LinearSystem
    status: str
    rank: int
    solution: dict = field(default_factory=dict)
    pivot_factors: list = field(default_factory=list)
    delta_candidates: list = field(default_factory=list)
    singular_deltas: dict = field(default_factory=dict)  # delta -> status there
    other_factors: list = field(default_factory=list)
    singular_lams: dict = field(default_factory=dict)  # lam -> status there

    @property
    def order(self) -> Fraction:
        return Fraction(self.k2, 2)

    @property
    def unknown_count(self) -> int:
        return len(self.unknowns)

    def to_json(self) -> dict:
        return {
            "order": str(self.order),
            "s": self.s,
            "family": self.family,
            "unknowns": list(self.unknowns),
            "bound": self.system.bound,
            "matrix": self.system.matrix_strings(),
            "row_sources": [list(src) for src in self.system.sources],
            "status": self.status,
            "rank": self.rank,
            "solution": {k: scalar_str(v) for k, v in self.solution.items()},
            "pivot_factors": list(self.pivot_factors),
            "delta_candidates": [str(d) for d in self.delta_candidates],
            "singular_deltas": {str(d): st for d, st in sorted(self.singular_deltas.items())},
            "other_factors": list(self.other_factors),
            "singular_lams": {str(v): st for v, st in sorted(self.singular_lams.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _poly_factors(v) -> list:
    if not isinstance(v, RationalFunction) or v.is_constant():
        return []
    _, facs = v.numerator.factor()
    return [f for f, _ in facs]


def _delta_root(f):
    """delta0 if the polynomial f vanishes exactly on mu - lam = delta0, else None."""
    if f.total_degree() != 1:
        return None
    coeffs = {m: c for m, c in f.terms()}
    a = coeffs.get((1, 0), 0)
    b = coeffs.get((0, 1), 0)
    if a == 0 or a != -b:
        return None
    c = coeffs.get((0, 0), 0)
    # b*(mu - lam) + c = 0
    q = -c / b
    return Fraction(int(q.p), int(q.q))


def _lam_root(f):
    """lam0 if the polynomial f is a linear form in lam alone, else None."""
    if f.total_degree() != 1:
        return None
    coeffs = {m: c for m, c in f.terms()}
    a = coeffs.get((1, 0), 0)
    if a == 0 or coeffs.get((0, 1), 0) != 0:
        return None
    q = -coeffs.get((0, 0), 0) / a
    return Fraction(int(q.p), int(q.q))


def _status(ech, n) -> str:
    if not ech.consistent:
        return INCONSISTENT
    return UNIQUE if ech.rank == n else UNDERDETERMINED


def solve_status(system: LinearSystem) -> str:
    """Status only (used for specialized systems)."""
    n = len(system.unknowns)
    if not system.rows:
        return UNIQUE if n == 0 else UNDERDETERMINED
    return _status(bareiss_echelon(system.rows, n), n)


def solve_values(system: LinearSystem) -> tuple:
    """(status, solution dict) for a system over any coefficient field."""
    n = len(system.unknowns)
    if not system.rows:
        return (UNIQUE if n == 0 else UNDERDETERMINED), {}
    ech = bareiss_echelon(system.rows, n)
    status = _status(ech, n)
    if status != UNIQUE:
        return status, {}
    values = back_substitute(ech)
    return status, dict(zip(system.unknowns, values))


def residual(system: LinearSystem, solution: dict) -> list:
    """Indices of rows not satisfied by ``solution``."""
    bad = []
    vals = [solution[u] for u in system.unknowns]
    for i, row in enumerate(system.rows):
        acc = -row[-1]
        for a, v in zip(row, vals):
            if a:
                acc = acc + a * v
        if acc:
            bad.append(i)
    return bad


def solve(system: LinearSystem, family: str = "symmetric", confirm: bool = True) -> SolverReport:
    """Fraction-free elimination over Q(lam, mu) with resonance reporting.

    Candidate resonances are the values of mu - lam at which some pivot
    vanishes; with ``confirm`` each candidate is re-solved after
    substituting mu = lam + delta and kept if the status changes.
    """
    n = len(system.unknowns)
    report = SolverReport(system.k2, system.s, family, system.unknowns, system, UNDERDETERMINED, 0)
    if not system.rows:
        report.status = UNIQUE if n == 0 else UNDERDETERMINED
        return report
    ech = bareiss_echelon(system.rows, n)
    report.rank = ech.rank
    report.status = _status(ech, n)
    factors = {}
    for p in ech.pivot_values:
        for f in _poly_factors(p):
            factors.setdefault(poly_str(f), f)
    report.pivot_factors = sorted(factors)
    deltas, others = set(), []
    for name, f in sorted(factors.items()):
        d = _delta_root(f)
        if d is None:
            others.append(name)
        else:
            deltas.add(d)
    report.delta_candidates = sorted(deltas)
    report.other_factors = others
    if report.status == UNIQUE:
        values = back_substitute(ech)
        report.solution = dict(zip(system.unknowns, values))
        bad = residual(system, report.solution)
        if bad:
            raise InternalConsistencyError(f"solution leaves rows {bad} unsatisfied")
    if confirm:
        for d in report.delta_candidates:
            st = solve_status(system.specialize_delta(d))
            if st != UNIQUE:
                report.singular_deltas[d] = st
        for name in report.other_factors:
            root = _lam_root(factors[name])
            if root is None:
                continue
            st = solve_status(system.map_entries(lambda v: substitute_lam(v, root)))
            if st != UNIQUE:
                report.singular_lams[root] = st
    return report


# drivers ----------------------------------------------------------------

def derive(k, s: int = 1, family: str = "symmetric", generators=OSP_NAMES, bound: int | None = None,
           confirm: bool = True) -> SolverReport:
    """Build the ansatz, assemble the equivariance system and solve it."""
    terms = build_ansatz(k, s, family)
    system = assemble_system(terms, k, s, generators=generators, bound=bound)
    return solve(system, family=family, confirm=confirm)


def derive_and_compare(k, s: int = 1, bound: int | None = None):
    """Compare the derived coefficients with the closed-form table.

    Returns ``(ok, diff)`` where ``diff`` lists ``(tag, derived, closed_form)``
    for every mismatch.
    """
    k2 = _to_k2(k)
    report = derive(k, s, bound=bound, confirm=False)
    if report.status != UNIQUE:
        return False, [("status", report.status, UNIQUE)]
    expected = coefficient_table(k2, LAM, MU, s)
    diff = []
    for tag in report.unknowns:
        got, want = report.solution[tag], expected[tag]
        if RationalFunction(got) != RationalFunction(want):
            diff.append((tag, scalar_str(got), scalar_str(want)))
    return not diff, diff


def specialized_check(k, s: int, delta) -> tuple:
    """Solve at mu = lam + delta and compare with the specialized closed form.

    Returns ``(status, matches)``; ``matches`` is None unless unique.
    """
    k2 = _to_k2(k)
    system = assemble_system(build_ansatz(k, s), k, s)
    status, values = solve_values(system.specialize_delta(delta))
    if status != UNIQUE:
        return status, None
    expected = coefficient_table(k2, LAM, LAM + delta, s)
    ok = all(RationalFunction(values[t]) == RationalFunction(expected[t]) for t in system.unknowns)
    return status, ok


__all__ = [
    "INCONSISTENT",
    "UNDERDETERMINED",
    "UNIQUE",
    "InternalConsistencyError",
    "LinearSystem",
    "SolverReport",
    "assemble_system",
    "build_ansatz",
    "derive",
    "derive_and_compare",
    "residual",
    "solve",
    "solve_status",
    "solve_values",
    "specialized_check",
    "ResonanceError",
]
