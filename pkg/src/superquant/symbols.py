"""Principal symbols and the action of contact fields on the graded symbol space.

A symbol of contact order k is a pair (F1, F2):

* integer k:      F1 dx^k + F2 dx^(k-1) Dbar1 Dbar2   (only F1 when k = 0)
* half-integer k: F1 dx^(k-1/2) Dbar1 + F2 dx^(k-1/2) Dbar2
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .contact import HALF, lie_derivative
from .operators import DiffOperator, lie_operator
from .scalars import scalar_str
from .superfunctions import ParityError, SuperFunction, dbar12, sf_mul, to_json as sf_to_json


def principal_keys(k2: int):
    """Normal-form keys carrying (F1, F2) at doubled contact order k2."""
    if k2 < 0:
        raise ValueError("contact order must be nonnegative")
    if k2 % 2 == 0:
        k = k2 // 2
        return (k, 0, 0), ((k - 1, 1, 1) if k >= 1 else None)
    l = (k2 - 1) // 2
    return (l, 1, 0), (l, 0, 1)


@dataclass(frozen=True)
class Symbol:
    F1: SuperFunction
    F2: SuperFunction
    k2: int
    lam: object
    mu: object = field(default=None)

    def __post_init__(self):
        if self.k2 == 0 and self.F2:
            raise ValueError("symbols of contact order 0 have a single component")

    @property
    def order(self) -> Fraction:
        return Fraction(self.k2, 2)

    @property
    def delta(self):
        return self.mu - self.lam

    def is_half_integer(self) -> bool:
        return self.k2 % 2 == 1

    def parity(self) -> int:
        ps = set()
        for F in (self.F1, self.F2):
            if F:
                ps.add(F.parity())
        if len(ps) > 1:
            raise ParityError("symbol components have different parities")
        return ps.pop() if ps else 0

    def homogeneous_parts(self):
        """Yield (parity, Symbol) pieces; F1 and F2 are split by parity."""
        for p in (0, 1):
            pick = SuperFunction.odd_part if p else SuperFunction.even_part
            G1, G2 = pick(self.F1), pick(self.F2)
            if G1 or G2:
                yield p, Symbol(G1, G2, self.k2, self.lam, self.mu)

    def __bool__(self):
        return bool(self.F1 or self.F2)

    def __add__(self, other: Symbol) -> Symbol:
        self._check(other)
        return Symbol(self.F1 + other.F1, self.F2 + other.F2, self.k2, self.lam, self.mu)

    def __sub__(self, other: Symbol) -> Symbol:
        self._check(other)
        return Symbol(self.F1 - other.F1, self.F2 - other.F2, self.k2, self.lam, self.mu)

    def scale(self, c) -> Symbol:
        return Symbol(self.F1.scale(c), self.F2.scale(c), self.k2, self.lam, self.mu)

    def _check(self, other):
        if (self.k2, self.lam, self.mu) != (other.k2, other.lam, other.mu):
            raise ValueError("symbols live in different spaces")

    def to_json(self) -> dict:
        return {
            "k2": self.k2,
            "F1": sf_to_json(self.F1),
            "F2": sf_to_json(self.F2),
            "lam": scalar_str(self.lam),
            "mu": scalar_str(self.mu),
        }

    def __str__(self):
        return f"({self.F1}, {self.F2}) @ k={self.order}"


def symbol_at(A: DiffOperator, k2: int) -> Symbol:
    """The (F1, F2) pair read off A at doubled contact order k2 (may be zero)."""
    k1, kk2 = principal_keys(k2)
    F1 = A.coefficient(*k1)
    F2 = A.coefficient(*kk2) if kk2 is not None else SuperFunction()
    return Symbol(F1, F2, k2, A.source_weight, A.target_weight)


def principal_symbol(A: DiffOperator) -> Symbol:
    """Principal symbol at the contact order of A (raises on the zero operator)."""
    return symbol_at(A, A.contact_order2())


def leading_operator(S: Symbol) -> DiffOperator:
    """The naive lift of S: its leading terms with no lower-order part."""
    k1, kk2 = principal_keys(S.k2)
    terms = {k1: S.F1}
    if kk2 is not None:
        terms[kk2] = S.F2
    return DiffOperator(terms, S.lam, S.mu)


def symbol_weight(S: Symbol):
    """Weight mu - lam - k of the densities F1, F2."""
    return S.mu - S.lam - S.order


def symbol_action(f: SuperFunction, S: Symbol) -> Symbol:
    """Action of X_f on a symbol.

    Integer order: both components transform as (mu - lam - k)-densities.
    Half-integer order: the same, plus the rotation-type twist
    -1/2 Dbar1Dbar2(f) F2 on F1 and +1/2 Dbar1Dbar2(f) F1 on F2.
    """
    if not f.is_homogeneous():
        raise ParityError(f"contact Hamiltonian {f} is not homogeneous")
    w = symbol_weight(S)
    G1 = lie_derivative(f, w, S.F1)
    G2 = lie_derivative(f, w, S.F2)
    if S.is_half_integer():
        t = dbar12(f)
        if t:
            G1 = G1 - sf_mul(t, S.F2).scale(HALF)
            G2 = G2 + sf_mul(t, S.F1).scale(HALF)
    return Symbol(G1, G2, S.k2, S.lam, S.mu)


def induced_action_check(f: SuperFunction, A: DiffOperator) -> bool:
    """Compare symbol_action with the principal part of lie_operator(f, A).

    The action on operators must not raise the contact order, and its part at
    the order of A must equal the symbol action on the principal symbol of A.
    """
    S = principal_symbol(A)
    B = lie_operator(f, A)
    if not B.in_fine_filtration(S.order):
        return False
    got = symbol_at(B, S.k2)
    want = symbol_action(f, S)
    return got.F1 == want.F1 and got.F2 == want.F2
