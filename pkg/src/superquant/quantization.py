"""Closed-form osp(2|2)-equivariant quantization maps for contact orders 1/2, 1, 3/2, 2.

Each map is a sum over *ansatz terms* ``C * (P F_slot) o M`` where ``P`` and
``M`` are constant-coefficient monomials ``dx^a Dbar1^b Dbar2^c``.  The two
principal terms carry coefficient 1; the others carry the coefficients below,
which depend on the parity sign ``s = (-1)^{p(F)}`` of the symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import LAM, MU, RationalFunction, ResonanceError, scalar_str
from .superfunctions import SuperFunction, apply_monomial
from .operators import DiffOperator
from .symbols import Symbol, principal_keys, symbol_at

ORDERS2 = (1, 2, 3, 4)

DX, D1, D2, D12 = (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 1, 1)
ID = (0, 0, 0)
DXD1, DXD2, DX2, DXD12 = (1, 1, 0), (1, 0, 1), (2, 0, 0), (1, 1, 1)


class OrderError(ValueError):
    """Contact order outside the range with a closed-form quantization."""


@dataclass(frozen=True)
class AnsatzTerm:
    """``coefficient * (deriv applied to F_slot) o post``.

    ``deriv`` and ``post`` are (a, b, c) exponents of dx^a Dbar1^b Dbar2^c.
    """

    tag: str
    slot: int
    deriv: tuple
    post: tuple

    @property
    def deriv_order2(self) -> int:
        a, b, c = self.deriv
        return 2 * a + b + c

    @property
    def deriv_parity(self) -> int:
        return (self.deriv[1] + self.deriv[2]) % 2

    def apply(self, S: Symbol) -> DiffOperator:
        F = S.F1 if self.slot == 1 else S.F2
        g = apply_monomial(*self.deriv, F)
        return DiffOperator({self.post: g} if g else {}, S.lam, S.mu)

    def describe(self) -> str:
        def mono(e):
            a, b, c = e
            parts = (["dx" if a == 1 else f"dx^{a}"] if a else []) + (["Dbar1"] if b else []) + (["Dbar2"] if c else [])
            return "*".join(parts)

        inner = f"F{self.slot}"
        if any(self.deriv):
            inner = f"{mono(self.deriv)}({inner})"
        post = mono(self.post)
        return f"{inner}*{post}" if post else inner


def _t(tag, slot, deriv, post):
    return AnsatzTerm(tag, slot, deriv, post)


PRINCIPAL = {
    1: (_t("P1", 1, ID, D1), _t("P2", 2, ID, D2)),
    2: (_t("P1", 1, ID, DX), _t("P2", 2, ID, D12)),
    3: (_t("P1", 1, ID, DXD1), _t("P2", 2, ID, DXD2)),
    4: (_t("P1", 1, ID, DX2), _t("P2", 2, ID, DXD12)),
}

TERMS = {
    1: (
        _t("C11", 1, D1, ID),
        _t("C12", 2, D2, ID),
    ),
    2: (
        _t("C11", 1, D1, D1),
        _t("C13", 1, D2, D2),
        _t("C21", 1, DX, ID),
        _t("C12", 2, D2, D1),
        _t("C14", 2, D1, D2),
        _t("C22", 2, D12, ID),
    ),
    3: (
        _t("C11", 1, D1, DX),
        _t("C13", 1, D2, D12),
        _t("C21", 1, DX, D1),
        _t("C23", 1, D12, D2),
        _t("C31", 1, DXD1, ID),
        _t("C14", 2, D1, D12),
        _t("C12", 2, D2, DX),
        _t("C24", 2, DX, D2),
        _t("C22", 2, D12, D1),
        _t("C32", 2, DXD2, ID),
    ),
    4: (
        _t("C11", 1, D1, DXD1),
        _t("C13", 1, D2, DXD2),
        _t("C21", 1, DX, DX),
        _t("C23", 1, D12, D12),
        _t("C31", 1, DXD1, D1),
        _t("C33", 1, DXD2, D2),
        _t("C41", 1, DX2, ID),
        _t("C14", 2, D1, DXD2),
        _t("C12", 2, D2, DXD1),
        _t("C24", 2, DX, D12),
        _t("C22", 2, D12, DX),
        _t("C34", 2, DXD1, D2),
        _t("C32", 2, DXD2, D1),
        _t("C42", 2, DXD12, ID),
    ),
}


def _coefficients_half(lam, mu, s):
    c = s * lam / (lam - mu)
    return {"C11": c, "C12": c}


def _coefficients_one(lam, mu, s):
    d = mu - lam - 1
    return {
        "C11": s * Fraction(1) / (2 * d),
        "C13": s * Fraction(1) / (2 * d),
        "C12": s * (lam + Fraction(1, 2)) / d,
        "C14": -s * (lam + Fraction(1, 2)) / d,
        "C21": -lam / d,
        "C22": (lam / d) * (1 + 2 * lam) / (2 * (mu - lam) - 1),
    }


def _coefficients_three_halves(lam, mu, s):
    e = lam - mu + 1
    h = lam + Fraction(1, 2)
    return {
        "C11": s * h / e,
        "C12": s * h / e,
        "C13": s * Fraction(1) / (2 * e),
        "C14": -s * Fraction(1) / (2 * e),
        "C21": h * (lam - mu + Fraction(1, 2)) / e**2,
        "C24": h * (lam - mu + Fraction(1, 2)) / e**2,
        "C23": -h / (2 * e**2),
        "C22": h / (2 * e**2),
        "C31": s * lam * h / e**2,
        "C32": s * lam * h / e**2,
    }


def _coefficients_two(lam, mu, s):
    a = lam - mu + 2
    b = 2 * lam - 2 * mu + 3
    e = lam - mu + 1
    d = mu - lam - 2
    return {
        "C11": s * Fraction(1) / d,
        "C13": s * Fraction(1) / d,
        "C12": s * (lam + 1) / d,
        "C14": -s * (lam + 1) / d,
        "C21": (2 * lam + 1) / a,
        "C24": (lam + 1) / a,
        "C23": -Fraction(1) / (a * b),
        "C22": (2 * lam + 1) * (lam + 1) / (a * b),
        "C31": -s * (2 * lam + 1) / (a * b),
        "C33": -s * (2 * lam + 1) / (a * b),
        "C32": -s * (2 * lam + 1) * (lam + 1) / (a * b),
        "C34": s * (2 * lam + 1) * (lam + 1) / (a * b),
        "C41": lam * (2 * lam + 1) / (a * b),
        "C42": lam * (2 * lam + 1) * (lam + 1) / (a * b * e),
    }


_FORMULAS = {
    1: _coefficients_half,
    2: _coefficients_one,
    3: _coefficients_three_halves,
    4: _coefficients_two,
}

# mu - lam values where the closed form for each order breaks down
_CLOSED_FORM_RESONANCES = {
    0: frozenset(),
    1: frozenset({Fraction(0)}),
    2: frozenset({Fraction(1, 2), Fraction(1)}),
    3: frozenset({Fraction(1)}),
    4: frozenset({Fraction(1), Fraction(3, 2), Fraction(2)}),
}

# singular values found by re-deriving the maps (see solver.derive); the
# shipped value is checked against a fresh derivation by the test suite
SOLVER_RESONANCES = {
    0: frozenset(),
    1: frozenset({Fraction(0)}),
    2: frozenset({Fraction(1, 2), Fraction(1)}),
    3: frozenset({Fraction(1)}),
    4: frozenset({Fraction(1), Fraction(3, 2), Fraction(2)}),
}


def _to_k2(k) -> int:
    k2 = Fraction(k) * 2
    if k2.denominator != 1:
        raise OrderError(f"contact order {k} is not a half-integer")
    return int(k2)


def resonant_set(k) -> frozenset:
    """Values of mu - lam where the order-k equivariant quantization is not unique."""
    k2 = _to_k2(k)
    if k2 not in _CLOSED_FORM_RESONANCES:
        raise OrderError(f"no closed-form quantization at contact order {Fraction(k2, 2)}")
    return _CLOSED_FORM_RESONANCES[k2] | SOLVER_RESONANCES[k2]


def full_resonant_set() -> frozenset:
    out = frozenset()
    for k2 in _CLOSED_FORM_RESONANCES:
        out |= resonant_set(Fraction(k2, 2))
    return out


@dataclass(frozen=True)
class QuantizationMap:
    """Closed-form quantization at doubled order ``k2`` over Q(lam, mu)."""

    k2: int
    terms: tuple
    principal: tuple
    table: dict  # {s: {tag: RationalFunction}}

    @property
    def order(self) -> Fraction:
        return Fraction(self.k2, 2)

    def coefficient(self, tag: str, s: int):
        return self.table[s][tag]

    def to_json(self) -> dict:
        return {
            "k2": self.k2,
            "terms": [
                {"tag": t.tag, "slot": t.slot, "deriv": list(t.deriv), "post": list(t.post), "form": t.describe()}
                for t in self.terms
            ],
            "coefficients": {
                ("even" if s > 0 else "odd"): {t.tag: scalar_str(self.table[s][t.tag]) for t in self.terms}
                for s in (1, -1)
            },
        }


def coefficient_table(k2: int, lam, mu, s: int) -> dict:
    """Closed-form coefficients at the given weights for parity sign s."""
    if k2 not in _FORMULAS:
        raise OrderError(f"no closed-form quantization at contact order {Fraction(k2, 2)}")
    return _FORMULAS[k2](lam, mu, s)


def quantization_map(k) -> QuantizationMap:
    k2 = _to_k2(k)
    if k2 not in _FORMULAS:
        raise OrderError(f"no closed-form quantization at contact order {Fraction(k2, 2)}")
    table = {s: coefficient_table(k2, LAM, MU, s) for s in (1, -1)}
    return QuantizationMap(k2, TERMS[k2], PRINCIPAL[k2], table)


def _check_resonance(k2: int, lam, mu):
    if isinstance(lam, RationalFunction) or isinstance(mu, RationalFunction):
        delta = mu - lam
        if not (isinstance(delta, RationalFunction) and delta.is_constant()):
            return
        delta = delta.constant_value()
    else:
        delta = Fraction(mu) - Fraction(lam)
    if delta in resonant_set(Fraction(k2, 2)):
        raise ResonanceError(
            f"resonant weights for contact order {Fraction(k2, 2)}: mu-lam={delta}",
            factor=f"mu-lam-{delta}" if delta else "mu-lam",
        )


def quantize_homogeneous(S: Symbol, coefficients=None) -> DiffOperator:
    """Quantize a parity-homogeneous symbol."""
    k2 = S.k2
    if k2 == 0:
        return DiffOperator({(0, 0, 0): S.F1}, S.lam, S.mu)
    if k2 not in TERMS:
        raise OrderError(f"no closed-form quantization at contact order {S.order}")
    s = -1 if S.parity() else 1
    if coefficients is None:
        _check_resonance(k2, S.lam, S.mu)
        try:
            coefficients = coefficient_table(k2, S.lam, S.mu, s)
        except ZeroDivisionError as exc:
            raise ResonanceError(f"resonant weights lam={S.lam}, mu={S.mu}: {exc}") from None
    out = DiffOperator({}, S.lam, S.mu)
    for t in PRINCIPAL[k2]:
        out = out + t.apply(S)
    for t in TERMS[k2]:
        c = coefficients[t.tag]
        if c:
            out = out + t.apply(S).scale(c)
    return out


def quantize(S: Symbol) -> DiffOperator:
    """The equivariant quantization of S (split into parity parts if needed)."""
    if S.k2 not in (0,) + ORDERS2:
        raise OrderError(f"no closed-form quantization at contact order {S.order}")
    out = DiffOperator({}, S.lam, S.mu)
    for _, part in S.homogeneous_parts():
        out = out + quantize_homogeneous(part)
    return out


def full_quantize(symbols) -> DiffOperator:
    """Sum of quantize over a list of symbols of orders 0, 1/2, 1, 3/2, 2."""
    symbols = list(symbols)
    if not symbols:
        raise ValueError("full_quantize needs at least one symbol to fix the weights")
    out = DiffOperator({}, symbols[0].lam, symbols[0].mu)
    for S in symbols:
        if S:
            out = out + quantize(S)
    return out


def symbol_map(A: DiffOperator) -> list:
    """Inverse of full_quantize: symbols of orders 0, 1/2, ..., 2 (index = 2k)."""
    if A and A.contact_order2() > 4:
        raise OrderError(f"operator of contact order {A.contact_order()} exceeds 2")
    rest = A
    out = [None] * 5
    for k2 in range(4, -1, -1):
        S = symbol_at(rest, k2)
        out[k2] = S
        if S:
            rest = rest - quantize(S)
    if rest:
        raise AssertionError(f"symbol_map left a remainder {rest}")
    return out


def empty_symbol(k2: int, lam=LAM, mu=MU) -> Symbol:
    return Symbol(SuperFunction(), SuperFunction(), k2, lam, mu)


__all__ = [
    "AnsatzTerm",
    "PRINCIPAL",
    "TERMS",
    "OrderError",
    "QuantizationMap",
    "coefficient_table",
    "quantization_map",
    "quantize",
    "quantize_homogeneous",
    "full_quantize",
    "symbol_map",
    "resonant_set",
    "full_resonant_set",
    "principal_keys",
    "empty_symbol",
]
