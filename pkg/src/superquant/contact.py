"""Contact vector fields on S^{1|2}, the contact bracket, osp(2|2) and densities."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .superfunctions import (
    ParityError,
    SuperFunction,
    dbar,
    partial_x,
    partial_xi,
    sf_mul,
)

HALF = Fraction(1, 2)


class WeightMismatchError(ValueError):
    """Two densities (or an operator and a density) disagree on their weight."""


def _parity_sign(p: int) -> int:
    return -1 if p else 1


def _require_homogeneous(f: SuperFunction, what: str = "contact Hamiltonian") -> int:
    if not f.is_homogeneous():
        raise ParityError(f"{what} {f} is not homogeneous")
    return f.parity()


@dataclass(frozen=True)
class VectorField:
    """X = coef_x d/dx + coef_xi1 d/dxi1 + coef_xi2 d/dxi2 (coefficients on the left)."""

    coef_x: SuperFunction
    coef_xi1: SuperFunction
    coef_xi2: SuperFunction

    @classmethod
    def dx(cls) -> VectorField:
        zero = SuperFunction()
        return cls(SuperFunction.constant(1), zero, zero)

    @classmethod
    def dxi(cls, i: int) -> VectorField:
        zero, one = SuperFunction(), SuperFunction.constant(1)
        return cls(zero, one, zero) if i == 1 else cls(zero, zero, one)

    @classmethod
    def dbar(cls, i: int) -> VectorField:
        """Dbar_i = d/dxi_i - xi_i d/dx."""
        base = cls.dxi(i)
        return cls(-SuperFunction.xi(i), base.coef_xi1, base.coef_xi2)

    @classmethod
    def d_plus(cls, i: int) -> VectorField:
        """D_i = d/dxi_i + xi_i d/dx."""
        base = cls.dxi(i)
        return cls(SuperFunction.xi(i), base.coef_xi1, base.coef_xi2)

    def __call__(self, h: SuperFunction) -> SuperFunction:
        return (
            sf_mul(self.coef_x, partial_x(h))
            + sf_mul(self.coef_xi1, partial_xi(1, h))
            + sf_mul(self.coef_xi2, partial_xi(2, h))
        )

    def parity(self) -> int:
        ps = set()
        if self.coef_x:
            ps.add(self.coef_x.parity())
        for g in (self.coef_xi1, self.coef_xi2):
            if g:
                ps.add(1 - g.parity())
        if len(ps) > 1:
            raise ParityError(f"vector field {self} is not homogeneous")
        return ps.pop() if ps else 0

    def scale(self, c) -> VectorField:
        return VectorField(self.coef_x.scale(c), self.coef_xi1.scale(c), self.coef_xi2.scale(c))

    def __add__(self, other: VectorField) -> VectorField:
        return VectorField(
            self.coef_x + other.coef_x,
            self.coef_xi1 + other.coef_xi1,
            self.coef_xi2 + other.coef_xi2,
        )

    def __sub__(self, other: VectorField) -> VectorField:
        return self + other.scale(-1)

    def __bool__(self):
        return bool(self.coef_x or self.coef_xi1 or self.coef_xi2)

    def __str__(self):
        return f"({self.coef_x})*dx + ({self.coef_xi1})*dxi1 + ({self.coef_xi2})*dxi2"


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    """Super-commutator [X, Y] = XY - (-1)^{p(X)p(Y)} YX of homogeneous fields."""
    sign = -1 if (X.parity() and Y.parity()) else 1
    comps = []
    for xu, yu in ((X.coef_x, Y.coef_x), (X.coef_xi1, Y.coef_xi1), (X.coef_xi2, Y.coef_xi2)):
        comps.append(X(yu) - Y(xu) if sign > 0 else X(yu) + Y(xu))
    return VectorField(*comps)


def contact_field(f: SuperFunction) -> VectorField:
    """X_f = f dx - (-1)^{p(f)} 1/2 (Dbar1(f) Dbar1 + Dbar2(f) Dbar2), expanded."""
    s = _parity_sign(_require_homogeneous(f))
    d1, d2 = dbar(1, f), dbar(2, f)
    half = HALF * s
    # Dbar_i(f) Dbar_i = Dbar_i(f) d/dxi_i - Dbar_i(f) xi_i d/dx
    coef_x = f + (sf_mul(d1, SuperFunction.xi(1)) + sf_mul(d2, SuperFunction.xi(2))).scale(half)
    return VectorField(coef_x, d1.scale(-half), d2.scale(-half))


def is_contact(X: VectorField) -> bool:
    """True iff [X, Dbar_i] lies in the span of Dbar_1, Dbar_2 for i = 1, 2."""
    for i in (1, 2):
        C = commutator(X, VectorField.dbar(i))
        expected = -(xi_times_right(C.coef_xi1, 1) + xi_times_right(C.coef_xi2, 2))
        if C.coef_x != expected:
            return False
    return True


def xi_times_right(a: SuperFunction, i: int) -> SuperFunction:
    """a * xi_i (right multiplication)."""
    return sf_mul(a, SuperFunction.xi(i))


def contact_bracket(f: SuperFunction, g: SuperFunction) -> SuperFunction:
    """{f, g} = f g' - f' g - (-1)^{p(f)} 1/2 (Dbar1 f Dbar1 g + Dbar2 f Dbar2 g)."""
    pf = _require_homogeneous(f)
    _require_homogeneous(g)
    s = _parity_sign(pf)
    cross = sf_mul(dbar(1, f), dbar(1, g)) + sf_mul(dbar(2, f), dbar(2, g))
    return sf_mul(f, partial_x(g)) - sf_mul(partial_x(f), g) - cross.scale(HALF * s)


def lie_derivative(f: SuperFunction, weight, h: SuperFunction) -> SuperFunction:
    """L^weight_{X_f}(h) = X_f(h) + weight f' h on plain superfunctions."""
    return contact_field(f)(h) + sf_mul(partial_x(f), h).scale(weight)


@dataclass(frozen=True)
class Density:
    """A superfunction regarded as a density of the given weight."""

    value: SuperFunction
    weight: object

    def __add__(self, other: Density) -> Density:
        if self.weight != other.weight:
            raise WeightMismatchError(f"cannot add densities of weight {self.weight} and {other.weight}")
        return Density(self.value + other.value, self.weight)

    def __sub__(self, other: Density) -> Density:
        if self.weight != other.weight:
            raise WeightMismatchError(f"cannot subtract densities of weight {self.weight} and {other.weight}")
        return Density(self.value - other.value, self.weight)

    def scale(self, c) -> Density:
        return Density(self.value.scale(c), self.weight)


def lie_density(f: SuperFunction, lam, g: Density) -> Density:
    """Action of X_f on the density g of weight lam."""
    if g.weight != lam:
        raise WeightMismatchError(f"density has weight {g.weight}, action is at weight {lam}")
    return Density(lie_derivative(f, lam, g.value), lam)


def density_bracket(f: Density, g: Density) -> Density:
    """Poisson bracket F_lam x F_mu -> F_{lam+mu+1}."""
    lam, mu = f.weight, g.weight
    s = _parity_sign(_require_homogeneous(f.value, "density"))
    _require_homogeneous(g.value, "density")
    a, b = f.value, g.value
    cross = sf_mul(dbar(1, a), dbar(1, b)) + sf_mul(dbar(2, a), dbar(2, b))
    value = (
        sf_mul(partial_x(a), b).scale(mu)
        - sf_mul(a, partial_x(b)).scale(lam)
        - cross.scale(HALF * s)
    )
    return Density(value, lam + mu + 1)


# generators -------------------------------------------------------------

def _gen_table():
    x = SuperFunction.x()
    xi1, xi2 = SuperFunction.xi(1), SuperFunction.xi(2)
    one = SuperFunction.constant(1)
    return {
        "1": one,
        "x": x,
        "x2": sf_mul(x, x),
        "xi12": sf_mul(xi1, xi2),
        "xi1": xi1,
        "xi2": xi2,
        "xxi1": sf_mul(x, xi1),
        "xxi2": sf_mul(x, xi2),
    }


GENERATORS = _gen_table()
OSP_NAMES = ("1", "x", "x2", "xi12", "xi1", "xi2", "xxi1", "xxi2")
AFF_NAMES = ("1", "x", "xi12", "xi1", "xi2")


def generator(name: str) -> SuperFunction:
    try:
        return GENERATORS[name]
    except KeyError:
        raise KeyError(f"unknown generator {name!r}; expected one of {', '.join(OSP_NAMES)}") from None


def osp_generators() -> list:
    """Contact Hamiltonians spanning osp(2|2): four even, then four odd."""
    return [GENERATORS[n] for n in OSP_NAMES]


def aff_generators() -> list:
    """Contact Hamiltonians spanning the affine subalgebra Aff(2|2)."""
    return [GENERATORS[n] for n in AFF_NAMES]
