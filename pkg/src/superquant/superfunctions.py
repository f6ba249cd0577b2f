"""Polynomial superfunctions on S^{1|2} and the odd/even derivations acting on them.

A superfunction ``f0(x) + xi1 f1(x) + xi2 f2(x) + xi1 xi2 f12(x)`` is stored
sparsely as ``{(degree_in_x, xi_mask): coefficient}`` with ``xi_mask`` bit 1
for xi1 and bit 2 for xi2.  Odd coordinates are always written in the order
xi1 before xi2.

Grassmann derivatives are *left* derivatives: ``d/dxi1 (xi2 xi1) = -xi2``.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import RationalFunction, scalar_str

XI1 = 1
XI2 = 2
XI12 = 3
MASKS = (0, XI1, XI2, XI12)
_MASK_PARITY = (0, 1, 1, 0)


class ParityError(ValueError):
    """A parity-sensitive operation received a non-homogeneous input."""


def _grassmann_sign(a: int, b: int) -> int:
    """Sign of xi^a * xi^b rewritten in canonical order (0 if they overlap)."""
    if a & b:
        return 0
    if (a & XI2) and (b & XI1):
        return -1
    return 1


def mask_parity(mask: int) -> int:
    return _MASK_PARITY[mask]


class SuperFunction:
    """An element of C^oo(S^{1|2}) with polynomial components."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self._terms = {k: v for k, v in terms.items() if v}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def _raw(cls, terms: dict) -> SuperFunction:
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c) -> SuperFunction:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, degree: int, mask: int = 0, coeff=1) -> SuperFunction:
        return cls({(degree, mask): coeff})

    @classmethod
    def x(cls) -> SuperFunction:
        return cls.monomial(1)

    @classmethod
    def xi(cls, i: int) -> SuperFunction:
        return cls.monomial(0, XI1 if i == 1 else XI2)

    @classmethod
    def from_components(cls, f0=(), f1=(), f2=(), f12=()) -> SuperFunction:
        """Build from coefficient lists (index = power of x) of the four components."""
        terms = {}
        for mask, comp in zip(MASKS, (f0, f1, f2, f12)):
            for n, c in enumerate(comp):
                if c:
                    terms[(n, mask)] = c
        return cls._raw(terms)

    # access -----------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def component(self, mask: int) -> list:
        degs = [n for (n, m) in self._terms if m == mask]
        if not degs:
            return []
        out = [0] * (max(degs) + 1)
        for (n, m), c in self._terms.items():
            if m == mask:
                out[n] = c
        return out

    @property
    def f0(self):
        return self.component(0)

    @property
    def f1(self):
        return self.component(XI1)

    @property
    def f2(self):
        return self.component(XI2)

    @property
    def f12(self):
        return self.component(XI12)

    def coefficient(self, degree: int, mask: int = 0):
        return self._terms.get((degree, mask), 0)

    def x_degree(self) -> int:
        """Highest power of x; -1 for the zero function."""
        return max((n for n, _ in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        parities = {_MASK_PARITY[m] for _, m in self._terms}
        return len(parities) <= 1

    def parity(self) -> int:
        """0 for even, 1 for odd; the zero function counts as even."""
        parities = {_MASK_PARITY[m] for _, m in self._terms}
        if len(parities) > 1:
            raise ParityError(f"superfunction {self} is not homogeneous")
        return parities.pop() if parities else 0

    def even_part(self) -> SuperFunction:
        return SuperFunction._raw({k: v for k, v in self._terms.items() if not _MASK_PARITY[k[1]]})

    def odd_part(self) -> SuperFunction:
        return SuperFunction._raw({k: v for k, v in self._terms.items() if _MASK_PARITY[k[1]]})

    def homogeneous_parts(self):
        """Yield ``(parity, part)`` for each nonzero homogeneous part."""
        even, odd = self.even_part(), self.odd_part()
        if even:
            yield 0, even
        if odd:
            yield 1, odd

    def map_coefficients(self, fn) -> SuperFunction:
        return SuperFunction({k: fn(v) for k, v in self._terms.items()})

    # algebra ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, SuperFunction):
            if isinstance(other, (int, Fraction, RationalFunction)):
                other = SuperFunction.constant(other)
            else:
                return NotImplemented
        out = dict(self._terms)
        for k, v in other._terms.items():
            if k in out:
                s = out[k] + v
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = v
        return SuperFunction._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return SuperFunction._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SuperFunction):
            if isinstance(other, (int, Fraction, RationalFunction)):
                other = SuperFunction.constant(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> SuperFunction:
        if not c:
            return SuperFunction._raw({})
        out = {}
        for k, v in self._terms.items():
            p = c * v
            if p:
                out[k] = p
        return SuperFunction._raw(out)

    def __mul__(self, other):
        if isinstance(other, SuperFunction):
            return sf_mul(self, other)
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = SuperFunction.constant(1)
        for _ in range(n):
            out = sf_mul(out, self)
        return out

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            other = SuperFunction.constant(other)
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        return superfunction_str(self)

    def __repr__(self):
        return f"SuperFunction({str(self)!r})"


def sf_mul(f: SuperFunction, g: SuperFunction) -> SuperFunction:
    """Graded-commutative product with xi_i^2 = 0 and xi1 xi2 = -xi2 xi1."""
    out = {}
    for (n1, a), c1 in f._terms.items():
        for (n2, b), c2 in g._terms.items():
            sign = _grassmann_sign(a, b)
            if not sign:
                continue
            key = (n1 + n2, a | b)
            p = c1 * c2 if sign > 0 else -(c1 * c2)
            if key in out:
                s = out[key] + p
                if s:
                    out[key] = s
                else:
                    del out[key]
            elif p:
                out[key] = p
    return SuperFunction._raw(out)


def partial_x(f: SuperFunction) -> SuperFunction:
    return SuperFunction._raw({(n - 1, m): n * c for (n, m), c in f._terms.items() if n})


def partial_xi(i: int, f: SuperFunction) -> SuperFunction:
    """Left derivative in xi_i."""
    out = {}
    bit = XI1 if i == 1 else XI2
    for (n, m), c in f._terms.items():
        if not m & bit:
            continue
        # xi2 sits behind xi1 in xi1*xi2, so pulling it to the front costs a sign
        sign = -1 if (bit == XI2 and m & XI1) else 1
        out[(n, m & ~bit)] = c if sign > 0 else -c
    return SuperFunction._raw(out)


def xi_times(i: int, f: SuperFunction) -> SuperFunction:
    """Left multiplication by xi_i."""
    bit = XI1 if i == 1 else XI2
    out = {}
    for (n, m), c in f._terms.items():
        sign = _grassmann_sign(bit, m)
        if sign:
            out[(n, m | bit)] = c if sign > 0 else -c
    return SuperFunction._raw(out)


def dbar(i: int, f: SuperFunction) -> SuperFunction:
    """Dbar_i = d/dxi_i - xi_i d/dx."""
    return partial_xi(i, f) - xi_times(i, partial_x(f))


def d_plus(i: int, f: SuperFunction) -> SuperFunction:
    """D_i = d/dxi_i + xi_i d/dx."""
    return partial_xi(i, f) + xi_times(i, partial_x(f))


def dbar12(f: SuperFunction) -> SuperFunction:
    """Dbar_1 Dbar_2 applied to f."""
    return dbar(1, dbar(2, f))


def apply_monomial(l: int, m: int, n: int, f: SuperFunction) -> SuperFunction:
    """Apply the constant-coefficient monomial dx^l Dbar1^m Dbar2^n to f."""
    if n:
        f = dbar(2, f)
    if m:
        f = dbar(1, f)
    for _ in range(l):
        f = partial_x(f)
    return f


# text -------------------------------------------------------------------

_XI_TEXT = {0: "", XI1: "xi1", XI2: "xi2", XI12: "xi1*xi2"}


def coefficient_text(c):
    """Split a scalar into (negative, body) for inline printing.

    ``body`` is None for a unit coefficient; compound rational functions come
    back parenthesized.
    """
    if isinstance(c, RationalFunction):
        num = c.numerator
        if c.is_polynomial() and len(num) == 1:
            s = scalar_str(c)
            neg = s.startswith("-")
            body = s[1:] if neg else s
            return neg, (None if body == "1" else body)
        if num.leading_coefficient() < 0:
            return True, f"({scalar_str(-c)})"
        return False, f"({scalar_str(c)})"
    c = Fraction(c)
    neg = c < 0
    body = str(abs(c))
    return neg, (None if body == "1" else body)


def _join_terms(parts) -> str:
    if not parts:
        return "0"
    neg, body = parts[0]
    s = ("-" if neg else "") + body
    for neg, body in parts[1:]:
        s += (" - " if neg else " + ") + body
    return s


def monomial_body(coeff, factors):
    """Render ``coeff*factor1*factor2...`` and return (negative, text)."""
    neg, cbody = coefficient_text(coeff)
    pieces = ([cbody] if cbody is not None else []) + [f for f in factors if f]
    if not pieces:
        pieces = ["1"]
    return neg, "*".join(pieces)


def superfunction_terms(f: SuperFunction):
    """Signed monomial texts in canonical order: f0, xi1*f1, xi2*f2, xi1*xi2*f12."""
    parts = []
    for mask in MASKS:
        degs = sorted((n for (n, m) in f._terms if m == mask), reverse=True)
        for n in degs:
            xpow = "" if n == 0 else ("x" if n == 1 else f"x^{n}")
            parts.append(monomial_body(f._terms[(n, mask)], [xpow, _XI_TEXT[mask]]))
    return parts


def superfunction_str(f: SuperFunction) -> str:
    return _join_terms(superfunction_terms(f))


def to_json(f: SuperFunction) -> dict:
    """Component record: each component is a list of scalar strings, index = power of x."""
    return {
        name: [scalar_str(c) for c in f.component(mask)]
        for name, mask in (("f0", 0), ("f1", XI1), ("f2", XI2), ("f12", XI12))
    }
