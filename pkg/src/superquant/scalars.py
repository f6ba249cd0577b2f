"""Exact coefficient fields: the rationals Q and the function field Q(lam, mu).

Rationals are plain :class:`fractions.Fraction` values.  Rational functions in
the two weights are :class:`RationalFunction` instances backed by FLINT
multivariate polynomials; every result is stored in canonical form (reduced by
the polynomial gcd, denominator monic in graded-lex order with lam > mu), so
equal values have identical stored representations.

Every other module is written against the arithmetic operators only, so the
same code runs with ``Fraction`` weights (numeric spot checks) and with
``RationalFunction`` weights (symbolic derivations).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

import flint

__all__ = [
    "Fraction",
    "RationalFunction",
    "ResonanceError",
    "Field",
    "QQ",
    "QQ_LAM_MU",
    "LAM",
    "MU",
    "POLY_CTX",
    "is_zero",
    "evaluate",
    "substitute_delta",
    "scalar_str",
    "to_fraction",
]

POLY_CTX = flint.fmpq_mpoly_ctx.get(("lam", "mu"), "deglex")
_P_LAM, _P_MU = POLY_CTX.gens()
_P_ONE = POLY_CTX.constant(1)
_P_ZERO = POLY_CTX.constant(0)


class ResonanceError(ZeroDivisionError):
    """A denominator vanished at a specialization of the weights."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


def _fmpq(q) -> flint.fmpq:
    if isinstance(q, flint.fmpq):
        return q
    if isinstance(q, int):
        return flint.fmpq(q)
    return flint.fmpq(q.numerator, q.denominator)


def _coerce_poly(value):
    """Return an fmpq_mpoly for int/Fraction/fmpq, or None if not a ground value."""
    if isinstance(value, (int, Fraction, flint.fmpq)) and not isinstance(value, bool):
        return POLY_CTX.constant(_fmpq(value))
    if isinstance(value, _RationalABC):
        return POLY_CTX.constant(_fmpq(value))
    return None


def _poly_key(p):
    return tuple((m, (int(c.p), int(c.q))) for m, c in p.terms())


class RationalFunction:
    """An element of Q(lam, mu) in canonical reduced form.

    >>> RationalFunction.lam() / (RationalFunction.lam() - RationalFunction.mu())
    RationalFunction('lam/(lam-mu)')
    """

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, num, den=None, *, _canonical=False):
        if isinstance(num, RationalFunction):
            if den is not None:
                raise TypeError("RationalFunction(rf, den) is not supported")
            self._num, self._den, self._hash = num._num, num._den, num._hash
            return
        if not isinstance(num, flint.fmpq_mpoly):
            num = _coerce_poly(num)
            if num is None:
                raise TypeError(f"cannot build a RationalFunction from {type(num).__name__}")
        if den is None:
            den = _P_ONE
            _canonical = True
        elif not isinstance(den, flint.fmpq_mpoly):
            den = _coerce_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self._hash = None
        if _canonical:
            self._num, self._den = num, den
        else:
            self._num, self._den = _reduce(num, den)

    # constructors -----------------------------------------------------
    @classmethod
    def lam(cls) -> RationalFunction:
        return cls(_P_LAM)

    @classmethod
    def mu(cls) -> RationalFunction:
        return cls(_P_MU)

    @classmethod
    def from_polys(cls, num, den=None) -> RationalFunction:
        return cls(num, den)

    @property
    def numerator(self):
        return self._num

    @property
    def denominator(self):
        return self._den

    def is_polynomial(self) -> bool:
        return self._den.is_one()

    def is_constant(self) -> bool:
        return self._den.is_one() and self._num.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        c = self._num.coefficient(0) if not self._num.is_zero() else flint.fmpq(0)
        return Fraction(int(c.p), int(c.q))

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        p = _coerce_poly(other)
        if p is None:
            return None
        return RationalFunction(p, _P_ONE, _canonical=True)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o._num.is_zero():
            return self
        if self._num.is_zero():
            return o
        if self._den.is_one() and o._den.is_one():
            return RationalFunction(self._num + o._num, _P_ONE, _canonical=True)
        if self._den == o._den:
            return RationalFunction(self._num + o._num, self._den)
        g = self._den.gcd(o._den)
        if g.is_one():
            num = self._num * o._den + o._num * self._den
            # gcd(num, den1*den2) = 1 when the denominators are coprime
            return RationalFunction(*_monic(num, self._den * o._den), _canonical=True)
        d1 = self._den / g
        d2 = o._den / g
        num = self._num * d2 + o._num * d1
        return RationalFunction(num, d1 * o._den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self._num, self._den, _canonical=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._num.is_zero() or o._num.is_zero():
            return RationalFunction(_P_ZERO, _P_ONE, _canonical=True)
        if self._den.is_one() and o._den.is_one():
            return RationalFunction(self._num * o._num, _P_ONE, _canonical=True)
        n1, d2 = _cancel(self._num, o._den)
        n2, d1 = _cancel(o._num, self._den)
        return RationalFunction(*_monic(n1 * n2, d1 * d2), _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if self._num.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(lam, mu)")
        return RationalFunction(*_monic(self._den, self._num), _canonical=True)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self._num**n, self._den**n, _canonical=True)

    # comparison -------------------------------------------------------
    def __bool__(self):
        return not self._num.is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._num == o._num and self._den == o._den

    def __hash__(self):
        if self._hash is None:
            if self._den.is_one() and self._num.is_constant():
                # agree with hash(Fraction) for constants
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash((_poly_key(self._num), _poly_key(self._den)))
        return self._hash

    def key(self):
        """A hashable, totally ordered canonical key."""
        return (_poly_key(self._num), _poly_key(self._den))

    # specialization ---------------------------------------------------
    def evaluate(self, lam, mu) -> Fraction:
        return evaluate(self, lam, mu)

    def subs_delta(self, delta) -> RationalFunction:
        return substitute_delta(self, delta)

    def factor_denominator(self):
        """Irreducible factors of the denominator as (poly, multiplicity) pairs."""
        _, factors = self._den.factor()
        return [(f, e) for f, e in factors]

    def __str__(self):
        if self._den.is_one():
            return poly_str(self._num)
        n = poly_str(self._num)
        d = poly_str(self._den)
        if len(self._num) > 1 or "/" in n:
            n = f"({n})"
        if len(self._den) > 1 or "*" in d or "/" in d:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def _reduce(num, den):
    if num.is_zero():
        return _P_ZERO, _P_ONE
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    return _monic(num, den)


def _monic(num, den):
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _cancel(num, den):
    if den.is_constant() or num.is_constant():
        return num, den
    g = num.gcd(den)
    if g.is_one():
        return num, den
    return num / g, den / g


def _mono_str(m) -> str:
    parts = []
    for name, e in zip(("lam", "mu"), m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def poly_str(p) -> str:
    """Render a polynomial in lam, mu, highest graded-lex term first."""
    if p.is_zero():
        return "0"
    out = []
    for m, c in p.terms():
        c = Fraction(int(c.p), int(c.q))
        sign = "-" if c < 0 else "+"
        c = abs(c)
        mono = _mono_str(m)
        if not mono:
            body = str(c)
        elif c == 1:
            body = mono
        else:
            body = f"{c}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        s += sign + body
    return s


class Field:
    """A coefficient field: ``QQ`` (Fraction) or ``QQ_LAM_MU`` (RationalFunction)."""

    def __init__(self, name, convert, symbolic):
        self.name = name
        self._convert = convert
        self.symbolic = symbolic

    @property
    def zero(self):
        return self._convert(0)

    @property
    def one(self):
        return self._convert(1)

    def __call__(self, value):
        return self._convert(value)

    def __repr__(self):
        return self.name


def _to_rf(value):
    if isinstance(value, RationalFunction):
        return value
    return RationalFunction(value)


def to_fraction(value) -> Fraction:
    """Convert an int/Fraction/constant RationalFunction to Fraction."""
    if isinstance(value, RationalFunction):
        return value.constant_value()
    if isinstance(value, Fraction):
        return value
    if isinstance(value, flint.fmpq):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


QQ = Field("QQ", to_fraction, False)
QQ_LAM_MU = Field("QQ(lam,mu)", _to_rf, True)
LAM = RationalFunction.lam()
MU = RationalFunction.mu()


def is_zero(value) -> bool:
    return not value


def evaluate(r, lam, mu) -> Fraction:
    """Substitute numeric weights into ``r``.

    Raises :class:`ResonanceError` naming the denominator factor that
    vanishes at ``(lam, mu)``.
    """
    if not isinstance(r, RationalFunction):
        return to_fraction(r)
    pl, pm = _fmpq(to_fraction(lam)), _fmpq(to_fraction(mu))
    d = r.denominator(pl, pm)
    if d == 0:
        bad = None
        for f, _ in r.factor_denominator():
            if f(pl, pm) == 0:
                bad = poly_str(f)
                break
        raise ResonanceError(
            f"resonant specialization: factor {bad} of the denominator vanishes "
            f"at lam={to_fraction(lam)}, mu={to_fraction(mu)}",
            factor=bad,
        )
    v = r.numerator(pl, pm) / d
    return Fraction(int(v.p), int(v.q))


def substitute_delta(r, delta):
    """Substitute mu -> lam + delta; lam stays symbolic.

    Raises :class:`ResonanceError` if the denominator vanishes identically.
    """
    if not isinstance(r, RationalFunction):
        return r
    shift = _P_LAM + _fmpq(to_fraction(delta))
    den = r.denominator.compose(_P_LAM, shift)
    if den.is_zero():
        bad = None
        for f, _ in r.factor_denominator():
            if f.compose(_P_LAM, shift).is_zero():
                bad = poly_str(f)
                break
        raise ResonanceError(
            f"resonant specialization: factor {bad} vanishes at mu-lam={to_fraction(delta)}",
            factor=bad,
        )
    return RationalFunction(r.numerator.compose(_P_LAM, shift), den)


def substitute_lam(r, value):
    """Substitute a numeric lam; mu stays symbolic."""
    if not isinstance(r, RationalFunction):
        return r
    c = POLY_CTX.constant(_fmpq(to_fraction(value)))
    den = r.denominator.compose(c, _P_MU)
    if den.is_zero():
        raise ResonanceError(f"denominator {poly_str(r.denominator)} vanishes at lam={to_fraction(value)}")
    return RationalFunction(r.numerator.compose(c, _P_MU), den)


def _factor_pieces(poly):
    c, facs = poly.factor()
    pieces = []
    for f, e in sorted(facs, key=lambda fe: (fe[0].total_degree(), len(fe[0]), poly_str(fe[0]))):
        t = poly_str(f)
        if len(f) > 1:
            t = f"({t})"
        pieces.append(t if e == 1 else f"{t}^{e}")
    return Fraction(int(c.p), int(c.q)), pieces


def factored_str(value) -> str:
    """Text with numerator and denominator split into irreducible factors.

    >>> factored_str(LAM * (2 * LAM + 1) / (2 * (LAM - MU + 1)))
    'lam*(2*lam+1)/(2*(lam-mu+1))'
    """
    if not isinstance(value, RationalFunction) or value.is_constant() or not value:
        return scalar_str(value)
    cn, num = _factor_pieces(value.numerator)
    cd, den = _factor_pieces(value.denominator)
    c = cn / cd
    sign = "-" if c < 0 else ""
    c = abs(c)
    if c.numerator != 1:
        num = [str(c.numerator)] + num
    if c.denominator != 1:
        den = [str(c.denominator)] + den
    top = "*".join(num) if num else "1"
    if not den:
        return sign + top
    bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
    return f"{sign}{top}/{bottom}"


def scalar_str(value) -> str:
    """Canonical text of a scalar (Fraction, int or RationalFunction)."""
    if isinstance(value, RationalFunction):
        return str(value)
    return str(to_fraction(value))
