"""Differential operators F_lam -> F_mu in the normal form sum a_{l,m,n} dx^l Dbar1^m Dbar2^n.

Keys ``(l, m, n)`` have ``m, n in {0, 1}``.  Composition uses the relations

    Dbar_i o a = Dbar_i(a) + (-1)^{p(a)} a o Dbar_i,    dx o a = a' + a o dx,
    Dbar_2 Dbar_1 = -Dbar_1 Dbar_2,   Dbar_i^2 = -dx,   Dbar_i dx = dx Dbar_i.

Contact orders are kept doubled (``2l + m + n``) so they stay integral.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .contact import HALF, WeightMismatchError, _parity_sign
from .scalars import LAM, MU, scalar_str
from .superfunctions import (
    ParityError,
    SuperFunction,
    apply_monomial,
    dbar,
    mask_parity,
    partial_x,
    sf_mul,
    superfunction_terms,
    to_json as sf_to_json,
)


class ZeroOperatorError(ValueError):
    """The zero operator has no contact order or principal symbol."""


def _twist(a: SuperFunction) -> SuperFunction:
    """(-1)^{p(a)} a, extended linearly to inhomogeneous a."""
    return SuperFunction._raw({k: (-v if mask_parity(k[1]) else v) for k, v in a._terms.items()})


def _acc(out: dict, key, value: SuperFunction):
    if not value:
        return
    cur = out.get(key)
    if cur is None:
        out[key] = value
    else:
        s = cur + value
        if s:
            out[key] = s
        else:
            del out[key]


def _lmul_dx(terms: dict) -> dict:
    out = {}
    for (l, m, n), a in terms.items():
        _acc(out, (l, m, n), partial_x(a))
        _acc(out, (l + 1, m, n), a)
    return out


def _lmul_dbar(i: int, terms: dict) -> dict:
    out = {}
    for (l, m, n), a in terms.items():
        _acc(out, (l, m, n), dbar(i, a))
        ta = _twist(a)
        if i == 1:
            if m:
                _acc(out, (l + 1, 0, n), -ta)
            else:
                _acc(out, (l, 1, n), ta)
        else:
            # Dbar2 Dbar1^m = (-1)^m Dbar1^m Dbar2
            if m:
                ta = -ta
            if n:
                _acc(out, (l + 1, m, 0), -ta)
            else:
                _acc(out, (l, m, 1), ta)
    return out


def _lmul_fn(g: SuperFunction, terms: dict) -> dict:
    out = {}
    for key, a in terms.items():
        _acc(out, key, sf_mul(g, a))
    return out


def _lmul_monomial(l: int, m: int, n: int, terms: dict) -> dict:
    if n:
        terms = _lmul_dbar(2, terms)
    if m:
        terms = _lmul_dbar(1, terms)
    for _ in range(l):
        terms = _lmul_dx(terms)
    return terms


class DiffOperator:
    """A differential operator from lam-densities to mu-densities in normal form."""

    __slots__ = ("_terms", "source_weight", "target_weight")

    def __init__(self, terms=None, source_weight=LAM, target_weight=MU):
        clean = {}
        for (l, m, n), a in (terms or {}).items():
            if m not in (0, 1) or n not in (0, 1) or l < 0:
                raise ValueError(f"({l}, {m}, {n}) is not a normal-form index")
            if not isinstance(a, SuperFunction):
                a = SuperFunction.constant(a)
            if a:
                clean[(l, m, n)] = a
        self._terms = clean
        self.source_weight = source_weight
        self.target_weight = target_weight

    @classmethod
    def _raw(cls, terms, source_weight, target_weight) -> DiffOperator:
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.source_weight = source_weight
        obj.target_weight = target_weight
        return obj

    @classmethod
    def identity(cls, weight=LAM) -> DiffOperator:
        return cls({(0, 0, 0): SuperFunction.constant(1)}, weight, weight)

    @classmethod
    def multiplication(cls, a: SuperFunction, source_weight=LAM, target_weight=MU) -> DiffOperator:
        return cls({(0, 0, 0): a}, source_weight, target_weight)

    @classmethod
    def monomial(cls, l, m=0, n=0, coeff=None, source_weight=LAM, target_weight=MU) -> DiffOperator:
        if coeff is None:
            coeff = SuperFunction.constant(1)
        return cls({(l, m, n): coeff}, source_weight, target_weight)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, l, m=0, n=0) -> SuperFunction:
        return self._terms.get((l, m, n), SuperFunction())

    def with_weights(self, source_weight, target_weight) -> DiffOperator:
        return DiffOperator._raw(dict(self._terms), source_weight, target_weight)

    # structure --------------------------------------------------------
    def contact_order2(self) -> int:
        """Twice the contact order: max of 2l + m + n over nonzero terms."""
        if not self._terms:
            raise ZeroOperatorError("the zero operator has no contact order")
        return max(2 * l + m + n for (l, m, n) in self._terms)

    def contact_order(self) -> Fraction:
        return Fraction(self.contact_order2(), 2)

    def in_fine_filtration(self, k) -> bool:
        """Membership in D^k; the zero operator lies in every D^k."""
        return not self._terms or self.contact_order2() <= 2 * Fraction(k)

    def in_classical_filtration(self, k: int) -> bool:
        """Membership in D^(k): plain order max(l + m + n) <= k.

        Each Dbar_i counts as a first-order operator (it contains xi_i dx).
        """
        return not self._terms or max(l + m + n for (l, m, n) in self._terms) <= k

    def parity(self) -> int:
        ps = set()
        for (l, m, n), a in self._terms.items():
            for _, m2 in a._terms:
                ps.add((mask_parity(m2) + m + n) % 2)
        if len(ps) > 1:
            raise ParityError(f"operator {self} is not homogeneous")
        return ps.pop() if ps else 0

    def is_homogeneous(self) -> bool:
        try:
            self.parity()
        except ParityError:
            return False
        return True

    def homogeneous_parts(self):
        parts = {0: {}, 1: {}}
        for (l, m, n), a in self._terms.items():
            for p_a, piece in a.homogeneous_parts():
                parts[(p_a + m + n) % 2][(l, m, n)] = piece
        for p in (0, 1):
            if parts[p]:
                yield p, DiffOperator._raw(parts[p], self.source_weight, self.target_weight)

    def apply(self, h: SuperFunction) -> SuperFunction:
        out = SuperFunction()
        for (l, m, n), a in self._terms.items():
            out = out + sf_mul(a, apply_monomial(l, m, n, h))
        return out

    def __call__(self, h: SuperFunction) -> SuperFunction:
        return self.apply(h)

    # linear structure -------------------------------------------------
    def _check_same_weights(self, other: DiffOperator):
        if self.source_weight != other.source_weight or self.target_weight != other.target_weight:
            raise WeightMismatchError("operators act between different density modules")

    def __add__(self, other: DiffOperator) -> DiffOperator:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        self._check_same_weights(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            _acc(out, k, v)
        return DiffOperator._raw(out, self.source_weight, self.target_weight)

    def __neg__(self) -> DiffOperator:
        return DiffOperator._raw({k: -v for k, v in self._terms.items()}, self.source_weight, self.target_weight)

    def __sub__(self, other: DiffOperator) -> DiffOperator:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> DiffOperator:
        out = {}
        for k, v in self._terms.items():
            w = v.scale(c)
            if w:
                out[k] = w
        return DiffOperator._raw(out, self.source_weight, self.target_weight)

    def left_multiply(self, g: SuperFunction) -> DiffOperator:
        return DiffOperator._raw(_lmul_fn(g, self._terms), self.source_weight, self.target_weight)

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, SuperFunction):
            return self.left_multiply(other)
        return self.scale(other)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (
            self._terms == other._terms
            and self.source_weight == other.source_weight
            and self.target_weight == other.target_weight
        )

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        return operator_str(self)

    def __repr__(self):
        return f"DiffOperator({str(self)!r})"


def compose(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    """Normal form of A o B; requires A.source_weight == B.target_weight."""
    if A.source_weight != B.target_weight:
        raise WeightMismatchError(
            f"cannot compose: source weight {A.source_weight} != target weight {B.target_weight}"
        )
    out = {}
    cache = {}
    for (l, m, n), a in A._terms.items():
        moved = cache.get((l, m, n))
        if moved is None:
            moved = cache[(l, m, n)] = _lmul_monomial(l, m, n, B._terms)
        for key, b in moved.items():
            _acc(out, key, sf_mul(a, b))
    return DiffOperator._raw(out, B.source_weight, A.target_weight)


def lie_derivative_operator(f: SuperFunction, weight) -> DiffOperator:
    """L^weight_{X_f} = X_f + weight f' as an operator F_weight -> F_weight."""
    if not f.is_homogeneous():
        raise ParityError(f"contact Hamiltonian {f} is not homogeneous")
    half = HALF * _parity_sign(f.parity())
    terms = {
        (1, 0, 0): f,
        (0, 1, 0): dbar(1, f).scale(-half),
        (0, 0, 1): dbar(2, f).scale(-half),
        (0, 0, 0): partial_x(f).scale(weight),
    }
    return DiffOperator(terms, weight, weight)


def lie_operator(f: SuperFunction, A: DiffOperator) -> DiffOperator:
    """L_{X_f}(A) = L^mu_{X_f} o A - (-1)^{p(f)p(A)} A o L^lam_{X_f}."""
    if not f.is_homogeneous():
        raise ParityError(f"contact Hamiltonian {f} is not homogeneous")
    if not A:
        return A
    pf, pA = f.parity(), A.parity()
    left = compose(lie_derivative_operator(f, A.target_weight), A)
    right = compose(A, lie_derivative_operator(f, A.source_weight))
    return left + right if (pf and pA) else left - right


def contact_order(A: DiffOperator) -> Fraction:
    return A.contact_order()


def super_commutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    """[A, B] for homogeneous operators on a single density module."""
    sign = -1 if (A.parity() and B.parity()) else 1
    ab, ba = compose(A, B), compose(B, A)
    return ab + ba if sign < 0 else ab - ba


# formal words -----------------------------------------------------------

_ATOMS = ("dx", "dxi1", "dxi2", "Dbar1", "Dbar2")


def _atom_operator(atom, weight) -> DiffOperator:
    if isinstance(atom, SuperFunction):
        return DiffOperator({(0, 0, 0): atom}, weight, weight)
    if atom == "dx":
        return DiffOperator.monomial(1, 0, 0, source_weight=weight, target_weight=weight)
    if atom == "Dbar1":
        return DiffOperator.monomial(0, 1, 0, source_weight=weight, target_weight=weight)
    if atom == "Dbar2":
        return DiffOperator.monomial(0, 0, 1, source_weight=weight, target_weight=weight)
    if atom in ("dxi1", "dxi2"):
        i = 1 if atom == "dxi1" else 2
        return DiffOperator(
            {(0, i % 2, i // 2): SuperFunction.constant(1), (1, 0, 0): SuperFunction.xi(i)},
            weight,
            weight,
        )
    return DiffOperator({(0, 0, 0): SuperFunction.constant(atom)}, weight, weight)


def normalize(word, source_weight=LAM, target_weight=MU) -> DiffOperator:
    """Normal form of a formal product of atoms, read left to right.

    Atoms are SuperFunctions or scalars (multiplication operators) and the
    strings ``dx``, ``dxi1``, ``dxi2``, ``Dbar1``, ``Dbar2``.
    """
    terms = {(0, 0, 0): SuperFunction.constant(1)}
    for atom in reversed(list(word)):
        if isinstance(atom, SuperFunction):
            terms = _lmul_fn(atom, terms)
        elif atom == "dx":
            terms = _lmul_dx(terms)
        elif atom in ("Dbar1", "Dbar2"):
            terms = _lmul_dbar(int(atom[-1]), terms)
        elif atom in ("dxi1", "dxi2"):
            i = int(atom[-1])
            # d/dxi_i = Dbar_i + xi_i dx
            a = _lmul_dbar(i, terms)
            for key, v in _lmul_fn(SuperFunction.xi(i), _lmul_dx(terms)).items():
                _acc(a, key, v)
            terms = a
        else:
            terms = _lmul_fn(SuperFunction.constant(atom), terms)
    return DiffOperator._raw(terms, source_weight, target_weight)


def rewrite_normalize(word, rng=None, source_weight=LAM, target_weight=MU) -> DiffOperator:
    """Normalize by literal term rewriting, choosing redexes with ``rng``.

    Independent of :func:`compose`; used to check that the rewrite system is
    confluent (any redex order gives the same normal form).
    """
    rng = rng or random.Random(0)
    atoms = []
    for a in word:
        if isinstance(a, str):
            if a not in _ATOMS:
                raise ValueError(f"unknown operator atom {a!r}")
            atoms.append(a)
        else:
            f = a if isinstance(a, SuperFunction) else SuperFunction.constant(a)
            atoms.append(f)
    # linear combination of words: list of (sign_coeff, tuple_of_atoms)
    pending = [(1, tuple(atoms))]
    done = {}
    while pending:
        coeff, w = pending.pop()
        w = _split_inhomogeneous(w)
        if w is None:
            continue
        if isinstance(w, list):
            pending.extend((coeff, ww) for ww in w)
            continue
        redexes = _redexes(w)
        if not redexes:
            key, fn = _read_normal_word(w)
            _acc(done, key, fn.scale(coeff))
            continue
        pos, rule = rng.choice(redexes)
        for c, nw in _apply_rule(w, pos, rule):
            pending.append((coeff * c, nw))
    return DiffOperator._raw(done, source_weight, target_weight)


def _split_inhomogeneous(w):
    """Drop words with a zero function; split a word with an inhomogeneous function."""
    for idx, a in enumerate(w):
        if isinstance(a, SuperFunction):
            if not a:
                return None
            if not a.is_homogeneous():
                return [w[:idx] + (part,) + w[idx + 1:] for _, part in a.homogeneous_parts()]
    return w


def _redexes(w):
    found = []
    for i, a in enumerate(w):
        if a in ("dxi1", "dxi2"):
            found.append((i, "dxi"))
    for i in range(len(w) - 1):
        a, b = w[i], w[i + 1]
        fa, fb = isinstance(a, SuperFunction), isinstance(b, SuperFunction)
        if fa and fb:
            found.append((i, "ff"))
        elif fb and a in ("Dbar1", "Dbar2", "dx"):
            found.append((i, "leibniz"))
        elif a == "Dbar2" and b == "Dbar1":
            found.append((i, "anti"))
        elif a == b and a in ("Dbar1", "Dbar2"):
            found.append((i, "square"))
        elif a in ("Dbar1", "Dbar2") and b == "dx":
            found.append((i, "swap"))
    return found


def _apply_rule(w, i, rule):
    if rule == "dxi":
        k = int(w[i][-1])
        return [
            (1, w[:i] + (f"Dbar{k}",) + w[i + 1:]),
            (1, w[:i] + (SuperFunction.xi(k), "dx") + w[i + 1:]),
        ]
    a, b = w[i], w[i + 1]
    head, tail = w[:i], w[i + 2:]
    if rule == "ff":
        return [(1, head + (sf_mul(a, b),) + tail)]
    if rule == "leibniz":
        if a == "dx":
            return [(1, head + (partial_x(b),) + tail), (1, head + (b, "dx") + tail)]
        k = int(a[-1])
        return [
            (1, head + (dbar(k, b),) + tail),
            (_parity_sign(b.parity()), head + (b, a) + tail),
        ]
    if rule == "anti":
        return [(-1, head + ("Dbar1", "Dbar2") + tail)]
    if rule == "square":
        return [(-1, head + ("dx",) + tail)]
    if rule == "swap":
        return [(1, head + ("dx", a) + tail)]
    raise AssertionError(rule)


def _read_normal_word(w):
    fn = SuperFunction.constant(1)
    rest = w
    if rest and isinstance(rest[0], SuperFunction):
        fn, rest = rest[0], rest[1:]
    l = m = n = 0
    for a in rest:
        if a == "dx":
            l += 1
        elif a == "Dbar1":
            m = 1
        elif a == "Dbar2":
            n = 1
    return (l, m, n), fn


# text and JSON ----------------------------------------------------------

def _monomial_text(l, m, n) -> list:
    out = []
    if l == 1:
        out.append("dx")
    elif l > 1:
        out.append(f"dx^{l}")
    if m:
        out.append("Dbar1")
    if n:
        out.append("Dbar2")
    return out


def operator_str(A: DiffOperator) -> str:
    """Text form, highest contact order first, e.g. ``dx^2 + x*dx*Dbar1``."""
    parts = []
    keys = sorted(A._terms, key=lambda k: (-(2 * k[0] + k[1] + k[2]), -k[0], -k[1], -k[2]))
    for key in keys:
        a = A._terms[key]
        mono = _monomial_text(*key)
        sub = superfunction_terms(a)
        if len(sub) == 1:
            neg, body = sub[0]
            pieces = [] if body == "1" else [body]
            pieces += mono
            parts.append((neg, "*".join(pieces) if pieces else "1"))
        else:
            inner = _plain_join(sub)
            parts.append((False, "*".join([f"({inner})"] + mono)))
    if not parts:
        return "0"
    neg, body = parts[0]
    s = ("-" if neg else "") + body
    for neg, body in parts[1:]:
        s += (" - " if neg else " + ") + body
    return s


def _plain_join(sub) -> str:
    neg, body = sub[0]
    s = ("-" if neg else "") + body
    for neg, body in sub[1:]:
        s += (" - " if neg else " + ") + body
    return s


def to_json(A: DiffOperator) -> dict:
    keys = sorted(A._terms)
    return {
        "lam": scalar_str(A.source_weight),
        "mu": scalar_str(A.target_weight),
        "terms": [{"l": l, "m": m, "n": n, "coeff": sf_to_json(A._terms[(l, m, n)])} for (l, m, n) in keys],
    }
