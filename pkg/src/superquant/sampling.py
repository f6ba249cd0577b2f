"""Seeded random superfunctions, symbols and operators for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .operators import DiffOperator
from .scalars import LAM, MU
from .superfunctions import MASKS, SuperFunction, mask_parity
from .symbols import Symbol, principal_keys


def random_fraction(rng: random.Random, bound: int = 9, max_den: int = 5, nonzero: bool = False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-bound, bound), rng.randint(1, max_den))
        if q or not nonzero:
            return q


def random_superfunction(rng: random.Random, max_degree: int = 3, parity=None, terms: int = 4) -> SuperFunction:
    """Up to ``terms`` random monomials; ``parity`` restricts the masks."""
    masks = MASKS if parity is None else [m for m in MASKS if mask_parity(m) == parity]
    out = {}
    for _ in range(rng.randint(1, terms)):
        key = (rng.randint(0, max_degree), rng.choice(masks))
        out[key] = random_fraction(rng, nonzero=True)
    return SuperFunction(out)


def random_hamiltonian(rng: random.Random, max_degree: int = 3) -> SuperFunction:
    """A nonzero parity-homogeneous superfunction."""
    while True:
        f = random_superfunction(rng, max_degree, parity=rng.randint(0, 1))
        if f:
            return f


def random_symbol(rng: random.Random, k2: int, lam=LAM, mu=MU, max_degree: int = 3) -> Symbol:
    F1 = random_superfunction(rng, max_degree)
    F2 = random_superfunction(rng, max_degree) if k2 else SuperFunction()
    return Symbol(F1, F2, k2, lam, mu)


def operator_keys(max_k2: int) -> list:
    keys = []
    for k2 in range(max_k2 + 1):
        for key in principal_keys(k2):
            if key is not None:
                keys.append(key)
    return keys


def random_operator(rng: random.Random, max_k2: int = 4, lam=LAM, mu=MU, max_degree: int = 3,
                    terms: int = 4) -> DiffOperator:
    keys = operator_keys(max_k2)
    out = {}
    for _ in range(rng.randint(1, terms)):
        out[rng.choice(keys)] = random_superfunction(rng, max_degree, terms=2)
    return DiffOperator(out, lam, mu)
