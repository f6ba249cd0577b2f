"""Shared strategies and golden-file helpers."""

from __future__ import annotations

import os
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from superquant.scalars import LAM, MU, RationalFunction
from superquant.superfunctions import MASKS, SuperFunction, mask_parity

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

GOLDEN = Path(__file__).parent / "golden"
UPDATE_GOLDEN = os.environ.get("SUPERQUANT_UPDATE_GOLDEN") == "1"


def check_golden(name: str, text: str):
    """Byte-compare ``text`` with tests/golden/<name>; rewrite it when updating."""
    path = GOLDEN / name
    if UPDATE_GOLDEN:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    assert path.exists(), f"missing golden file {name}; run with SUPERQUANT_UPDATE_GOLDEN=1"
    assert text == path.read_text(), f"output differs from golden file {name}"


@pytest.fixture
def rng():
    return random.Random(12345)


fractions = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 6))
nonzero_fractions = fractions.filter(bool)

# small polynomials in lam, mu: sums of c * lam^i * mu^j with i + j <= 2
_monomials = st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda e: sum(e) <= 2)
polynomials = st.dictionaries(_monomials, nonzero_fractions, max_size=3).map(
    lambda d: sum((c * LAM**i * MU**j for (i, j), c in d.items()), RationalFunction(0))
)
rational_functions = st.tuples(polynomials, polynomials.filter(bool)).map(lambda nd: nd[0] / nd[1])


def superfunctions(max_degree: int = 3, parity=None, coeffs=fractions):
    masks = MASKS if parity is None else [m for m in MASKS if mask_parity(m) == parity]
    keys = st.tuples(st.integers(0, max_degree), st.sampled_from(masks))
    return st.dictionaries(keys, coeffs, max_size=4).map(SuperFunction)


homogeneous_superfunctions = st.integers(0, 1).flatmap(lambda p: superfunctions(parity=p))


@pytest.fixture(scope="session")
def derived():
    """Solver reports for every (doubled order, parity sign), computed once."""
    from superquant.solver import derive

    cache = {}

    def get(k2, s):
        if (k2, s) not in cache:
            cache[(k2, s)] = derive(Fraction(k2, 2), s)
        return cache[(k2, s)]

    return get
