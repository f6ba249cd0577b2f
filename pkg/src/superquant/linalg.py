"""Fraction-free (Bareiss) elimination for small dense systems over Q or Q[lam, mu].

Matrices are lists of rows of scalars.  Entries may be ``Fraction`` or
polynomial ``RationalFunction`` values; intermediate Bareiss quotients are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import RationalFunction, to_fraction


def _size(v) -> tuple:
    """Pivot preference: constants first, then low degree, then few terms."""
    if isinstance(v, RationalFunction):
        num = v.numerator
        return (num.total_degree(), len(num))
    f = to_fraction(v)
    return (0, len(str(f)))


def _exact_div(a, b):
    q = a / b
    if isinstance(q, RationalFunction) and not q.is_polynomial():
        raise ArithmeticError(f"inexact Bareiss division {a} / {b}")
    return q


@dataclass
class Echelon:
    rows: list  # echelon form of the augmented matrix
    pivots: list  # (row index, column) pairs
    pivot_values: list
    ncols: int  # number of coefficient columns (augmented column excluded)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def inconsistent_rows(self) -> list:
        bad = []
        if not self.rows or len(self.rows[0]) <= self.ncols:
            return bad  # no right-hand side
        for i in range(self.rank, len(self.rows)):
            r = self.rows[i]
            if not any(r[: self.ncols]) and r[self.ncols]:
                bad.append(i)
        return bad

    @property
    def consistent(self) -> bool:
        return not self.inconsistent_rows()


def bareiss_echelon(matrix, ncols: int | None = None) -> Echelon:
    """Row echelon form by fraction-free elimination.

    ``ncols`` limits pivoting to the first ``ncols`` columns (the remaining
    columns are carried along, e.g. a right-hand side).
    """
    rows = [list(r) for r in matrix]
    if not rows:
        return Echelon([], [], [], ncols or 0)
    width = len(rows[0])
    ncols = width if ncols is None else ncols
    prev = 1
    pivots, pivot_values = [], []
    r = 0
    for c in range(ncols):
        cand = [i for i in range(r, len(rows)) if rows[i][c]]
        if not cand:
            continue
        best = min(cand, key=lambda i: _size(rows[i][c]))
        rows[r], rows[best] = rows[best], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            a = rows[i][c]
            row = rows[i]
            if a:
                for j in range(c + 1, width):
                    row[j] = _exact_div(p * row[j] - a * rows[r][j], prev)
            else:
                for j in range(c + 1, width):
                    if row[j]:
                        row[j] = _exact_div(p * row[j], prev)
            row[c] = 0
        pivots.append((r, c))
        pivot_values.append(p)
        prev = p
        r += 1
        if r == len(rows):
            break
    return Echelon(rows, pivots, pivot_values, ncols)


def back_substitute(ech: Echelon) -> list:
    """Solve a consistent, full-column-rank echelon system (field division)."""
    if ech.rank != ech.ncols:
        raise ValueError("system is not of full column rank")
    sol = [None] * ech.ncols
    for r, c in reversed(ech.pivots):
        row = ech.rows[r]
        acc = row[ech.ncols]
        for j in range(c + 1, ech.ncols):
            if row[j]:
                acc = acc - row[j] * sol[j]
        sol[c] = acc / row[c]
    return sol


def rref(matrix, ncols: int | None = None) -> list:
    """Reduced row echelon form over the field (nonzero rows only)."""
    ech = bareiss_echelon(matrix, ncols)
    width = len(matrix[0]) if matrix else 0
    rows = []
    for r, c in ech.pivots:
        p = ech.rows[r][c]
        rows.append([v / p if v else v for v in ech.rows[r]])
    if ech.inconsistent_rows():
        rows.append([0] * (width - 1) + [1])
    # clear above pivots
    for idx in range(len(rows) - 1, -1, -1):
        lead = next((j for j, v in enumerate(rows[idx]) if v), None)
        if lead is None:
            continue
        for up in range(idx):
            f = rows[up][lead]
            if f:
                rows[up] = [u - f * v for u, v in zip(rows[up], rows[idx])]
    return [tuple(_canonical_zero(v) for v in row) for row in rows]


def _canonical_zero(v):
    return v if v else 0


def rank(matrix, ncols: int | None = None) -> int:
    return bareiss_echelon(matrix, ncols).rank


def primitive_row(row) -> tuple:
    """Scale a row to a canonical representative of its line.

    Polynomial rows are divided by the gcd of their entries and made monic in
    the first nonzero entry; rational rows get first nonzero entry 1.
    """
    lead = next((v for v in row if v), None)
    if lead is None:
        return tuple(0 for _ in row)
    if any(isinstance(v, RationalFunction) for v in row):
        polys = [v.numerator for v in row if v]
        if all(isinstance(v, RationalFunction) and v.is_polynomial() or not isinstance(v, RationalFunction) for v in row):
            g = polys[0]
            for p in polys[1:]:
                g = g.gcd(p)
                if g.is_constant():
                    break
            g_rf = RationalFunction(g)
            scaled = [v / g_rf if v else 0 for v in row]
            lead = next(v for v in scaled if v)
            lc = lead.numerator.leading_coefficient()
            c = Fraction(int(lc.p), int(lc.q))
            return tuple((v / c) if v else 0 for v in scaled)
        return tuple((v / lead) if v else 0 for v in row)
    lead = to_fraction(lead)
    return tuple((to_fraction(v) / lead) if v else Fraction(0) for v in row)


def row_key(row) -> tuple:
    out = []
    for v in row:
        if isinstance(v, RationalFunction):
            out.append(v.key())
        elif v:
            f = to_fraction(v)
            out.append(((((0, 0), (f.numerator, f.denominator)),), (((0, 0), (1, 1)),)))
        else:
            out.append(((), (((0, 0), (1, 1)),)))
    return tuple(out)
