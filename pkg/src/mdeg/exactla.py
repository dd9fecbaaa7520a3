"""Exact linear algebra over Fraction: RREF, rank, nullspace.

Basis handling for matrix spaces runs through these helpers so genericity
and independence checks are certifiable, never floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

Row = List[Fraction]


def _as_rows(rows: Sequence[Sequence]) -> List[Row]:
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence]) -> tuple[List[Row], List[int]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns).

    The output is canonical: two row-sets span the same space iff their
    RREFs are equal.
    """
    a = _as_rows(rows)
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                factor = a[i][c]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> List[Row]:
    """Basis of the right kernel {x : A x = 0}, one vector per free column."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ncols = len(rows[0])
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -reduced[r][f]
        basis.append(vec)
    return basis
