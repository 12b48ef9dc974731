"""Exact rational linear algebra on top of sympy, with Fraction in and out."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import sympy


def _to_sympy(rows: Sequence[Sequence]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator)
                          for x in row] for row in rows])


def _to_fraction(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def to_rows(m: sympy.Matrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(_to_fraction(m[i, j]) for j in range(m.cols)) for i in range(m.rows))


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of the kernel, one tuple per basis vector (free-variable normalization)."""
    if len(rows) == 0:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    vecs = _to_sympy(rows).nullspace()
    return [tuple(_to_fraction(v[i]) for i in range(ncols)) for v in vecs]


def rank(rows: Sequence[Sequence]) -> int:
    if len(rows) == 0:
        return 0
    return _to_sympy(rows).rank()


def solve(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Least-squares-free exact solve of a x = b for a consistent system (a may be tall)."""
    A = _to_sympy(a)
    B = _to_sympy(b)
    if A.rows == A.cols:
        return to_rows(A.LUsolve(B))
    # tall full-column-rank system: solve the normal equations, then verify consistency
    X = (A.T * A).LUsolve(A.T * B)
    if A * X != B:
        raise ValueError("inconsistent linear system")
    return to_rows(X)


def inverse(a: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    return to_rows(_to_sympy(a).inv())


def det(a: Sequence[Sequence]) -> Fraction:
    return _to_fraction(_to_sympy(a).det())


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    n, m, p = len(a), len(b), len(b[0]) if len(b) else 0
    return tuple(tuple(sum((Fraction(a[i][k]) * Fraction(b[k][j]) for k in range(m)), Fraction(0))
                       for j in range(p)) for i in range(n))


def transpose(a: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(zip(*a))
