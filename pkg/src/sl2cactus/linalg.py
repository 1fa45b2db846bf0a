"""Dense linear algebra over the rationals (Fraction entries)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        acc = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        acc[j] += x * bk[j]
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(map(Fraction, row)) for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(a: Matrix, cols: int) -> list[list[Fraction]]:
    """Basis of {v : a v = 0}; each vector has its last free coordinate equal to 1."""
    if not a:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    r, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, p in zip(r, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def rank(a: Matrix) -> int:
    return len(rref(a)[1]) if a else 0


def solve_in_span(columns: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients expressing ``target`` in the span of ``columns`` (exact)."""
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(len(target))]
    r, pivots = rref(aug)
    if k in pivots:
        raise ValueError("target is not in the span")
    coeffs = [Fraction(0)] * k
    for row, p in zip(r, pivots):
        coeffs[p] = row[k]
    return coeffs


def normalize_first(v: Sequence[Fraction]) -> list[Fraction]:
    lead = next((x for x in v if x != 0), None)
    if lead is None:
        return list(v)
    return [x / lead for x in v]


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"
