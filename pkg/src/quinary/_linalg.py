"""Small exact linear-algebra helpers over Z, Q and Z/m.

Matrices are plain lists of lists of Python ints (or Fractions) unless a
function says otherwise; flint matrices are used for anything large.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

import flint
import numpy as np


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(r) for r in zip(*m)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def congruent(h, u):
    """Return u^T h u."""
    return matmul(transpose(u), matmul(h, u))


def det(m) -> int | Fraction:
    """Determinant by fraction-free (Bareiss) elimination; exact for ints."""
    a = [list(r) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num / prev if isinstance(num, Fraction) else num // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse_fraction(m) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def common_denominator(rows) -> int:
    d = 1
    for row in rows:
        for x in row:
            den = Fraction(x).denominator
            d = d * den // gcd(d, den)
    return d


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive(v: Sequence[int]) -> list[int]:
    """Divide an integer vector by its content and make the first nonzero entry positive."""
    g = content(v)
    if g == 0:
        return list(v)
    out = [int(x) // g for x in v]
    for x in out:
        if x:
            if x < 0:
                out = [-y for y in out]
            break
    return out


def hnf_rows(gens: Sequence[Sequence[int]]) -> list[list[int]]:
    """Nonzero rows of the Hermite normal form of the row lattice spanned by gens."""
    h = flint.fmpz_mat([[int(x) for x in g] for g in gens]).hnf()
    rows = [[int(x) for x in r] for r in h.tolist()]
    return [r for r in rows if any(r)]


def to_fmpz(m) -> flint.fmpz_mat:
    return flint.fmpz_mat([[int(x) for x in row] for row in m])


def to_fmpq(m) -> flint.fmpq_mat:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    out = flint.fmpq_mat(rows, cols)
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            x = x if isinstance(x, Fraction) else Fraction(int(x))
            out[i, j] = flint.fmpq(int(x.numerator), int(x.denominator))
    return out


def fmpq_to_fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def fmpq_rows(m: flint.fmpq_mat) -> list[list[Fraction]]:
    return [[fmpq_to_fraction(m[i, j]) for j in range(m.ncols())] for i in range(m.nrows())]


def integer_kernel(m) -> list[list[int]]:
    """Z-basis (as rows) of {x in Z^n : m x = 0}; the result is saturated.

    Row-reduces [m^T | I] by HNF: the rows whose left part vanishes carry a
    unimodular basis of the kernel lattice.
    """
    a = to_fmpz(m) if not isinstance(m, flint.fmpz_mat) else m
    r, n = a.nrows(), a.ncols()
    if r == 0:
        return identity(n)
    aug = flint.fmpz_mat(n, r + n)
    at = a.transpose()
    for i in range(n):
        for j in range(r):
            aug[i, j] = at[i, j]
        aug[i, r + i] = 1
    h = aug.hnf()
    out = []
    for i in range(n):
        if all(h[i, j] == 0 for j in range(r)):
            out.append([int(h[i, r + k]) for k in range(n)])
    return out


def rational_kernel(m) -> list[list[int]]:
    """Integer vectors (rows) spanning ker(m) over Q; not necessarily saturated."""
    a = to_fmpz(m) if not isinstance(m, flint.fmpz_mat) else m
    x, nullity = a.nullspace()
    return [[int(x[i, j]) for i in range(x.nrows())] for j in range(nullity)]


def saturate(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis (rows) of (Q-span of vectors) intersected with Z^n."""
    vecs = [list(map(int, v)) for v in vectors if any(v)]
    if not vecs:
        return []
    n = len(vecs[0])
    # Vectors orthogonal to the span, then the integer kernel of those.
    perp = rational_kernel(vecs)
    if not perp:
        return identity(n)
    return integer_kernel(perp)


def rank_mod(m, p: int) -> int:
    if len(m) == 0:
        return 0
    return flint.nmod_mat(_mod_rows(m, p), p).rank()


def kernel_mod(m, p: int) -> list[list[int]]:
    """Basis (rows, reduced echelon form) of the right kernel of m over F_p."""
    a = flint.nmod_mat(_mod_rows(m, p), p)
    x, nullity = a.nullspace()
    basis = [list(col) for col in zip(*x.tolist())][:nullity]
    return rref_mod(basis, p) if basis else []


def _mod_rows(rows, p: int) -> list[list[int]]:
    if isinstance(rows, np.ndarray) and rows.dtype != object:
        return np.mod(rows, p).tolist()
    return [[int(x) % p for x in row] for row in rows]


def rref_mod(rows, p: int) -> list[list[int]]:
    if len(rows) == 0:
        return []
    r, rank = flint.nmod_mat(_mod_rows(rows, p), p).rref()
    return [[int(x) for x in row] for row in r.tolist()[:rank]]


def pivot_columns_mod(rows, p: int) -> list[int]:
    """Pivot columns of the reduced echelon form of rows over F_p."""
    return [next(j for j, x in enumerate(row) if x) for row in rref_mod(rows, p)]


def solve_mod(a, b, p: int) -> list[int] | None:
    """One solution x of a x = b over F_p, or None."""
    n = len(a[0])
    aug = [[int(x) % p for x in row] + [int(y) % p] for row, y in zip(a, b)]
    red = rref_mod(aug, p)
    x = [0] * n
    for row in red:
        lead = next(j for j, v in enumerate(row) if v)
        if lead == n:
            return None
        x[lead] = row[n]
    return x


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """x mod m1*m2 with x = r1 (m1), x = r2 (m2); moduli coprime."""
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2)
