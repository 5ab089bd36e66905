"""The irreducible orthogonal representations W_{a,b} of a rank-5 quadratic space.

W_{a,b} is cut out of the a-fold tensor power of the standard representation
by the Young symmetrizer of the two-row partition ((a+b)/2, (a-b)/2) followed
by the vanishing of every contraction with the quadratic form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _linalg as la
from .errors import InvalidInput, Inconsistency, Unsupported

WEIGHT_CAP = 6
_RANK_PRIME = (1 << 31) - 1


def _rank_lower_bound(rows: np.ndarray) -> int:
    """A certified lower bound for the rank of an integer matrix.

    rank(rows @ P) <= rank(rows) for any P, and the rank of the exact product
    modulo a prime is at most its rational rank.
    """
    rng = np.random.default_rng(1)
    proj = rng.integers(-3, 4, size=(rows.shape[1], rows.shape[0] + 4))
    if int(np.abs(rows).max(initial=0)) * 3 * rows.shape[1] >= 2**62:
        raise Unsupported("entries too large for the rank certificate")
    return la.rank_mod(_exact_matmul(rows, proj), _RANK_PRIME)


def _exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer matrix product, through BLAS when float64 is provably exact."""
    bound = int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0)) * a.shape[1]
    if bound < 2**53:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    if bound < 2**62:
        return a @ b
    raise Unsupported("integer product too large for int64")


def _pivot_rows(basis: np.ndarray) -> list[int]:
    """Rows of basis (N x m, full column rank) forming a square invertible block."""
    m = basis.shape[1]
    support = np.nonzero(np.any(basis != 0, axis=1))[0]
    k = 2 * m
    while True:
        rows = support[:k]
        piv = la.pivot_columns_mod(np.ascontiguousarray(basis[rows].T), _RANK_PRIME)
        if len(piv) == m:
            return [int(rows[j]) for j in piv]
        if k >= len(support):
            raise Inconsistency("basis is not of full rank")
        k *= 2


def weight_dimension(a: int, b: int) -> int:
    if not (isinstance(a, int) and isinstance(b, int)) or b < 0 or a < b:
        raise InvalidInput(f"need a >= b >= 0, got ({a}, {b})")
    num = ((a + 2) ** 2 - (b + 1) ** 2) * (a + 2) * (b + 1)
    return num // 6


def _gl_dimension(shape: tuple[int, ...], n: int = 5) -> int:
    """Hook-content formula for the GL_n representation of a partition."""
    num, den = 1, 1
    cols = [sum(1 for r in shape if r > j) for j in range(shape[0] if shape else 0)]
    for i, r in enumerate(shape):
        for j in range(r):
            num *= n + j - i
            den *= (r - j - 1) + (cols[j] - i - 1) + 1
    return num // den


def _tableau(shape):
    """Row-reading standard filling of a Young diagram: rows of cell positions."""
    rows, k = [], 0
    for r in shape:
        rows.append(list(range(k, k + r)))
        k += r
    return rows


def _perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def _subgroup(blocks, n):
    """All permutations of range(n) preserving each block."""
    perms = [list(range(n))]
    for block in blocks:
        new = []
        for base in perms:
            for images in itertools.permutations(block):
                p = list(base)
                for src, dst in zip(block, images):
                    p[src] = dst
                new.append(p)
        perms = new
    return perms


@lru_cache(maxsize=None)
def _symmetrizer_terms(shape: tuple[int, ...]):
    """Pairs (permutation, sign) of the product a_lambda * b_lambda, collected."""
    n = sum(shape)
    rows = _tableau(shape)
    cols = [[row[j] for row in rows if len(row) > j] for j in range(shape[0])] if n else []
    row_group = _subgroup(rows, n)
    col_group = _subgroup(cols, n)
    terms: dict[tuple[int, ...], int] = {}
    for s in row_group:
        for t in col_group:
            # (s t)(k) = s(t(k))
            st = tuple(s[t[k]] for k in range(n))
            terms[st] = terms.get(st, 0) + _perm_sign(t)
    return [(p, c) for p, c in terms.items() if c]


def _apply_symmetrizer(shape, index: tuple[int, ...]) -> dict[tuple[int, ...], int]:
    """c_lambda applied to the basis tensor e_{i_1} x ... x e_{i_a}.

    A permutation pi sends the factor in slot k to slot pi(k).
    """
    out: dict[tuple[int, ...], int] = {}
    n = len(index)
    for perm, c in _symmetrizer_terms(shape):
        new = [0] * n
        for k in range(n):
            new[perm[k]] = index[k]
        key = tuple(new)
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


def _semistandard(shape, n=5):
    """Fillings of shape (row-reading order) that are semistandard in 0..n-1."""
    cells = [(i, j) for i, r in enumerate(shape) for j in range(r)]
    filling = {}

    def rec(k):
        if k == len(cells):
            yield tuple(filling[c] for c in cells)
            return
        i, j = cells[k]
        lo = 0
        if j > 0:
            lo = max(lo, filling[(i, j - 1)])
        if i > 0:
            lo = max(lo, filling[(i - 1, j)] + 1)
        for x in range(lo, n):
            filling[(i, j)] = x
            yield from rec(k + 1)
        filling.pop((i, j), None)

    yield from rec(0)


def _flat(index, n=5) -> int:
    k = 0
    for i in index:
        k = k * n + i
    return k


@dataclass
class WeightRep:
    a: int
    b: int
    form: tuple[tuple[int, ...], ...]
    basis: np.ndarray = field(repr=False)  # (5^a) x dim, integer entries
    _pivots: list[int] | None = field(default=None, repr=False)

    @property
    def pivots(self) -> list[int]:
        """Coordinates on which the basis restricts to an invertible square block."""
        if self._pivots is None:
            self._pivots = _pivot_rows(self.basis.astype(np.int64)) if self.a else [0]
        return self._pivots

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def partition(self) -> tuple[int, int]:
        return ((self.a + self.b) // 2, (self.a - self.b) // 2)

    def gram(self) -> np.ndarray:
        """The pairing induced by the form on the tensor power, restricted to W."""
        t = _tensor_power_apply(np.asarray(self.form, dtype=object), self.basis, self.a)
        return self.basis.T.dot(t)


def _tensor_power_apply(g: np.ndarray, vecs: np.ndarray, a: int) -> np.ndarray:
    """(g x ... x g) applied to the columns of vecs (object arrays)."""
    m = vecs.shape[1]
    t = vecs.reshape((5,) * a + (m,))
    for axis in range(a):
        t = np.tensordot(g, t, axes=([1], [axis]))
        # tensordot puts the new axis first; move it back into place
        t = np.moveaxis(t, 0, axis)
    return t.reshape(5 ** a, m)


def _contractions(form, vecs: np.ndarray, a: int) -> np.ndarray:
    """All pairwise contractions with the form, stacked (int64)."""
    m = vecs.shape[1]
    t = vecs.reshape((5,) * a + (m,))
    h64 = np.array(form, dtype=np.int64)
    return np.vstack([np.tensordot(h64, t, axes=([0, 1], [p, q])).reshape(-1, m)
                      for p, q in itertools.combinations(range(a), 2)])


def build_weight(a: int, b: int, form=None) -> WeightRep:
    """Rational model of W_{a,b} relative to the symmetric form with Hessian `form`."""
    if not (isinstance(a, int) and isinstance(b, int)) or b < 0 or a < b:
        raise InvalidInput(f"need a >= b >= 0, got ({a}, {b})")
    if (a - b) % 2:
        raise InvalidInput("weight (a, b) needs a = b mod 2")
    if a > WEIGHT_CAP:
        raise Unsupported(f"weights with a > {WEIGHT_CAP} are not supported")
    if form is None:
        form = [[2 * int(i == j) for j in range(5)] for i in range(5)]
    form = tuple(tuple(int(x) for x in row) for row in form)
    target = weight_dimension(a, b)
    if a == 0:
        basis = np.ones((1, 1), dtype=object)
        return WeightRep(a, b, form, basis, [0])
    shape = tuple(x for x in ((a + b) // 2, (a - b) // 2) if x)
    gl_dim = _gl_dimension(shape)

    # Step 1: basis of the image of the symmetrizer.  Vectors are kept when
    # independent modulo a large prime, which certifies independence over Q.
    vecs = []
    for index in _semistandard(shape):
        col = np.zeros(5 ** a, dtype=np.int64)
        for k, c in _apply_symmetrizer(shape, index).items():
            col[_flat(k)] = c
        vecs.append(col)
    if len(vecs) != gl_dim or _rank_lower_bound(np.array(vecs)) != gl_dim:
        raise Inconsistency("symmetrizer images of semistandard tensors are not a basis")
    image = np.array(vecs, dtype=np.int64).T  # 5^a x gl_dim

    # Step 2: kill all contractions with the form.
    if a >= 2:
        system = _contractions(form, image, a)
        # Compress the (tall) system with a fixed pseudo-random combination of
        # rows.  The kernel can only grow, so the exact contraction check below
        # together with the dimension count certifies the result.
        rng = np.random.default_rng(0)
        k = gl_dim - target + 8
        mix = rng.integers(-3, 4, size=(k, system.shape[0]))
        coeffs = la.rational_kernel(_exact_matmul(mix, system).tolist())
        if len(coeffs) != target:
            coeffs = la.rational_kernel(system.tolist())
        coeffs = np.array([la.primitive(c) for c in coeffs], dtype=np.int64).reshape(-1, gl_dim)
        bound = int(np.abs(image).max()) * int(np.abs(coeffs).sum(axis=1).max(initial=0))
        if bound >= 2**40:
            raise Unsupported("weight basis entries too large for int64 arithmetic")
        image = _exact_matmul(image, np.ascontiguousarray(coeffs.T))
        g = np.gcd.reduce(image, axis=0)
        image = image // np.where(g == 0, 1, g)
    if image.shape[1] != target:
        raise Inconsistency(f"W_({a},{b}) came out with dimension {image.shape[1]}, expected {target}")
    if a >= 2 and image.shape[1] and np.any(_contractions(form, image, a)):
        raise Inconsistency("weight basis is not traceless")
    # rows where the basis restricts to a square matrix invertible mod a
    # prime, hence invertible over Q
    return WeightRep(a, b, form, image.astype(object))


def _det(g) -> Fraction:
    return Fraction(la.det([[Fraction(x) for x in row] for row in g]))


def weight_action(w: WeightRep, g, check: bool = True) -> list[list[Fraction]]:
    """Matrix of det(g)^a * g^{(x)a} on W in the basis of w (columns = images)."""
    gq = [[Fraction(x) for x in row] for row in g]
    if check:
        if la.congruent(w.form, gq) != [[Fraction(x) for x in row] for row in w.form]:
            raise InvalidInput("matrix does not preserve the form of the representation")
    if w.a == 0:
        return [[Fraction(1)]]
    ga = np.array(gq, dtype=object)
    img = _tensor_power_apply(ga, w.basis, w.a)
    if _det(gq) == -1 and w.a % 2:
        img = -img
    sub = la.to_fmpq(w.basis[w.pivots].tolist())
    rhs = la.to_fmpq(img[w.pivots].tolist())
    x = la.fmpq_rows(sub.solve(rhs))
    if check:
        back = w.basis.dot(np.array(x, dtype=object))
        if not (back == img).all():
            raise Inconsistency("W is not stable under the given matrix")
    return x
