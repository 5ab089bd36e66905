"""Integral quinary quadratic forms and their local invariants.

Forms are stored by their Hessian H = (<e_i, e_j>), so Q(v) = v^T H v / 2 and
integrality means an even diagonal.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence, Union

import flint

from . import _linalg as la
from .errors import InvalidInput, Inconsistency, NoGenus, NotFound
from .reduce import lll_gram

INFINITY = "infinity"
Place = Union[int, str]


def factorint(n: int) -> dict[int, int]:
    n = abs(int(n))
    if n == 0:
        raise InvalidInput("cannot factor 0")
    return {int(p): int(e) for p, e in flint.fmpz(n).factor()}


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n)) if abs(n) > 1 else []


def is_prime(p) -> bool:
    return isinstance(p, int) and p > 1 and flint.fmpz(p).is_prime()


def valuation(x, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise InvalidInput("valuation of 0")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# --- Hilbert symbols -------------------------------------------------------

def _squarefree_integer(x: Fraction) -> int:
    # a/b and a*b differ by the square b^2.
    return x.numerator * x.denominator


def hilbert_symbol(a, b, p: Place) -> int:
    """Quadratic Hilbert symbol (a, b)_p for nonzero rationals a, b."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise InvalidInput("Hilbert symbol of zero")
    if p == INFINITY or p == "inf" or p == -1:
        return -1 if (a < 0 and b < 0) else 1
    if not is_prime(p):
        raise InvalidInput(f"not a place: {p!r}")
    a, b = _squarefree_integer(a), _squarefree_integer(b)
    alpha, beta = valuation(a, p), valuation(b, p)
    u, v = a // p**alpha, b // p**beta
    if p != 2:
        sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
        return sign * legendre(u, p) ** beta * legendre(v, p) ** alpha

    def eps(x):
        return ((x - 1) // 2) % 2

    def omega(x):
        return ((x * x - 1) // 8) % 2

    e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if e % 2 else 1


# --- the form type ---------------------------------------------------------

def _as_matrix(h) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in h)
    if len(rows) != 5 or any(len(r) != 5 for r in rows):
        raise InvalidInput("Hessian must be 5x5")
    return rows


@dataclass(frozen=True)
class QuinaryForm:
    hessian: tuple[tuple[int, ...], ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        h = _as_matrix(self.hessian)
        object.__setattr__(self, "hessian", h)
        for i in range(5):
            for j in range(5):
                if h[i][j] != h[j][i]:
                    raise InvalidInput("Hessian is not symmetric")
            if h[i][i] % 2:
                raise InvalidInput("Hessian diagonal must be even (integral form)")
        for k in range(1, 6):
            if la.det([row[:k] for row in h[:k]]) <= 0:
                raise InvalidInput("form is not positive definite")

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[int]) -> "QuinaryForm":
        """Build from the 15 upper-triangular coefficients a11, a12, ..., a55 of Q."""
        if len(coeffs) != 15:
            raise InvalidInput("expected 15 coefficients")
        h = [[0] * 5 for _ in range(5)]
        it = iter(coeffs)
        for i in range(5):
            for j in range(i, 5):
                c = int(next(it))
                if i == j:
                    h[i][i] = 2 * c
                else:
                    h[i][j] = h[j][i] = c
        return cls(h)

    def coefficients(self) -> list[int]:
        h = self.hessian
        return [h[i][i] // 2 if i == j else h[i][j] for i in range(5) for j in range(i, 5)]

    @property
    def matrix(self) -> list[list[int]]:
        return [list(r) for r in self.hessian]

    @cached_property
    def det(self) -> int:
        return int(la.det(self.hessian))

    @property
    def D(self) -> int:
        return self.det // 2

    def value(self, v: Sequence[int]) -> Fraction | int:
        s = sum(v[i] * self.hessian[i][j] * v[j] for i in range(5) for j in range(5))
        return s // 2 if all(isinstance(x, int) for x in v) else Fraction(s, 2)

    def pair(self, v, w):
        return sum(v[i] * self.hessian[i][j] * w[j] for i in range(5) for j in range(5))

    def transform(self, g) -> "QuinaryForm":
        """The form g^T H g (the lattice spanned by the columns of g)."""
        return QuinaryForm(la.congruent(self.matrix, g))

    def reduced(self) -> tuple["QuinaryForm", list[list[int]]]:
        h, r = lll_gram(self.matrix)
        return QuinaryForm(h), r

    def to_json(self) -> dict:
        return {"dim": 5, "hessian": self.matrix}

    @classmethod
    def from_json(cls, doc) -> "QuinaryForm":
        if isinstance(doc, list):
            return cls.from_coefficients(doc)
        if not isinstance(doc, dict) or "hessian" not in doc:
            raise InvalidInput("lattice document needs a 'hessian' entry")
        if doc.get("dim", 5) != 5:
            raise InvalidInput("only rank 5 is supported")
        return cls(doc["hessian"])

    @classmethod
    def load(cls, path) -> "QuinaryForm":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"cannot read lattice file {path}: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n")


def sum_of_squares() -> QuinaryForm:
    return QuinaryForm([[2 * int(i == j) for j in range(5)] for i in range(5)])


Q61 = QuinaryForm.from_coefficients([1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 8])


# --- invariants ------------------------------------------------------------

def signed_determinant(q: QuinaryForm) -> int:
    # (-1)^floor(5/2) = 1 in rank 5
    return q.det


def rational_diagonal(h) -> list[Fraction]:
    """Diagonal entries of a rational diagonalization of the symmetric matrix h."""
    a = [[Fraction(x) for x in row] for row in h]
    n = len(a)
    out = []
    for k in range(n):
        if a[k][k] == 0:
            piv = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if piv is not None:
                _swap(a, k, piv)
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    raise InvalidInput("degenerate form")
                # e_k <- e_k + e_j gives diagonal 2 a_kj != 0
                _add(a, k, j, Fraction(1))
        d = a[k][k]
        out.append(d)
        for i in range(k + 1, n):
            if a[i][k] != 0:
                _add(a, i, k, -a[i][k] / d)
    return out


def _swap(a, i, j):
    a[i], a[j] = a[j], a[i]
    for row in a:
        row[i], row[j] = row[j], row[i]


def _add(a, i, j, c):
    """Basis change e_i <- e_i + c e_j applied to the Gram matrix a."""
    n = len(a)
    for k in range(n):
        a[i][k] += c * a[j][k]
    for k in range(n):
        a[k][i] += c * a[k][j]


def hasse_witt(q: QuinaryForm, p: Place) -> int:
    values = [d / 2 for d in rational_diagonal(q.hessian)]
    s = hilbert_symbol(-1, -1, p)
    for i in range(5):
        for j in range(i + 1, 5):
            s *= hilbert_symbol(values[i], values[j], p)
    return s


def discriminant_group(q: QuinaryForm) -> list[int]:
    snf = la.to_fmpz(q.hessian).snf()
    return [abs(int(snf[i, i])) for i in range(5)]


def is_special(q: QuinaryForm) -> bool:
    return sum(1 for d in discriminant_group(q) if d > 1) <= 1


def is_special_at(q: QuinaryForm, p: int) -> bool:
    return sum(1 for d in discriminant_group(q) if d % p == 0) <= 1


def _padic_diagonal(h, p: int) -> list[Fraction]:
    """Diagonal of a Z_(p)-integral diagonalization (p odd), by minimal valuation."""
    a = [[Fraction(x) for x in row] for row in h]
    n = len(a)
    out = []
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(i, n):
                if a[i][j] != 0:
                    v = valuation(a[i][j], p)
                    key = (v, i != j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            raise InvalidInput("degenerate form")
        (_, off), i, j = best
        if off:
            # diagonal entries are strictly deeper: e_i + e_j has valuation v
            _add(a, i, j, Fraction(1))
        _swap(a, k, i)
        d = a[k][k]
        out.append(d)
        for r in range(k + 1, n):
            if a[r][k] != 0:
                _add(a, r, k, -a[r][k] / d)
    return out


def _dyadic_unimodular_det(h) -> Fraction:
    """det of the rank-4 even unimodular part of a special lattice over Z_2."""
    a = [[Fraction(x) for x in row] for row in h]
    n = len(a)
    dets = []
    k = 0
    for _ in range(2):
        pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n)
                     if a[i][j] != 0 and valuation(a[i][j], 2) == 0), None)
        if pair is None:
            raise Inconsistency("no even unimodular binary block at 2")
        i, j = pair
        _swap(a, k, i)
        _swap(a, k + 1, j)
        b = [[a[k][k], a[k][k + 1]], [a[k + 1][k], a[k + 1][k + 1]]]
        db = b[0][0] * b[1][1] - b[0][1] * b[1][0]
        if valuation(db, 2) != 0 or valuation(b[0][0], 2) < 1 or valuation(b[1][1], 2) < 1:
            raise Inconsistency("binary block at 2 is not even unimodular")
        binv = [[b[1][1] / db, -b[0][1] / db], [-b[1][0] / db, b[0][0] / db]]
        for r in range(k + 2, n):
            # project e_r onto the orthogonal complement of the block
            c0 = binv[0][0] * a[r][k] + binv[0][1] * a[r][k + 1]
            c1 = binv[1][0] * a[r][k] + binv[1][1] * a[r][k + 1]
            _add(a, r, k, -c0)
            _add(a, r, k + 1, -c1)
        dets.append(db)
        k += 2
    return dets[0] * dets[1]


def eichler_invariant(q: QuinaryForm, p: int) -> int:
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if not is_special_at(q, p):
        raise InvalidInput(f"form is not special at {p}")
    n = q.D
    if n % p:
        return 1
    if p == 2:
        det_a = _dyadic_unimodular_det(q.hessian)
        if (det_a.numerator * det_a.denominator) % 4 != 1:
            raise Inconsistency("unimodular part at 2 has det not 1 mod 4")
    else:
        diag = sorted(_padic_diagonal(q.hessian, p), key=lambda x: valuation(x, p))
        if any(valuation(x, p) != 0 for x in diag[:4]):
            raise Inconsistency(f"unimodular part at {p} has rank < 4")
        det_a = diag[0] * diag[1] * diag[2] * diag[3]
    return hilbert_symbol(p, det_a, p)


def local_invariants(q: QuinaryForm, p: int) -> dict:
    special = is_special_at(q, p)
    out = {"p": p, "hasse_witt": hasse_witt(q, p), "is_special_at_p": special,
           "radical_rank": 1 if q.D % p == 0 else 0}
    out["eichler"] = eichler_invariant(q, p) if special else None
    return out


# --- radicals --------------------------------------------------------------

def radical_solutions(q: QuinaryForm, p: int) -> list[tuple[int, ...]]:
    """All v in (Z/2p)^5 with H v = 0 mod 2p."""
    h = q.hessian
    if p == 2:
        return [v for v in itertools.product(range(4), repeat=5)
                if all(sum(h[i][j] * v[j] for j in range(5)) % 4 == 0 for i in range(5))]
    k2 = la.kernel_mod(h, 2)
    kp = la.kernel_mod(h, p)
    sols = set()
    for c2 in itertools.product(range(2), repeat=len(k2)):
        x2 = [sum(c * b[i] for c, b in zip(c2, k2)) % 2 for i in range(5)]
        for cp in itertools.product(range(p), repeat=len(kp)):
            xp = [sum(c * b[i] for c, b in zip(cp, kp)) % p for i in range(5)]
            sols.add(tuple(la.crt_pair(x2[i], 2, xp[i], p) for i in range(5)))
    return sorted(sols)


def radical_generator(q: QuinaryForm, p: int) -> tuple[int, ...]:
    """Normalized generator of the radical of L/2pL for a prime p | D.

    Among the generators (all unit multiples of each other) the
    lexicographically smallest in [0, 2p)^5 is returned.
    """
    if not is_prime(p) or q.D % p:
        raise InvalidInput(f"{p} does not divide D={q.D}")
    m = 2 * p
    sols = radical_solutions(q, p)
    if len(sols) != m:
        raise Inconsistency(f"radical at {p} has {len(sols)} elements, expected rank 1")
    gens = [v for v in sols if any(x % 2 for x in v) and any(x % p for x in v)] if p != 2 \
        else [v for v in sols if any(x % 2 for x in v)]
    if not gens:
        raise Inconsistency("radical is not cyclic")
    return min(gens)


# --- genus descriptors and seeds -------------------------------------------

@dataclass(frozen=True)
class GenusDescriptor:
    d_minus: int
    d_plus: int = 1

    def __post_init__(self):
        if self.d_minus < 1 or self.d_plus < 1:
            raise InvalidInput("D- and D+ must be positive")
        from math import gcd
        if gcd(self.d_minus, self.d_plus) != 1:
            raise InvalidInput("D- and D+ must be coprime")
        f = factorint(self.d_minus) if self.d_minus > 1 else {}
        if any(e > 1 for e in f.values()):
            raise InvalidInput("D- must be squarefree")

    @property
    def D(self) -> int:
        return self.d_minus * self.d_plus

    @property
    def ramified(self) -> list[int]:
        return prime_divisors(self.d_minus)

    def check_parity(self) -> None:
        if len(self.ramified) % 2 == 0:
            raise NoGenus(f"D-={self.d_minus} has an even number of prime factors; "
                          "no positive-definite genus exists")

    def matches(self, q: QuinaryForm) -> bool:
        """True iff q is special with det 2D and the prescribed local invariants."""
        if q.det != 2 * self.D or not is_special(q):
            return False
        if hasse_witt(q, INFINITY) != -1:
            return False
        for p in self.ramified:
            if eichler_invariant(q, p) != -1:
                return False
        for p in prime_divisors(self.d_plus):
            if eichler_invariant(q, p) != 1:
                return False
        return True


def _leading_blocks(bound: int) -> Iterator[tuple[list[list[int]], int]]:
    """Reduced 4x4 leading Hessian blocks, by increasing largest diagonal coefficient."""
    offs = sorted(range(-bound, bound + 1), key=lambda x: (abs(x), x < 0))
    for a4 in range(1, bound + 1):
        for a1 in range(1, a4 + 1):
            for a2 in range(a1, a4 + 1):
                for a3 in range(a2, a4 + 1):
                    diag = (a1, a2, a3, a4)
                    ranges = [[x for x in offs if abs(x) <= diag[i]]
                              for i, j in ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3))]
                    for b12, b13, b23, b14, b24, b34 in itertools.product(*ranges):
                        h = [[2 * a1, b12, b13, b14],
                             [b12, 2 * a2, b23, b24],
                             [b13, b23, 2 * a3, b34],
                             [b14, b24, b34, 2 * a4]]
                        if la.det([r[:2] for r in h[:2]]) <= 0 or la.det([r[:3] for r in h[:3]]) <= 0:
                            continue
                        d4 = la.det(h)
                        if d4 <= 0:
                            continue
                        yield h, d4


def _adjugate(h):
    n = len(h)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(h) if k != i]
            out[j][i] = (-1) ** (i + j) * la.det(minor)
    return out


def seed_search(desc: GenusDescriptor, coeff_bound: int = 16) -> QuinaryForm:
    """First form (in a fixed enumeration order) in the genus described by desc.

    Leading 4x4 blocks are enumerated with reduced-looking coefficients; the
    last diagonal entry is solved from det = 2D.  The hit is LLL-reduced.
    """
    desc.check_parity()
    if coeff_bound < 1:
        raise InvalidInput("coefficient bound must be positive")
    target = 2 * desc.D
    offs = sorted(range(-coeff_bound, coeff_bound + 1), key=lambda x: (abs(x), x < 0))
    for h4, d4 in _leading_blocks(coeff_bound):
        adj = _adjugate(h4)
        a4 = h4[3][3] // 2
        cols = [[x for x in offs if abs(x) <= h4[i][i] // 2] for i in range(4)]
        for col in itertools.product(*cols):
            quad = sum(col[i] * adj[i][j] * col[j] for i in range(4) for j in range(4))
            num = target + quad
            if num % d4:
                continue
            h55 = num // d4
            if h55 % 2 or h55 // 2 < a4 or h55 // 2 > coeff_bound:
                continue
            h = [row + [col[i]] for i, row in enumerate(h4)] + [list(col) + [h55]]
            q = QuinaryForm(h)
            if desc.matches(q):
                return q.reduced()[0]
    raise NotFound(f"no form with D-={desc.d_minus}, D+={desc.d_plus} within bound {coeff_bound}")
