"""Characteristic polynomials, factor checks, block kernels and mod-ell analysis.

Polynomials are lists of integer coefficients in increasing degree, so
x^2 - 1 is [-1, 0, 1].
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import flint
import numpy as np

from . import _linalg as la
from .errors import Inconsistency, InvalidInput

# Word-sized primes below 2^31, so products of residues fit in int64.
_CRT_START = (1 << 31) - 1


def _primes_below(start: int):
    n = start
    while True:
        if flint.fmpz(n).is_prime():
            yield n
        n -= 2 if n % 2 else 1


# --- polynomial helpers ----------------------------------------------------

def poly_mul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def poly_eval(f, x, mod: int | None = None):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
        if mod is not None:
            acc %= mod
    return acc


def poly_divmod(f, g):
    """Quotient and remainder for a monic divisor g (integer coefficients)."""
    if g[-1] != 1:
        raise InvalidInput("divisor must be monic")
    rem = list(f)
    q = [0] * max(len(f) - len(g) + 1, 1)
    for k in range(len(f) - len(g), -1, -1):
        c = rem[k + len(g) - 1]
        q[k] = c
        if c:
            for j, b in enumerate(g):
                rem[k + j] -= c * b
    rem = rem[:len(g) - 1] or [0]
    return q, rem


def parse_poly(text: str) -> list[int]:
    """Parse a polynomial in x such as 'x^6 - 29*x^5 + 2026' or 'x+7'."""
    s = text.replace(" ", "").replace("**", "^").replace("-", "+-")
    coeffs: dict[int, int] = {}
    for term in filter(None, s.split("+")):
        if "x" in term:
            c, _, e = term.partition("x")
            c = c.rstrip("*")
            c = 1 if c in ("", "+") else -1 if c == "-" else int(c)
            e = int(e[1:]) if e.startswith("^") else 1
        else:
            c, e = int(term), 0
        coeffs[e] = coeffs.get(e, 0) + c
    deg = max(coeffs, default=0)
    return [coeffs.get(k, 0) for k in range(deg + 1)]


def format_poly(f) -> str:
    terms = []
    for k in range(len(f) - 1, -1, -1):
        c = f[k]
        if not c:
            continue
        mono = "" if k == 0 else "x" if k == 1 else f"x^{k}"
        if k and abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}" if mono else str(abs(c))
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    first = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return first + "".join(f" {s} {b}" for s, b in terms[1:])


# --- characteristic polynomials ----------------------------------------------

@dataclass
class CharPoly:
    coefficients: list[int]  # increasing degree, monic
    provenance: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return poly_eval(self.coefficients, x)

    def __str__(self) -> str:
        return format_poly(self.coefficients)

    def to_json(self) -> dict:
        return {"coefficients": [str(c) for c in self.coefficients],
                "provenance": self.provenance}

    @classmethod
    def from_json(cls, doc: dict) -> "CharPoly":
        return cls([int(c) for c in doc["coefficients"]], doc.get("provenance", {}))


def _hessenberg_charpoly_mod(m: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial of an int64 matrix over F_p, p < 2^31."""
    h = np.mod(m, p).astype(np.int64)
    n = h.shape[0]
    for col in range(n - 2):
        piv = next((r for r in range(col + 1, n) if h[r, col]), None)
        if piv is None:
            continue
        if piv != col + 1:
            h[[piv, col + 1], :] = h[[col + 1, piv], :]
            h[:, [piv, col + 1]] = h[:, [col + 1, piv]]
        inv = pow(int(h[col + 1, col]), -1, p)
        for r in range(col + 2, n):
            u = int(h[r, col]) * inv % p
            if u:
                h[r, :] = (h[r, :] - u * h[col + 1, :]) % p
                h[:, col + 1] = (h[:, col + 1] + u * h[:, r]) % p
    # p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{i<j<=k} h_{j,j-1}) p_{i-1}
    polys = [np.zeros(n + 1, dtype=np.int64)]
    polys[0][0] = 1
    for k in range(n):
        cur = np.zeros(n + 1, dtype=np.int64)
        cur[1:] = polys[k][:-1]
        cur = (cur - int(h[k, k]) * polys[k]) % p
        t = 1
        for i in range(k - 1, -1, -1):
            t = t * int(h[i + 1, i]) % p
            if t == 0:
                break
            c = int(h[i, k]) * t % p
            if c:
                cur = (cur - c * polys[i]) % p
        polys.append(cur)
    return [int(c) for c in polys[n]]


def _coefficient_bound(m: np.ndarray) -> int:
    """Bound on |coefficients| of det(xI - m) from Hadamard's inequality."""
    n = m.shape[0]
    norms = [math.isqrt(int(sum(int(x) ** 2 for x in row))) + 1 for row in m.tolist()]
    norms.sort(reverse=True)
    # the coefficient of x^k is a sum of C(n, k) principal minors of size n-k
    best = 1
    prod = 1
    for k in range(n + 1):
        if k:
            prod *= norms[k - 1]
        best = max(best, math.comb(n, k) * prod)
    return best


def charpoly(m, provenance: dict | None = None) -> CharPoly:
    """Exact characteristic polynomial of an integer matrix, by CRT over primes."""
    arr = np.array([[int(x) for x in row] for row in m], dtype=object)
    n = arr.shape[0] if arr.size else 0
    if n == 0:
        return CharPoly([1], provenance or {})
    if arr.shape != (n, n):
        raise InvalidInput("matrix must be square")
    bound = _coefficient_bound(arr)
    big = int(np.abs(arr).max()) >= 2**62
    modulus, residues = 1, [0] * (n + 1)
    for p in _primes_below(_CRT_START):
        red = np.array(np.mod(arr, p), dtype=np.int64) if big else np.mod(arr.astype(np.int64), p)
        cp = _hessenberg_charpoly_mod(red, p)
        residues = [la.crt_pair(r, modulus, c, p) for r, c in zip(residues, cp)]
        modulus *= p
        if modulus > 2 * bound:
            break
    half = modulus // 2
    coeffs = [r - modulus if r > half else r for r in residues]
    if coeffs[-1] != 1:
        raise Inconsistency("characteristic polynomial is not monic")
    return CharPoly(coeffs, dict(provenance or {}))


def operator_charpoly(matrix, provenance: dict | None = None) -> CharPoly:
    """Characteristic polynomial of a rational matrix, which must be integral."""
    s = la.common_denominator(matrix)
    ints = [[int(Fraction(x) * s) for x in row] for row in matrix]
    cp = charpoly(ints, provenance)
    n = cp.degree
    coeffs = []
    for k, c in enumerate(cp.coefficients):
        v = Fraction(c, s ** (n - k))
        if v.denominator != 1:
            raise Inconsistency("operator has non-integral characteristic polynomial")
        coeffs.append(int(v))
    return CharPoly(coeffs, cp.provenance)


def cofactor_charpoly(m) -> list[int]:
    """det(xI - m) by Laplace expansion over polynomial entries; tiny matrices only."""
    n = len(m)
    ent = [[[-int(m[i][j])] if i != j else [-int(m[i][j]), 1] for j in range(n)] for i in range(n)]

    def det(rows, cols):
        if len(rows) == 1:
            return ent[rows[0]][cols[0]]
        out = [0]
        r = rows[0]
        for k, c in enumerate(cols):
            minor = det(rows[1:], cols[:k] + cols[k + 1:])
            term = poly_mul(ent[r][c], minor)
            sign = -1 if k % 2 else 1
            out = [a + sign * b for a, b in
                   zip(out + [0] * (len(term) - len(out)), term + [0] * (len(out) - len(term)))]
        return out

    res = det(list(range(n)), list(range(n)))
    while len(res) > 1 and res[-1] == 0:
        res.pop()
    return res


# --- factors -------------------------------------------------------------

@dataclass
class FactorCheck:
    ok: bool
    rational_roots: list[int]

    def __bool__(self) -> bool:
        return self.ok


def integer_roots(f) -> list[int]:
    """Integer roots of a monic integer polynomial (all its rational roots)."""
    f = list(f)
    roots = []
    while len(f) > 1 and f[0] == 0:
        roots.append(0)
        f = f[1:]
    if len(f) == 1:
        return sorted(set(roots))
    lead = f[-1]
    n = len(f) - 1
    # Fujiwara's bound on the size of any complex root
    bound = 2 * max(math.ceil(abs(Fraction(f[n - k], lead)) ** (1.0 / k)) for k in range(1, n + 1)) + 1
    c0 = abs(f[0])
    for r in range(1, bound + 1):
        if c0 % r:
            continue
        for x in (r, -r):
            if poly_eval(f, x) == 0:
                roots.append(x)
    return sorted(set(roots))


def verify_factor_product(f: CharPoly | list[int], factors) -> FactorCheck:
    coeffs = f.coefficients if isinstance(f, CharPoly) else list(f)
    prod = [1]
    for g in factors:
        prod = poly_mul(prod, list(g))
    while len(prod) > 1 and prod[-1] == 0:
        prod.pop()
    return FactorCheck(prod == coeffs, integer_roots(coeffs))


def squarefree(f) -> bool:
    g = flint.fmpz_poly(list(f))
    return g.gcd(g.derivative()).degree() == 0


def _mat_poly(m: flint.fmpz_mat, f) -> flint.fmpz_mat:
    n = m.nrows()
    acc = flint.fmpz_mat(n, n)
    ident = flint.fmpz_mat(n, n, [int(i == j) for i in range(n) for j in range(n)])
    for c in reversed(f):
        acc = acc * m + ident * c
    return acc


def block_split(m, f, cp: CharPoly | None = None) -> list[list[int]]:
    """Saturated Z-basis (rows) of ker f(m) for a monic factor f of the charpoly.

    When the cofactor g = charpoly / f is shorter and coprime to f, the kernel
    is computed as the column space of g(m) instead, which is cheaper.
    """
    f = list(f)
    if f[-1] != 1:
        raise InvalidInput("factor must be monic")
    cp = cp or charpoly(m)
    g, rem = poly_divmod(cp.coefficients, f)
    if any(rem):
        raise InvalidInput("factor does not divide the characteristic polynomial")
    mm = la.to_fmpz(m)
    n = mm.nrows()
    coprime = flint.fmpz_poly(f).gcd(flint.fmpz_poly(g)).degree() == 0
    if coprime and len(g) < len(f):
        img = _mat_poly(mm, g)
        cols = [[int(img[i, j]) for i in range(n)] for j in range(n)]
        basis = la.saturate(cols)
    else:
        basis = la.integer_kernel(_mat_poly(mm, f))
    if coprime and len(basis) != len(f) - 1:
        raise Inconsistency("block rank differs from the factor degree")
    return [la.primitive(v) for v in basis]


# --- modular analysis --------------------------------------------------------

def _reduce_matrix(m, ell: int) -> list[list[int]]:
    out = []
    for row in m:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator % ell == 0:
                raise InvalidInput(f"matrix has a denominator divisible by {ell}")
            r.append(x.numerator * pow(x.denominator, -1, ell) % ell)
        out.append(r)
    return out


def mod_ell_kernel(m, c: int, ell: int) -> list[list[int]]:
    """Reduced echelon basis over F_ell of ker(m - c I)."""
    red = _reduce_matrix(m, ell)
    n = len(red)
    shifted = [[(red[i][j] - (c if i == j else 0)) % ell for j in range(n)] for i in range(n)]
    return la.kernel_mod(shifted, ell)


def padic_roots(f, ell: int, prec: int, residue: int | None = None, guard: int = 4) -> list[int]:
    """Roots mod ell^prec of f that lift at least `guard` more digits.

    The search is a digit-by-digit tree, so repeated roots mod ell are
    handled; branches that stop lifting are dropped.
    """
    top = prec + guard
    level = [r for r in range(ell) if poly_eval(f, r, ell) == 0
             and (residue is None or (r - residue) % ell == 0)]
    mod = ell
    for _ in range(top - 1):
        nxt_mod = mod * ell
        nxt = []
        for r in level:
            for t in range(ell):
                x = r + t * mod
                if poly_eval(f, x, nxt_mod) == 0:
                    nxt.append(x)
        level, mod = nxt, nxt_mod
    target = ell ** prec
    return sorted({r % target for r in level})


def digits(x: int, ell: int, count: int) -> list[int]:
    """Base-ell digits of x mod ell^count, least significant first."""
    out = []
    x %= ell ** count
    for _ in range(count):
        out.append(x % ell)
        x //= ell
    return out


def adic_eigenvector(m, cp: CharPoly, root: int, ell: int, prec: int) -> list[int]:
    """Reduction mod ell of an eigenvector for a simple ell-adic root of cp.

    With cp(x) = (x - root) g(x) mod ell^prec, every g(m) u lies in the
    eigenline up to the precision lost to its ell-content, so a column with
    small content gives the reduction of the eigenvector.
    """
    mod = ell ** prec
    coeffs = [c % mod for c in cp.coefficients]
    # synthetic division by (x - root)
    n = len(coeffs) - 1
    g = [0] * n
    acc = 0
    for k in range(n, 0, -1):
        acc = (acc * root + coeffs[k]) % mod
        g[k - 1] = acc
    mm = la.to_fmpz(m)
    size = mm.nrows()
    for seed in range(size):
        u = flint.fmpz_mat(size, 1, [((seed + 1) * (i + 3) ** 2 + i) % 7 - 3 for i in range(size)])
        w = flint.fmpz_mat(size, 1)
        for c in reversed(g):
            w = mm * w + u * c
            w = flint.fmpz_mat(size, 1, [int(w[i, 0]) % mod for i in range(size)])
        vals = [int(w[i, 0]) for i in range(size)]
        v = min((_valuation_mod(x, ell, prec) for x in vals), default=prec)
        if v < prec // 2:
            red = [(x // ell ** v) % ell for x in vals]
            return _normalize_mod(red, ell)
    raise Inconsistency("could not isolate the eigenline; increase the precision")


def _valuation_mod(x: int, ell: int, prec: int) -> int:
    if x == 0:
        return prec
    v = 0
    while x % ell == 0 and v < prec:
        x //= ell
        v += 1
    return v


def _normalize_mod(v, ell: int) -> list[int]:
    """Scale so that the first nonzero entry is 1."""
    lead = next((x for x in v if x % ell), None)
    if lead is None:
        raise InvalidInput("vector reduces to zero")
    inv = pow(lead, -1, ell)
    return [x * inv % ell for x in v]


def reduce_vector(v, ell: int) -> list[int]:
    """Content-free reduction of an integer vector mod ell, first nonzero entry 1."""
    g = la.content(v)
    if g == 0:
        raise InvalidInput("zero vector")
    return _normalize_mod([int(x) // g % ell for x in v], ell)


@dataclass
class CongruenceReport:
    ell: int
    kernel_dim: int | None
    vectors: list[list[int]]
    verdict: str  # collinear | common-eigenspace-forced | independent
    eigenvalues: dict[str, list[int | None]]

    def to_json(self) -> dict:
        return {"ell": self.ell, "kernel_dim": self.kernel_dim, "verdict": self.verdict,
                "vectors": self.vectors, "eigenvalues": self.eigenvalues}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["operator", "residue", "block"])
        for name, vals in self.eigenvalues.items():
            for k, x in enumerate(vals):
                w.writerow([name, "" if x is None else x, k])
        return buf.getvalue()


def _eigenvalue_mod(m, v, ell: int) -> int | None:
    """mu with m v = mu v over F_ell, or None when v is not an eigenvector."""
    mv = [sum(a * b for a, b in zip(row, v)) % ell for row in m]
    k = next(i for i, x in enumerate(v) if x)
    mu = mv[k] * pow(v[k], -1, ell) % ell
    return mu if all((a - mu * b) % ell == 0 for a, b in zip(mv, v)) else None


def congruence_report(vectors, ell: int, operators: dict[str, list[list]] | None = None,
                      reduced: bool = False) -> CongruenceReport:
    """Compare eigenvector reductions mod ell.

    vectors are integer vectors (content is removed first) or, with
    reduced=True, vectors over F_ell.  operators maps a label to a matrix.
    """
    operators = operators or {}
    if not vectors:
        raise InvalidInput("no vectors supplied")
    if len({len(v) for v in vectors}) != 1:
        raise InvalidInput("vectors have different lengths")
    red = [_normalize_mod([x % ell for x in v], ell) if reduced else reduce_vector(v, ell)
           for v in vectors]
    mats = {name: _reduce_matrix(m, ell) for name, m in operators.items()}
    eig = {name: [_eigenvalue_mod(m, v, ell) for v in red] for name, m in mats.items()}
    distinct = {tuple(v) for v in red}
    rank = la.rank_mod(red, ell)
    kernel_dim = None
    all_eigen = all(x is not None for vals in eig.values() for x in vals)
    if all_eigen and mats:
        rows = []
        for name, m in mats.items():
            mu = eig[name][0]
            n = len(m)
            rows += [[(m[i][j] - (mu if i == j else 0)) % ell for j in range(n)] for i in range(n)]
        kernel_dim = len(red[0]) - la.rank_mod(rows, ell)
    uniform = all(len(set(vals)) == 1 for vals in eig.values())
    if len(distinct) == 1:
        verdict = "collinear"
    elif all_eigen and uniform and mats and rank < len(red):
        verdict = "common-eigenspace-forced"
    else:
        verdict = "independent"
    return CongruenceReport(ell, kernel_dim, red, verdict, eig)


def report_json(report: CongruenceReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=1)
