"""Spaces of algebraic modular forms on a genus and their Hecke operators.

A form is a function on the classes L_1, ..., L_h with f(L_i) in the
subspace of W fixed (up to the character theta_d) by SO(L_i).  In block
coordinates the operator matrix has block (i, j) collecting the neighbours of
L_i that are isometric to L_j, so it acts on column vectors and, in trivial
weight with d = 1, its row sums are the neighbour counts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd


from . import _linalg as la
from .errors import Inconsistency, InvalidInput
from .forms import eichler_invariant, is_prime, prime_divisors, radical_generator
from .isometry import automorphism_group
from .neighbours import GenusData
from .weights import WeightRep, build_weight, weight_action

KINDS = ("T", "T1")


def _mod_inverse_entry(x, m: int) -> int:
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, m) % m


def theta_sign(g, v0_source, v0_target, q: int) -> int:
    """The unit s = +-1 with g v0_source = s v0_target on the radical at q.

    g is a proper isometry from the source lattice to the target lattice,
    given in coordinates (its denominators must be prime to 2q).  For odd q
    the sign is read modulo q; for q = 2 modulo 4.
    """
    m = 4 if q == 2 else q
    img = [sum(_mod_inverse_entry(g[r][c], m) * v0_source[c] for c in range(5)) % m
           for r in range(5)]
    tgt = [x % m for x in v0_target]
    if img == tgt:
        return 1
    if img == [(-x) % m for x in tgt]:
        return -1
    raise Inconsistency(f"isometry does not map the radical at {q} to +- its generator")


def valid_character(D: int, d: int) -> bool:
    return d >= 1 and D % d == 0 and gcd(d, D // d) == 1


def _saturated_columns(cols: list[list[Fraction]]) -> list[list[int]]:
    """Integer basis (as columns) of the saturation of the span of rational columns."""
    ints = []
    for c in cols:
        den = la.common_denominator([c])
        v = [int(x * den) for x in c]
        if any(v):
            ints.append(v)
    return la.saturate(ints) if ints else []


def character_projector(w: WeightRep, elements, embedding, signs) -> list[list[Fraction]]:
    """(1/|G|) sum_g sign(g) rho(E g E^-1) over the proper automorphisms g."""
    m = w.dim
    acc = [[Fraction(0)] * m for _ in range(m)]
    e_inv = la.inverse_fraction(embedding)
    for g, s in zip(elements, signs):
        if w.a == 0:
            acc[0][0] += s
            continue
        gam = la.matmul(la.matmul(embedding, g.tolist()), e_inv)
        r = weight_action(w, gam, check=False)
        for i in range(m):
            for j in range(m):
                if r[i][j]:
                    acc[i][j] += s * r[i][j]
    n = len(elements)
    return [[x / n for x in row] for row in acc]


def character_subspace(w: WeightRep, elements, embedding, signs) -> list[list[int]]:
    """Saturated integer basis (columns, in W-coordinates) of the theta-isotypic part."""
    if w.a == 0:
        return [[1]] if sum(signs) == len(signs) else []
    p = character_projector(w, elements, embedding, signs)
    cols = [list(c) for c in zip(*p)]
    return _saturated_columns(cols)


def transported_radicals(genus: GenusData, q: int) -> list[tuple[int, ...]]:
    """Radical generators at q for every class, compatible with the seed's.

    Class generators normalized one class at a time differ by arbitrary units
    mod q, which would make neighbour signs meaningless.  The embeddings only
    have denominators at the traversal prime, so the seed generator can be
    pulled back to each class; the result is a unit multiple of that class's
    own generator, and the unit is absorbed here.
    """
    m = 4 if q == 2 else q
    base = radical_generator(genus.seed, q)
    out = []
    for form, emb in zip(genus.classes, genus.embeddings):
        own = radical_generator(form, q)
        pulled = [_mod_inverse_entry(x, m) for x in la.matvec(la.inverse_fraction(emb), base)]
        unit = next((u for u in range(1, m) if gcd(u, m) == 1
                     and all((u * a - b) % m == 0 for a, b in zip(own, pulled))), None)
        if unit is None:
            raise Inconsistency(f"pulled-back radical at {q} is not a multiple of the class generator")
        if q == 2:
            out.append(tuple(unit * x % 4 for x in own))
        else:
            # keep the mod-2 part of the class generator, rescale the mod-q part
            u = la.crt_pair(unit, q, 1, 2)
            out.append(tuple(u * x % (2 * q) for x in own))
    return out


def _d_minus_of(genus: GenusData) -> int:
    out = 1
    for q in prime_divisors(genus.seed.D):
        if eichler_invariant(genus.seed, q) == -1:
            out *= q
    return out


@dataclass
class OMFSpace:
    genus: GenusData
    weight: WeightRep
    d: int
    blocks: list[list[list[int]]]  # per class: columns of a basis, in W-coordinates
    radicals: list[dict[int, tuple[int, ...]]]
    offsets: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.offsets = []
        k = 0
        for b in self.blocks:
            self.offsets.append(k)
            k += len(b)
        self._pivots: dict[int, list[int]] = {}

    @property
    def dim(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def D(self) -> int:
        return self.genus.seed.D

    @property
    def d_minus(self) -> int:
        return _d_minus_of(self.genus)

    @property
    def d_plus(self) -> int:
        return self.D // self.d_minus

    def descriptor(self) -> dict:
        return {"D_minus": self.d_minus, "D_plus": self.d_plus, "a": self.weight.a,
                "b": self.weight.b, "d": self.d, "genus": self.genus.cache_key()}

    def class_dims(self) -> list[int]:
        return [len(b) for b in self.blocks]

    def sign(self, g, i: int, j: int) -> int:
        """Product over q | d of theta signs of g : L_j -> L_i (g in L_i-coordinates)."""
        s = 1
        for q in prime_divisors(self.d):
            s *= theta_sign(g, self.radicals[j][q], self.radicals[i][q], q)
        return s

    def block_coordinates(self, i: int, vecs: list[list[Fraction]]) -> list[list[Fraction]]:
        """Solve C_i X = vecs (columns in W-coordinates) exactly."""
        cols = self.blocks[i]
        k = len(cols)
        if i not in self._pivots:
            rows = [list(r) for r in zip(*cols)]
            self._pivots[i] = la.pivot_columns_mod(la.transpose(rows), (1 << 31) - 1)
        piv = self._pivots[i]
        sub = [[Fraction(cols[c][r]) for c in range(k)] for r in piv]
        rhs = [[Fraction(v[r]) for v in vecs] for r in piv]
        x = la.fmpq_rows(la.to_fmpq(sub).solve(la.to_fmpq(rhs)))
        m = self.weight.dim
        for r in range(m):
            for t, v in enumerate(vecs):
                if sum(cols[c][r] * x[c][t] for c in range(k)) != v[r]:
                    raise Inconsistency("Hecke image left the invariant subspace")
        return x


def build_space(genus: GenusData, a: int = 0, b: int = 0, d: int = 1) -> OMFSpace:
    D = genus.seed.D
    if not valid_character(D, d):
        raise InvalidInput(f"d={d} must be a divisor of D={D} coprime to D/d")
    w = build_weight(a, b, genus.seed.hessian)
    blocks, radicals = [], []
    primes = prime_divisors(d)
    pulled = {q: transported_radicals(genus, q) for q in primes}
    for i, form in enumerate(genus.classes):
        rad = {q: pulled[q][i] for q in primes}
        radicals.append(rad)
        elems = automorphism_group(form).proper_elements
        signs = []
        for g in elems:
            s = 1
            for q in primes:
                s *= theta_sign(g.tolist(), rad[q], rad[q], q)
            signs.append(s)
        blocks.append(character_subspace(w, elems, genus.embeddings[i], signs))
    return OMFSpace(genus, w, d, blocks, radicals)


@dataclass
class HeckeOperator:
    p: int
    kind: str
    descriptor: dict
    matrix: list[list[Fraction]]

    @property
    def scale(self) -> int:
        return la.common_denominator(self.matrix)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def integral(self) -> list[list[int]]:
        """scale * matrix, an integer matrix."""
        s = self.scale
        return [[int(x * s) for x in row] for row in self.matrix]

    def is_integral(self) -> bool:
        return self.scale == 1

    def to_json(self) -> dict:
        return {"descriptor": self.descriptor, "scale": self.scale,
                "matrix": self.integral()}

    @classmethod
    def from_json(cls, doc: dict) -> "HeckeOperator":
        s = doc["scale"]
        desc = doc["descriptor"]
        mat = [[Fraction(x, s) for x in row] for row in doc["matrix"]]
        return cls(desc["p"], desc["kind"], desc, mat)

    def content_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def hecke_matrix(space: OMFSpace, p: int, kind: str = "T") -> HeckeOperator:
    if kind not in KINDS:
        raise InvalidInput(f"operator kind must be one of {KINDS}")
    if not is_prime(p) or space.D % p == 0:
        raise InvalidInput(f"p={p} must be a prime not dividing D={space.D}")
    genus, w = space.genus, space.weight
    n = space.dim
    mat = [[Fraction(0)] * n for _ in range(n)]
    inverses = [la.inverse_fraction(e) for e in genus.embeddings]
    for i in range(len(genus)):
        ki = len(space.blocks[i])
        if ki == 0:
            continue
        # S[j] accumulates sign * rho(Gamma) C_j, columns in W-coordinates
        acc: dict[int, list[list[Fraction]]] = {}
        for edge in genus.neighbour_edges(i, p, kind):
            j = edge.target
            cj = space.blocks[j]
            if not cj:
                continue
            s = space.sign(edge.matrix, i, j)
            if w.a == 0:
                img = [[Fraction(s * cj[0][0])]]
            else:
                gam = la.matmul(la.matmul(genus.embeddings[i], edge.matrix), inverses[j])
                r = weight_action(w, gam)
                img = [[s * sum(r[row][c] * col[c] for c in range(w.dim)) for row in range(w.dim)]
                       for col in cj]
            if j in acc:
                acc[j] = [[x + y for x, y in zip(u, v)] for u, v in zip(acc[j], img)]
            else:
                acc[j] = img
        oi = space.offsets[i]
        for j, cols in acc.items():
            x = space.block_coordinates(i, cols)
            oj = space.offsets[j]
            for r in range(ki):
                for c in range(len(cols)):
                    mat[oi + r][oj + c] += x[r][c]
    # classical normalization: T(p) carries p^((a+b)/2), T1(p^2) its square
    norm = p ** ((w.a + w.b) // 2 * (1 if kind == "T" else 2))
    if norm != 1:
        mat = [[x * norm for x in row] for row in mat]
    desc = dict(space.descriptor(), p=p, kind=kind)
    return HeckeOperator(p, kind, desc, mat)
