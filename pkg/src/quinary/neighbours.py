"""Kneser p-neighbours, (p,p)-neighbours and genus enumeration."""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _linalg as la
from .errors import Inconsistency, InvalidInput
from .forms import INFINITY, QuinaryForm, eichler_invariant, hasse_witt, is_prime, prime_divisors
from .isometry import IsometryGroup, automorphism_group, isometry_map, theta_series

log = logging.getLogger(__name__)

THETA_PREC = 6


def _check_prime(q: QuinaryForm, p: int) -> None:
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if q.D % p == 0:
        raise InvalidInput(f"p={p} divides D={q.D}; neighbours need p coprime to D")


def _projective_points(p: int) -> np.ndarray:
    pts = []
    for k in range(5):
        for tail in itertools.product(range(p), repeat=4 - k):
            pts.append((0,) * k + (1,) + tail)
    return np.array(pts, dtype=np.int64)


def isotropic_lines(q: QuinaryForm, p: int) -> list[tuple[int, ...]]:
    """Normalized representatives (first nonzero entry 1) of the lines with Q(v) = 0 mod p."""
    _check_prime(q, p)
    pts = _projective_points(p)
    h = np.array(q.hessian, dtype=np.int64)
    vals = np.einsum("ij,jk,ik->i", pts, h, pts) // 2
    return [tuple(int(x) for x in v) for v in pts[vals % p == 0]]


def _lift_line(q: QuinaryForm, p: int, v) -> list[int]:
    v = [int(x) % p for x in v]
    if q.value(v) % p:
        raise InvalidInput("line is not isotropic")
    hv = la.matvec(q.hessian, v)
    k = next((i for i in range(5) if hv[i] % p), None)
    if k is None:
        raise Inconsistency("isotropic vector lies in the radical mod p")
    c = (-(q.value(v) // p) * pow(hv[k], -1, p)) % p
    v[k] += p * c
    assert q.value(v) % (p * p) == 0
    return v


def _neighbour_basis(gens_scaled, p: int) -> list[list[Fraction]]:
    """Columns = basis of the lattice generated by the rows of gens_scaled / p."""
    rows = la.hnf_rows(gens_scaled)
    if len(rows) != 5:
        raise Inconsistency("neighbour lattice has wrong rank")
    return [[Fraction(rows[j][i], p) for j in range(5)] for i in range(5)]


def _finish(q: QuinaryForm, basis) -> tuple[QuinaryForm, list[list[Fraction]]]:
    h = la.congruent(q.matrix, basis)
    if any(Fraction(x).denominator != 1 for row in h for x in row):
        raise Inconsistency("neighbour lattice is not integral")
    nq = QuinaryForm([[int(x) for x in row] for row in h])
    if nq.det != q.det:
        raise Inconsistency("neighbour changed the determinant")
    red, r = nq.reduced()
    return red, la.matmul(basis, r)


def p_neighbour_with_basis(q: QuinaryForm, p: int, line) -> tuple[QuinaryForm, list[list[Fraction]]]:
    """The p-neighbour attached to line and its basis (columns) in the coordinates of q."""
    _check_prime(q, p)
    v = _lift_line(q, p, line)
    hv = la.matvec(q.hessian, v)
    k = next(i for i in range(5) if hv[i] % p)
    inv = pow(hv[k], -1, p)
    gens = [list(v)]
    for i in range(5):
        w = [0] * 5
        if i == k:
            w[k] = p
        else:
            w[i] = 1
            w[k] = -(hv[i] * inv) % p
        gens.append([p * x for x in w])
    return _finish(q, _neighbour_basis(gens, p))


def p_neighbour(q: QuinaryForm, p: int, line) -> QuinaryForm:
    return p_neighbour_with_basis(q, p, line)[0]


def isotropic_planes(q: QuinaryForm, p: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Totally isotropic planes mod p, each as its reduced echelon basis."""
    lines = isotropic_lines(q, p)
    seen = set()
    out = []
    for a, b in itertools.combinations(lines, 2):
        if q.pair(a, b) % p:
            continue
        plane = tuple(tuple(r) for r in la.rref_mod([a, b], p))
        if plane in seen:
            continue
        seen.add(plane)
        out.append(plane)
    return out


def _lift_plane(q: QuinaryForm, p: int, x, y) -> tuple[list[int], list[int]]:
    x = [int(t) % p for t in x]
    y = [int(t) % p for t in y]
    hx, hy = la.matvec(q.hessian, x), la.matvec(q.hessian, y)
    # unknowns (a, b): x <- x + p a, y <- y + p b
    rows = [hx + [0] * 5, [0] * 5 + hy, hy + hx]
    rhs = [-(q.value(x) // p), -(q.value(y) // p), -(q.pair(x, y) // p)]
    sol = la.solve_mod(rows, rhs, p)
    if sol is None:
        raise Inconsistency("cannot lift isotropic plane")
    x = [x[i] + p * sol[i] for i in range(5)]
    y = [y[i] + p * sol[5 + i] for i in range(5)]
    pp = p * p
    assert q.value(x) % pp == 0 and q.value(y) % pp == 0 and q.pair(x, y) % pp == 0
    return x, y


def _plane_shifts(q: QuinaryForm, p: int, x, y) -> tuple[list[int], list[int]]:
    """(a, b) with <x,a> = 0, <y,a> = 1, <x,b> = -1, <y,b> = 0 mod p.

    Replacing (x, y) by (x + t p a, y + t p b) keeps the lift isotropic mod
    p^2 and runs through the p different neighbours attached to the plane.
    """
    hx, hy = la.matvec(q.hessian, x), la.matvec(q.hessian, y)
    a = la.solve_mod([hx, hy], [0, 1], p)
    b = la.solve_mod([hx, hy], [-1, 0], p)
    if a is None or b is None:
        raise Inconsistency("isotropic plane is degenerate mod p")
    return a, b


def pp_neighbour_with_basis(q: QuinaryForm, p: int, plane, t: int = 0) -> tuple[QuinaryForm, list[list[Fraction]]]:
    """The (p,p)-neighbour Z x/p + Z y/p + {w : <x,w> = <y,w> = 0 mod p}.

    t in range(p) selects one of the p neighbours sharing the plane mod p.
    """
    x, y = _lift_plane(q, p, *plane)
    if t % p:
        a, b = _plane_shifts(q, p, x, y)
        x = [x[i] + t * p * a[i] for i in range(5)]
        y = [y[i] + t * p * b[i] for i in range(5)]
    hx, hy = la.matvec(q.hessian, x), la.matvec(q.hessian, y)
    ker = la.kernel_mod([hx, hy], p)
    gens = [x, y] + [[p * c for c in k] for k in ker]
    gens += [[p * p * int(i == j) for j in range(5)] for i in range(5)]
    return _finish(q, _neighbour_basis(gens, p))


def pp_neighbours(q: QuinaryForm, p: int) -> list[QuinaryForm]:
    """All p(p+1)(p^2+1) (p,p)-neighbours."""
    return [f for f, _ in neighbours_with_bases(q, p, "T1")]


def neighbours_with_bases(q: QuinaryForm, p: int, kind: str = "T"):
    """All p-neighbours (kind 'T') or (p,p)-neighbours (kind 'T1') with bases."""
    _check_prime(q, p)
    if kind == "T":
        return [p_neighbour_with_basis(q, p, v) for v in isotropic_lines(q, p)]
    if kind == "T1":
        return [pp_neighbour_with_basis(q, p, pl, t)
                for pl in isotropic_planes(q, p) for t in range(p)]
    raise InvalidInput(f"unknown operator kind {kind!r}")


# --- genus -----------------------------------------------------------------

def genus_symbol(q: QuinaryForm) -> tuple:
    """Local data that every class of the genus shares."""
    primes = prime_divisors(2 * q.D)
    return (q.det, hasse_witt(q, INFINITY),
            tuple((p, hasse_witt(q, p), eichler_invariant(q, p)) for p in primes))


@dataclass
class NeighbourEdge:
    target: int
    # columns: basis of the target representative, written in source coordinates
    matrix: list[list[Fraction]]


def _edge(j: int, basis, g) -> NeighbourEdge:
    """Edge to class j; the matrix is negated if needed so that it is proper."""
    m = la.matmul(basis, g)
    if la.det(m) < 0:
        m = [[-x for x in row] for row in m]
    return NeighbourEdge(j, m)


@dataclass
class GenusData:
    seed: QuinaryForm
    classes: list[QuinaryForm]
    embeddings: list[list[list[Fraction]]]
    traversal_prime: int
    thetas: list[tuple[int, ...]] = field(default_factory=list)
    edges: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.thetas:
            self.thetas = [tuple(theta_series(c, THETA_PREC)) for c in self.classes]
        self._buckets: dict[tuple, list[int]] = {}
        for i, t in enumerate(self.thetas):
            self._buckets.setdefault(t, []).append(i)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def auts(self) -> list[IsometryGroup]:
        return [automorphism_group(c) for c in self.classes]

    def mass(self) -> Fraction:
        return sum((Fraction(1, g.order) for g in self.auts), Fraction(0))

    def identify(self, form: QuinaryForm) -> tuple[int, list[list[int]]] | None:
        """Index j and g with g^T H_form g = H_j, or None if form is a new class."""
        t = tuple(theta_series(form, THETA_PREC))
        for j in self._buckets.get(t, []):
            g = isometry_map(form, self.classes[j])
            if g is not None:
                return j, g
        return None

    def _register(self, form: QuinaryForm, embedding) -> int:
        if la.det(embedding) < 0:
            # positive embeddings make proper edge matrices proper in V too
            embedding = [[-x for x in row] for row in embedding]
        self.classes.append(form)
        self.embeddings.append(embedding)
        t = tuple(theta_series(form, THETA_PREC))
        self.thetas.append(t)
        self._buckets.setdefault(t, []).append(len(self.classes) - 1)
        return len(self.classes) - 1

    def neighbour_edges(self, i: int, p: int, kind: str = "T") -> list[NeighbourEdge]:
        """Edges from class i; every neighbour must already be a known class."""
        key = (i, p, kind)
        if key not in self.edges:
            out = []
            for form, basis in neighbours_with_bases(self.classes[i], p, kind):
                hit = self.identify(form)
                if hit is None:
                    raise Inconsistency(f"neighbour of class {i} at p={p} is outside the known classes")
                j, g = hit
                out.append(_edge(j, basis, g))
            self.edges[key] = out
        return self.edges[key]

    def verify_closed(self, p: int) -> None:
        """Raise unless every p-neighbour of every class is already known."""
        for i in range(len(self)):
            self.neighbour_edges(i, p, "T")

    # -- serialization --
    def cache_key(self) -> str:
        return seed_hash(self.seed, self.traversal_prime)

    def to_json(self) -> dict:
        return {
            "seed_hash": self.cache_key(),
            "seed": self.seed.matrix,
            "traversal_prime": self.traversal_prime,
            "classes": [c.matrix for c in self.classes],
            "aut_orders": [g.order for g in self.auts],
            "theta_prefixes": [list(t) for t in self.thetas],
            "embeddings": [[[str(x) for x in row] for row in e] for e in self.embeddings],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GenusData":
        seed = QuinaryForm(doc["seed"])
        if doc.get("seed_hash") != seed_hash(seed, doc["traversal_prime"]):
            raise Inconsistency("genus cache hash does not match its seed")
        classes = [QuinaryForm(h) for h in doc["classes"]]
        embeddings = [[[Fraction(x) for x in row] for row in e] for e in doc["embeddings"]]
        g = cls(seed, classes, embeddings, doc["traversal_prime"],
                [tuple(t) for t in doc["theta_prefixes"]])
        for c, e in zip(classes, embeddings):
            if la.congruent(seed.matrix, e) != c.matrix or la.det(e) <= 0:
                raise Inconsistency("genus cache embedding does not match class")
        return g

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "GenusData":
        return cls.from_json(json.loads(Path(path).read_text()))


GENUS_FORMAT_VERSION = 2


def seed_hash(seed: QuinaryForm, p: int) -> str:
    blob = json.dumps({"seed": seed.matrix, "p": p, "v": GENUS_FORMAT_VERSION, "theta": THETA_PREC})
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def default_prime(q: QuinaryForm) -> int:
    p = 2
    while q.D % p == 0:
        p += 1
        while not is_prime(p):
            p += 1
    return p


def enumerate_genus(seed: QuinaryForm, p: int | None = None, check_prime: int | None = None) -> GenusData:
    """Closure of the p-neighbour relation from seed, discovered breadth first.

    With check_prime set, the class list is also checked to be closed under
    check_prime-neighbours (guarding against several spinor genera).
    """
    if p is None:
        p = default_prime(seed)
    _check_prime(seed, p)
    symbol = genus_symbol(seed)
    start, r = seed.reduced()
    genus = GenusData(seed, [], [], p, [])
    genus._register(start, [[Fraction(x) for x in row] for row in r])
    queue = deque([0])
    while queue:
        i = queue.popleft()
        src = genus.classes[i]
        edges = []
        for form, basis in neighbours_with_bases(src, p, "T"):
            hit = genus.identify(form)
            if hit is None:
                if genus_symbol(form) != symbol:
                    raise Inconsistency("neighbour left the genus")
                j = genus._register(form, la.matmul(genus.embeddings[i], basis))
                queue.append(j)
                g = la.identity(5)
            else:
                j, g = hit
            edges.append(_edge(j, basis, g))
        genus.edges[(i, p, "T")] = edges
        log.info("class %d done, %d classes known", i, len(genus))
    if check_prime is not None:
        genus.verify_closed(check_prime)
    return genus
