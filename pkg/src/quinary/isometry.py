"""Short vectors, theta series, automorphism groups and isometry testing.

Isometries are returned as integer matrices g with g^T H1 g = H2: the
columns of g are the images of the basis of L2 written in L1-coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from .forms import QuinaryForm


def _ldl(h) -> tuple[np.ndarray, np.ndarray]:
    """Q(x) = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2 for Q = x^T h x / 2."""
    a = np.array(h, dtype=float) / 2.0
    n = a.shape[0]
    d = np.zeros(n)
    u = np.zeros((n, n))
    for i in range(n):
        d[i] = a[i, i] - sum(d[k] * u[k, i] ** 2 for k in range(i))
        for j in range(i + 1, n):
            u[i, j] = (a[i, j] - sum(d[k] * u[k, i] * u[k, j] for k in range(i))) / d[i]
    return d, u


def _enumerate(h, bound: int):
    """All nonzero integer vectors with Q(v) <= bound, one of each pair +-v."""
    d, u = _ldl(h)
    n = len(d)
    x = [0] * n
    out = []
    eps = 1e-6

    def rec(i, remaining):
        c = -sum(u[i, j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / d[i]) + eps
        lo, hi = math.ceil(c - r), math.floor(c + r)
        for t in range(lo, hi + 1):
            x[i] = t
            rem = remaining - d[i] * (t - c) ** 2
            if rem < -eps:
                continue
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, rem)
        x[i] = 0

    rec(n - 1, bound + eps)
    hm = np.array(h, dtype=np.int64)
    vecs = []
    for v in out:
        if not any(v):
            continue
        # keep the representative whose last nonzero coordinate is positive
        last = next(t for t in reversed(v) if t)
        if last < 0:
            continue
        vecs.append(v)
    if not vecs:
        return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.array(vecs, dtype=np.int64)
    norms = np.einsum("ij,jk,ik->i", arr, hm, arr) // 2
    keep = norms <= bound
    arr, norms = arr[keep], norms[keep]
    order = np.lexsort(arr.T[::-1].tolist() + [norms]) if len(arr) else []
    return arr[order], norms[order]


def _short_cached(q: QuinaryForm, bound: int):
    key = ("short", )
    have = q._cache.get(key)
    if have is None or have[0] < bound:
        arr, norms = _enumerate(q.hessian, bound)
        have = (bound, arr, norms)
        q._cache[key] = have
    _, arr, norms = have
    sel = norms <= bound
    return arr[sel], norms[sel]


def short_vectors(q: QuinaryForm, bound: int) -> list[tuple[tuple[int, ...], int]]:
    """All v != 0 with Q(v) <= bound, one of each pair +-v, sorted by value."""
    arr, norms = _short_cached(q, bound)
    return [(tuple(int(x) for x in v), int(n)) for v, n in zip(arr, norms)]


def theta_series(q: QuinaryForm, prec: int) -> list[int]:
    """Representation numbers r(0), ..., r(prec)."""
    _, norms = _short_cached(q, prec)
    r = [0] * (prec + 1)
    r[0] = 1
    for n in norms.tolist():
        r[n] += 2
    return r


@dataclass
class IsometryGroup:
    elements: list[np.ndarray] = field(repr=False)
    order: int = 0

    def __post_init__(self):
        self.order = len(self.elements)

    @property
    def proper_elements(self) -> list[np.ndarray]:
        return [g for g in self.elements if round(np.linalg.det(g)) == 1]

    @property
    def proper_subgroup_order(self) -> int:
        return self.order // 2

    @property
    def generators(self) -> list[np.ndarray]:
        """A small generating set, chosen greedily in element order."""
        gens: list[np.ndarray] = []
        span = {_key(np.eye(5, dtype=np.int64))}
        for g in self.elements:
            if _key(g) in span:
                continue
            gens.append(g)
            span = _closure(gens)
            if len(span) == self.order:
                break
        return gens


def _key(g) -> bytes:
    return np.asarray(g, dtype=np.int64).tobytes()


def _closure(gens) -> set[bytes]:
    ident = np.eye(5, dtype=np.int64)
    seen = {_key(ident)}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x @ g
                k = _key(y)
                if k not in seen:
                    seen.add(k)
                    nxt.append(y)
        frontier = nxt
    return seen


def _search(q1: QuinaryForm, h2, find_all: bool):
    """Backtracking search for g with g^T H1 g = h2."""
    h1a = np.array(q1.hessian, dtype=np.int64)
    h2a = np.array(h2, dtype=np.int64)
    n = 5
    norms2 = [int(h2a[i, i]) // 2 for i in range(n)]
    arr, norms = _short_cached(q1, max(norms2))
    full = np.concatenate([arr, -arr]) if len(arr) else arr
    fnorm = np.concatenate([norms, norms]) if len(arr) else norms
    cands = {}
    for m in set(norms2):
        c = full[fnorm == m]
        cands[m] = (c, c @ h1a)
    if any(len(cands[m][0]) == 0 for m in norms2):
        return []
    # most constrained basis vector first
    order = sorted(range(n), key=lambda i: (len(cands[norms2[i]][0]), i))
    images = [None] * n
    results = []

    def rec(depth):
        if depth == n:
            g = np.array([images[i] for i in range(n)], dtype=np.int64).T
            results.append(g)
            return not find_all
        k = order[depth]
        c, ch = cands[norms2[k]]
        mask = np.ones(len(c), dtype=bool)
        for j in order[:depth]:
            mask &= ch @ images[j] == h2a[j, k]
        for idx in np.nonzero(mask)[0]:
            images[k] = c[idx]
            if rec(depth + 1):
                return True
        images[k] = None
        return False

    rec(0)
    return results


def automorphism_group(q: QuinaryForm) -> IsometryGroup:
    got = q._cache.get("aut")
    if got is None:
        elems = _search(q, q.hessian, find_all=True)
        for g in elems:
            if not np.array_equal(g.T @ np.array(q.hessian) @ g, np.array(q.hessian)):
                raise AssertionError("automorphism search returned a non-isometry")
        got = IsometryGroup(elems)
        q._cache["aut"] = got
    return got


def isometry_map(q1: QuinaryForm, q2: QuinaryForm, prec: int | None = None) -> list[list[int]] | None:
    """Some g with g^T H1 g = H2, or None when the forms are not isometric."""
    if q1.det != q2.det:
        return None
    h2 = np.array(q2.hessian)
    if sorted(np.diag(h2).tolist()) != sorted(np.diag(np.array(q1.hessian)).tolist()):
        # diagonals of reduced bases may differ; fall back to theta comparison
        t = prec if prec is not None else max(int(x) for x in np.diag(h2)) // 2
        if theta_series(q1, t) != theta_series(q2, t):
            return None
    found = _search(q1, q2.hessian, find_all=False)
    if not found:
        return None
    g = found[0]
    if not np.array_equal(g.T @ np.array(q1.hessian) @ g, h2):
        raise AssertionError("isometry search returned a non-isometry")
    return [[int(x) for x in row] for row in g]


def proper(g) -> list[list[int]]:
    """Multiply by -1 if needed so that det g = +1 (rank 5 is odd)."""
    d = la.det(g)
    if d == 1:
        return [list(map(int, r)) for r in g]
    if d == -1:
        return [[-int(x) for x in r] for r in g]
    raise ValueError("matrix is not unimodular")
