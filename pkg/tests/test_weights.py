import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from quinary import _linalg as la
from quinary.errors import InvalidInput, Unsupported
from quinary.isometry import automorphism_group
from quinary.weights import build_weight, weight_action, weight_dimension

ALL_WEIGHTS = [(a, b) for a in range(7) for b in range(a % 2, a + 1, 2)]
MINUS_I = [[-int(i == j) for j in range(5)] for i in range(5)]


def test_dimension_examples():
    assert weight_dimension(0, 0) == 1
    assert weight_dimension(2, 0) == 10
    assert weight_dimension(1, 1) == 5
    assert weight_dimension(4, 0) == 35


@pytest.mark.parametrize("a,b", [(1, 2), (-1, -1), (0, -2)])
def test_dimension_bad(a, b):
    with pytest.raises(InvalidInput):
        weight_dimension(a, b)


@pytest.mark.parametrize("a,b", ALL_WEIGHTS)
def test_built_dimension(a, b):
    assert build_weight(a, b).dim == weight_dimension(a, b)


def test_parity_and_cap():
    with pytest.raises(InvalidInput):
        build_weight(1, 0)
    with pytest.raises(Unsupported):
        build_weight(8, 0)


def test_w20_is_antisymmetric():
    w = build_weight(2, 0)
    for col in w.basis.T:
        t = np.array(col, dtype=object).reshape(5, 5)
        assert (t == -t.T).all()


def test_scalar():
    w = build_weight(0, 0)
    assert weight_action(w, la.identity(5)) == [[1]]


@pytest.mark.parametrize("a,b", [(1, 1), (2, 0), (2, 2), (3, 1)])
def test_minus_identity_trivial(a, b):
    w = build_weight(a, b)
    r = weight_action(w, MINUS_I)
    assert r == [[Fraction(int(i == j)) for j in range(w.dim)] for i in range(w.dim)]


def test_not_orthogonal():
    w = build_weight(2, 0)
    g = la.identity(5)
    g[0][1] = 1
    with pytest.raises(InvalidInput):
        weight_action(w, g)


@pytest.fixture(scope="module")
def q61_auts(q61):
    return [g.tolist() for g in automorphism_group(q61).elements]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 1), (2, 0), (2, 2)]))
def test_homomorphism(q61, q61_auts, seed, ab):
    rng = random.Random(seed)
    g, h = rng.choice(q61_auts), rng.choice(q61_auts)
    w = build_weight(*ab, form=q61.matrix)
    lhs = weight_action(w, la.matmul(g, h))
    rhs = la.matmul(weight_action(w, g), weight_action(w, h))
    assert lhs == rhs


@pytest.mark.parametrize("ab", [(2, 0), (2, 2)])
def test_invariant_pairing(q61, q61_auts, ab):
    w = build_weight(*ab, form=q61.matrix)
    gram = [[Fraction(int(x)) for x in row] for row in w.gram()]
    for g in q61_auts[:12]:
        r = weight_action(w, g)
        assert la.congruent(gram, r) == gram


def test_traceless_preserved(q61, q61_auts):
    w = build_weight(2, 2, form=q61.matrix)
    h = np.array(q61.matrix, dtype=object)
    g = q61_auts[5]
    r = np.array(weight_action(w, g), dtype=object)
    img = w.basis.dot(r)
    for col in img.T:
        t = col.reshape(5, 5)
        assert sum(h[i][j] * t[i][j] for i in range(5) for j in range(5)) == 0
