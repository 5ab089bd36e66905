import copy
import random

import pytest

from quinary import _linalg as la
from quinary.eigen import operator_charpoly, poly_mul
from quinary.errors import Inconsistency, InvalidInput
from quinary.hecke import (HeckeOperator, build_space, character_projector, hecke_matrix, theta_sign,
                           transported_radicals, valid_character)
from quinary.isometry import automorphism_group
from quinary.neighbours import NeighbourEdge, enumerate_genus
from quinary.weights import build_weight


def commute(a, b):
    return la.matmul(a, b) == la.matmul(b, a)


@pytest.fixture(scope="module")
def space61_11(genus61):
    return build_space(genus61, 1, 1, 61)


def test_space61(space61):
    assert space61.dim == 8
    assert space61.class_dims() == [1] * 8


@pytest.mark.parametrize("p", [2, 3, 5])
def test_constants_eigenvector(space61, p):
    m = hecke_matrix(space61, p).matrix
    assert all(sum(row) == p ** 3 + p ** 2 + p + 1 for row in m)


def test_t2_entries_nonnegative_integers(space61):
    op = hecke_matrix(space61, 2)
    assert op.is_integral()
    assert all(x >= 0 for row in op.matrix for x in row)


def test_commutation_trivial_weight(space61):
    ops = [hecke_matrix(space61, 2).matrix, hecke_matrix(space61, 3).matrix,
           hecke_matrix(space61, 2, "T1").matrix, hecke_matrix(space61, 3, "T1").matrix]
    for a in ops:
        for b in ops:
            assert commute(a, b)


def test_t1_charpoly_regression(space61):
    # frozen from the first run; commutation with T(2) above is the check on it
    cp = operator_charpoly(hecke_matrix(space61, 2, "T1").matrix)
    sextic = [-163296, 19440, 15066, -648, -252, 3, 1]
    assert cp.coefficients == poly_mul(poly_mul([-7, 1], [-30, 1]), sextic)


def test_commutation_weighted(space61_11):
    assert space61_11.dim == 16
    t2 = hecke_matrix(space61_11, 2).matrix
    t3 = hecke_matrix(space61_11, 3).matrix
    t1 = hecke_matrix(space61_11, 2, "T1").matrix
    assert commute(t2, t3) and commute(t2, t1) and commute(t3, t1)


def test_weighted_charpoly_integral(space61_11):
    op = hecke_matrix(space61_11, 2)
    cp = operator_charpoly(op.matrix)
    assert len(cp.coefficients) == 17


def test_witness_independence(genus61, space61_11):
    # replace every edge witness by witness * (random proper automorphism of the target)
    rng = random.Random(3)
    g2 = copy.copy(genus61)
    g2.edges = {}
    proper = [[a.tolist() for a in automorphism_group(c).proper_elements] for c in genus61.classes]
    for i in range(len(genus61)):
        for kind in ("T",):
            edges = genus61.neighbour_edges(i, 2, kind)
            g2.edges[(i, 2, kind)] = [
                NeighbourEdge(e.target, la.matmul(e.matrix, rng.choice(proper[e.target])))
                for e in edges]
    s2 = build_space(g2, 1, 1, 61)
    assert hecke_matrix(s2, 2).matrix == hecke_matrix(space61_11, 2).matrix


def test_invalid_spaces(genus61):
    with pytest.raises(InvalidInput):
        build_space(genus61, 1, 0, 1)
    with pytest.raises(InvalidInput):
        build_space(genus61, 0, 0, 7)
    assert not valid_character(12, 2)
    assert valid_character(12, 4)


def test_invalid_prime(space61):
    with pytest.raises(InvalidInput):
        hecke_matrix(space61, 61)
    with pytest.raises(InvalidInput):
        hecke_matrix(space61, 4)
    with pytest.raises(InvalidInput):
        hecke_matrix(space61, 2, "S")


def test_theta_sign_basics(genus61):
    rads = transported_radicals(genus61, 61)
    v0 = rads[0]
    assert theta_sign(la.identity(5), v0, v0, 61) == 1
    with pytest.raises(Inconsistency):
        theta_sign(la.identity(5), v0, rads[0][:4] + ((v0[4] + 1) % 122,), 61)


def test_theta_sign_minus_one_exists(genus61):
    # the trivial weight space with d = 61 vanishes, so every class has an
    # automorphism acting by -1 on its radical
    rads = transported_radicals(genus61, 61)
    assert build_space(genus61, 0, 0, 61).dim == 0
    for c, v0 in zip(genus61.classes, rads):
        signs = {theta_sign(g.tolist(), v0, v0, 61) for g in automorphism_group(c).proper_elements}
        assert signs == {1, -1}


def test_theta_sign_multiplicative(genus61):
    rng = random.Random(5)
    for c, v0 in zip(genus61.classes, transported_radicals(genus61, 61)):
        els = [g.tolist() for g in automorphism_group(c).proper_elements]
        for _ in range(10):
            g, h = rng.choice(els), rng.choice(els)
            assert theta_sign(la.matmul(g, h), v0, v0, 61) == \
                theta_sign(g, v0, v0, 61) * theta_sign(h, v0, v0, 61)


def test_projector_idempotent(genus61):
    w = build_weight(1, 1, genus61.seed.hessian)
    rads = transported_radicals(genus61, 61)
    i = 6
    els = automorphism_group(genus61.classes[i]).proper_elements
    signs = [theta_sign(g.tolist(), rads[i], rads[i], 61) for g in els]
    p = character_projector(w, els, genus61.embeddings[i], signs)
    assert la.matmul(p, p) == p


def test_operator_json(space61):
    op = hecke_matrix(space61, 3)
    back = HeckeOperator.from_json(op.to_json())
    assert back.matrix == op.matrix
    assert back.content_hash() == op.content_hash()


def test_spectrum_stable_under_traversal_prime(genus61):
    g3 = enumerate_genus(genus61.seed, 3)
    for d in (1, 61):
        for ab in [(0, 0), (1, 1)]:
            a = operator_charpoly(hecke_matrix(build_space(genus61, *ab, d), 5).matrix)
            b = operator_charpoly(hecke_matrix(build_space(g3, *ab, d), 5).matrix)
            assert a.coefficients == b.coefficients


def test_level19_classical_eigenvalues(genus19):
    # one class-weight line; eigenvalues agree with a_p(g) + p + p^4 mod 7
    # for the weight 6 level 19 form with a_2, a_3, a_5 = -6, 4, 54
    s = build_space(genus19, 2, 0, 1)
    assert s.dim == 1
    eig = {p: hecke_matrix(s, p).matrix[0][0] for p in (2, 3, 5)}
    assert eig == {2: -9, 3: -3, 5: 12}
    ap = {2: -6, 3: 4, 5: 54}
    assert all((eig[p] - ap[p] - p - p ** 4) % 7 == 0 for p in eig)
