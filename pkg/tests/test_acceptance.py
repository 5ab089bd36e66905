"""One test per acceptance criterion; each prints a single PASS/FAIL line.

All comparisons are exact integer arithmetic (tolerance: none).
"""

import random
from fractions import Fraction

import pytest

from quinary import _linalg as la
from quinary.eigen import poly_mul, verify_factor_product
from quinary.experiments import (EXPECTED_V61, run_d61x37, run_d61, run_d89,
                                 run_d13x19)
from quinary.forms import (INFINITY, GenusDescriptor, eichler_invariant, hasse_witt, hilbert_symbol,
                           prime_divisors, seed_search, valuation)
from quinary.hecke import hecke_matrix
from quinary.neighbours import enumerate_genus, isotropic_lines
from quinary.weights import build_weight, weight_dimension


EXPECTED_FACTORS = [[-15, 1], [7, 1], [2026, -5205, 4471, -1714, 322, -29, 1]]


@pytest.fixture(scope="module")
def d61():
    return run_d61()


def test_criterion_1_d61_golden(d61, report):
    expected = poly_mul(poly_mul(*EXPECTED_FACTORS[:2]), EXPECTED_FACTORS[2])
    ok = (len(d61.genus) == 8 and d61.seed_isometric_to_q61
          and d61.charpoly.coefficients == expected
          and verify_factor_product(d61.charpoly, EXPECTED_FACTORS).ok)
    report(1, ok, f"classes={len(d61.genus)} charpoly={d61.charpoly.coefficients}")


def test_criterion_2_61_43_congruence(d61, report):
    # our class order differs from the expected one; a permutation is returned only when
    # it maps our T(2) exactly onto the expected matrix
    sigma = d61.permutation
    relabeled = [d61.v61[sigma[i]] for i in range(8)] if sigma else None
    same_line = relabeled in (EXPECTED_V61, [-x for x in EXPECTED_V61])
    ok = sigma is not None and same_line and d61.verdict43 == "collinear" and d61.verdict5 == "independent"
    report(2, ok, f"permutation={sigma} v61={d61.v61} ell43={d61.verdict43} ell5={d61.verdict5}")


def test_criterion_3_d89(report):
    r = run_d89()
    # genus size and mass pinned on the first verified run
    ok = (len(r.genus) == 10 and r.genus.mass() == Fraction(11, 16)
          and r.dims == {1: 10, 89: 0} and r.block_degrees == [1, 1, 1, 6]
          and r.general_eigenvalue == -4 and r.verdict29 == "collinear")
    report(3, ok, f"classes={len(r.genus)} blocks={r.block_degrees} line={r.general_eigenvalue} "
                  f"ell29={r.verdict29}")


def test_criterion_4_weight_dimensions(report):
    pinned = {(0, 0): 1, (1, 1): 5, (2, 0): 10, (4, 0): 35}
    bad = [ab for ab, n in pinned.items() if weight_dimension(*ab) != n or build_weight(*ab).dim != n]
    for a in range(7):
        for b in range(a % 2, a + 1, 2):
            closed = Fraction((a + 2) ** 2 - (b + 1) ** 2, 3) * Fraction(a + 2, 2) * (b + 1)
            if build_weight(a, b).dim != closed or weight_dimension(a, b) != closed:
                bad.append((a, b))
    report(4, not bad, f"mismatches={bad}")


def test_criterion_5_d13x19_mod7(report):
    r = run_d13x19()
    a, b = r.a_side, r.b_side
    degs = lambda s: [len(f) - 1 for f in s.factors]
    checks = {
        "yoshida=-16": r.yoshida == -16,
        "A blocks 1,4,29": degs(a) == [1, 4, 29],
        "B blocks 1,3,29": degs(b) == [1, 3, 29],
        "A1 eigenvalue -16": a.lift_eigenvalue == -16,
        "A1, B1 = 5 mod 7": a.lift_eigenvalue % 7 == b.lift_eigenvalue % 7 == 5,
        "A1 in A3 mod 7": a.contained_mod7,
        "B1 in B3 mod 7": b.contained_mod7,
        "A3 = B3": max(a.factors, key=len) == max(b.factors, key=len),
        "level 19 form mod 7": all(x == y for x, y in r.congruence_mod7.values()),
    }
    failed = [k for k, v in checks.items() if not v]
    report(5, not failed, f"genera={len(a.genus)},{len(b.genus)} failed={failed}")


@pytest.mark.slow
def test_criterion_6_d61x37_mod19(report):
    r = run_d61x37()
    ok = (r.dim == 224 and sorted(r.block_degrees) == [1, 12, 211] and r.kernel_dim19 == 2
          and r.second_third_digits == [(0, 0), (10, 8), (15, 2), (18, 10)]
          and r.verdict == "common-eigenspace-forced" and r.pairwise_noncollinear)
    report(6, ok, f"dim={r.dim} blocks={r.block_degrees} ker={r.kernel_dim19} "
                  f"digits={r.second_third_digits} verdict={r.verdict}")


def _random_rational(rng):
    return Fraction(rng.choice([-1, 1]) * rng.randint(1, 400), rng.randint(1, 60))


def test_criterion_7_property_suites(genus61, space61, report):
    failed = []
    rng = random.Random(7)
    for _ in range(1000):
        a, b = _random_rational(rng), _random_rational(rng)
        places = [INFINITY] + sorted(set([2] + prime_divisors(abs(a.numerator * a.denominator))
                                         + prime_divisors(abs(b.numerator * b.denominator))))
        prod = 1
        for v in places:
            prod *= hilbert_symbol(a, b, v)
        if prod != 1:
            failed.append(("reciprocity", a, b))
            break

    for dm, dp in [(5, 1), (13, 1), (19, 1), (61, 1), (89, 1), (13, 19), (19, 13)]:
        q = seed_search(GenusDescriptor(dm, dp))
        for p in prime_divisors(q.D):
            if hasse_witt(q, p) != eichler_invariant(q, p) ** valuation(q.D, p):
                failed.append(("hw-eichler", dm, dp, p))

    for p in (2, 3, 5, 7):
        if len(isotropic_lines(genus61.seed, p)) != (p + 1) * (p * p + 1):
            failed.append(("lines", p))

    ops = [hecke_matrix(space61, 2).integral(), hecke_matrix(space61, 2, "T1").integral(),
           hecke_matrix(space61, 3).integral()]
    for x in ops:
        for y in ops:
            if la.matmul(x, y) != la.matmul(y, x):
                failed.append("commutation")

    other = enumerate_genus(genus61.seed, 3)
    if other.mass() != genus61.mass() or len(other) != len(genus61):
        failed.append("mass across primes")
    moved = enumerate_genus(genus61.classes[-1])
    if len(moved) != len(genus61) or any(genus61.identify(c) is None for c in moved.classes):
        failed.append("base point")
    report(7, not failed, f"failed={failed}")
