from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from hypothesis import given, settings
from hypothesis import strategies as st

from frobtensor import m0n
from frobtensor.m0n import (
    RangeError,
    StrataElement,
    betti,
    get_ring,
    intersection_number,
    keel_relation,
    lemma_disjoint,
    lemma_forget_both,
    lemma_forget_one,
    poincare_polynomial,
    pullback_class,
    pushforward_class,
)
from frobtensor.trees import enumerate_stable_trees


def test_small_intersection_numbers():
    assert intersection_number(range(1, 5), [[1, 2]]) == 1
    assert intersection_number(range(1, 6), [[1, 2], [3, 4]]) == 1
    assert intersection_number(range(1, 6), [[1, 2], [1, 2]]) == -1
    # D12 and D13 on M_{0,4}: two distinct points, degree 2 > dimension
    assert intersection_number(range(1, 5), [[1, 2], [1, 3]]) == 0


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_psi_integrals_multinomial(n):
    # <tau_{a_1} ... tau_{a_n}> = (n-3)! / prod a_i!
    labels = list(range(1, n + 1))
    for a in itertools.product(range(n - 2), repeat=n):
        if sum(a) != n - 3:
            continue
        expected = math.factorial(n - 3) // math.prod(math.factorial(x) for x in a)
        assert intersection_number(labels, [], dict(zip(labels, a))) == expected


def test_kapranov_top_psi_power():
    for n in range(4, 9):
        assert intersection_number(range(1, n + 1), [], {1: n - 3}) == 1


def test_psi_as_boundary_sum():
    # psi_1 on M_{0,5} equals sum of D_S with 1 in S, 2,3 not in S
    labels = range(1, 6)
    for other in [[[1, 4]], [[1, 5]], [[2, 3]], [[4, 5]]]:
        lhs = intersection_number(labels, other, {1: 1})
        rhs = sum(intersection_number(labels, [S] + other) for S in ([1, 4], [1, 5], [1, 4, 5]))
        assert lhs == rhs


EULER = {3: 1, 4: 2, 5: 7, 6: 34, 7: 213, 8: 1630}


@pytest.mark.parametrize("n", range(3, 9))
def test_betti_numbers(n):
    p = poincare_polynomial(n)
    assert sum(p) == EULER[n]
    assert p == p[::-1]  # Poincare duality
    if n >= 4:
        assert betti(n, 1) == 2 ** (n - 1) - math.comb(n, 2) - 1


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_basis_sizes_and_gram_nondegenerate(n):
    ring = get_ring(n)
    for k in range(n - 2):
        B = ring.basis(k)
        assert len(B) == betti(n, k)
        G = ring.gram(k)
        assert (len(G), len(G[0])) == (len(B), len(ring.basis(n - 3 - k)))
        M = DomainMatrix([[QQ(x) for x in row] for row in G], (len(G), len(G)), QQ)
        assert M.det() != 0


@pytest.mark.parametrize("n", [5, 6])
def test_keel_relations_reduce_to_zero(n):
    labels = range(1, n + 1)
    for i, j, k, l in itertools.combinations(labels, 4):
        assert keel_relation(labels, i, j, k, l).is_zero()
        assert keel_relation(labels, i, k, j, l).is_zero()


def test_divisor_product_associative_and_commutative():
    labels = range(1, 7)
    a = StrataElement.divisor(labels, {1, 2})
    b = StrataElement.divisor(labels, {3, 4})
    c = StrataElement.divisor(labels, {1, 2, 5})
    assert a * b == b * a
    assert ((a * b) * c).integrate() == (a * (b * c)).integrate()


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_diagonal_degree_constraint(n):
    delta = m0n.diagonal(n)
    for b, c, x in delta.pairs:
        assert b.num_edges + c.num_edges == n - 3
        assert x != 0


@pytest.mark.parametrize("n", [4, 5, 6])
def test_diagonal_is_the_identity_correspondence(n):
    # sum_{(b,c)} (int x.b) c reproduces x for every stratum x
    ring = get_ring(n)
    labels = range(1, n + 1)
    delta = ring.diagonal()
    for k in range(n - 2):
        for t in enumerate_stable_trees(n, k)[:8]:
            x = StrataElement.stratum(t)
            image = StrataElement(labels)
            for b, c, coeff in delta.pairs:
                if b.num_edges + k != n - 3:
                    continue
                w = (x * StrataElement.stratum(b)).integrate()
                if w:
                    image = image + StrataElement.stratum(c, coeff * w)
            assert (image - x).is_zero()


def test_diagonal_term_counts():
    assert [len(m0n.diagonal(n).pairs) for n in (3, 4, 5)] == [1, 2, 20]


@pytest.mark.parametrize("n", [4, 5, 6])
def test_diagonal_lemmas(n):
    assert lemma_forget_both(n)
    assert lemma_forget_one(n)


@pytest.mark.parametrize("n,s,t", [(5, 4, 5), (6, 5, 6), (6, 2, 6)])
def test_disjoint_subset_lemma(n, s, t):
    assert lemma_disjoint(n, s, t)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_projection_formula(seed):
    # int_{n+1} pi^*(a) . b = int_n a . pi_*(b)
    rng = random.Random(seed)
    n = rng.choice([4, 5])
    k = rng.randrange(0, n - 2)
    a = StrataElement.stratum(rng.choice(enumerate_stable_trees(n, k)))
    b = StrataElement.stratum(rng.choice(enumerate_stable_trees(n + 1, n - 2 - k)))
    assert (pullback_class(a, n + 1) * b).integrate() == (a * pushforward_class(b, n + 1)).integrate()


def test_range_guard():
    with pytest.raises(RangeError):
        get_ring(9)
