from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobtensor.trees import (
    RawTree,
    StableTree,
    TreeSum,
    all_splits,
    compatible,
    enumerate_stable_trees,
    parse_tree,
    pullback,
    pushforward,
    stabilize,
)


def _double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


# total number of boundary strata: little Schroeder numbers 1, 4, 26, 236, 2752
SCHROEDER = {3: 1, 4: 4, 5: 26, 6: 236, 7: 2752}


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_stratum_counts(n):
    counts = [len(enumerate_stable_trees(n, e)) for e in range(n - 2)]
    assert sum(counts) == SCHROEDER[n]
    assert counts[0] == 1
    if n >= 4:
        assert counts[1] == 2 ** (n - 1) - n - 1  # nontrivial bipartitions
        assert counts[-1] == _double_factorial(2 * n - 5)  # trivalent trees


def test_one_edge_trees_are_divisors():
    trees = enumerate_stable_trees(5, 1)
    sides = {next(iter(t.splits)) for t in trees}
    assert sides == set(all_splits(range(1, 6)))
    assert all(1 not in A for A in sides)


@pytest.mark.parametrize("text", ["(1 2 3)", "(1 (2 3) 4)", "(1 2 (3 4 5))", "(1 (2 3) (4 5) 6)", "(1 (2 (3 4)) 5)"])
def test_parse_print_roundtrip(text):
    t = parse_tree(text)
    assert parse_tree(t.to_text()) == t
    assert StableTree.parse(t.to_text()) == t


def test_parse_is_canonical_under_reordering():
    assert parse_tree("(1 (3 2) 4)") == parse_tree("(4 1 (2 3))")
    # the side not containing the root is stored
    t = parse_tree("((1 2) 3 4)")
    assert t == parse_tree("(1 2 (3 4))")


def test_unstable_input_rejected():
    with pytest.raises(ValueError):
        StableTree.from_splits(range(1, 5), [[2]])
    with pytest.raises(ValueError):
        StableTree.from_splits(range(1, 6), [[2, 3], [2, 4]])  # crossing


def test_valence_and_quadruple():
    t = parse_tree("(1 (2 3) 4)")
    assert [t.valence(v) for v in t.vertices()] == [3, 3]
    assert set(t.edge_sides(frozenset({2, 3}))) == {frozenset({2, 3}), frozenset({1, 4})}


def test_stabilize_contracts_bivalent_and_drops_empty_leaves():
    # path root(1,2) - mid() - leaf(3,4), plus a dangling vertex with one tail
    raw = RawTree({"a": [1, 2], "b": [], "c": [3, 4], "d": [5]}, [("a", "b"), ("b", "c"), ("b", "d")])
    t = stabilize(raw)
    assert t.n == 5
    for v in t.vertices():
        assert t.valence(v) >= 3
    # stabilisation keeps exactly the edges whose splits are nontrivial
    kept = {A for A in raw.edge_splits() if 2 <= len(A) <= 3}
    assert t == StableTree.from_splits(range(1, 6), kept)
    assert t == parse_tree("(1 2 ((3 4) 5))")


@given(st.integers(5, 7), st.data())
@settings(max_examples=30, deadline=None)
def test_pushforward_pullback_edge_counts(n, data):
    e = data.draw(st.integers(0, n - 3))
    t = data.draw(st.sampled_from(enumerate_stable_trees(n, e)))
    pb = pullback(t, n + 1)
    # one term per vertex, all with the same edge count and n + 1 tails
    assert len(pb) == e + 1
    for u, c in pb:
        assert c == 1 and u.num_edges == e and u.n == n + 1
        # forgetting the new tail undoes the pullback
        assert pushforward(u, n + 1) == TreeSum() or u.num_edges > e
        back = frozenset(_forget_split(A, n + 1, u.labels) for A in u.splits)
        assert back == t.splits


def _forget_split(A, s, labels):
    labels = labels - {s}
    B = A - {s}
    return B if min(labels) not in B else labels - B


def test_pushforward_nonzero_iff_edge_lost():
    t = parse_tree("(1 2 (3 4) 5)")
    assert pushforward(t, 5) == TreeSum()
    t = parse_tree("(1 2 3 (4 5))")
    out = pushforward(t, 5)
    assert len(out) == 1 and next(iter(out))[0] == StableTree.corolla(range(1, 5))


def test_compatibility_is_symmetric():
    sp = all_splits(range(1, 7))
    for A, B in itertools.combinations(sp, 2):
        assert compatible(A, B) == compatible(B, A)


def test_sorted_enumeration_is_deterministic():
    a = enumerate_stable_trees(6, 2)
    b = enumerate_stable_trees(6, 2)
    assert a == b == sorted(a)
