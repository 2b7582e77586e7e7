from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from frobtensor.series import (
    CorrelatorFamily,
    FormalShiftVector,
    GradedBasis,
    Metric,
    TruncationError,
    as_rational,
    correlators_from_potential,
    koszul_sign,
    potential_view,
    rational_str,
    shift_correlators,
    sort_with_sign,
)


def test_rational_parsing_roundtrip():
    for s in ["0", "3", "-7/4", "12/8"]:
        q = as_rational(s)
        assert as_rational(rational_str(q)) == q
    assert rational_str(Fraction(6, 8)) == "3/4"
    with pytest.raises(TypeError):
        as_rational(0.5)


def _sign_by_swaps(perm, parities):
    # bubble sort the target arrangement back, counting odd-odd transpositions
    arr = list(perm)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                if parities[arr[j]] and parities[arr[j + 1]]:
                    sign = -sign
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
    return sign


@given(st.permutations(range(6)), st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_koszul_sign_matches_transposition_count(perm, parities):
    assert koszul_sign(perm, parities) == _sign_by_swaps(perm, parities)


@given(st.permutations(range(5)), st.permutations(range(5)), st.lists(st.integers(0, 1), min_size=5, max_size=5))
def test_koszul_sign_is_multiplicative(p, q, parities):
    # apply p then q: position i receives the symbol p[q[i]]
    composite = [p[q[i]] for i in range(5)]
    inner = [parities[p[i]] for i in range(5)]
    assert koszul_sign(composite, parities) == koszul_sign(p, parities) * koszul_sign(q, inner)


def test_koszul_all_even_is_trivial():
    for perm in itertools.permutations(range(4)):
        assert koszul_sign(perm, [0, 0, 0, 0]) == 1


def test_sort_with_sign_odd_transposition():
    assert sort_with_sign((1, 0), (1, 1)) == ((0, 1), -1)
    assert sort_with_sign((1, 0), (0, 1)) == ((0, 1), 1)


def test_metric_graded_symmetry():
    Metric.from_rows([[0, 1], [1, 0]])
    Metric.from_rows([[0, 1], [-1, 0]], parity=[1, 1])
    with pytest.raises(ValueError):
        Metric.from_rows([[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        Metric.from_rows([[0, 1], [1, 0]], parity=[1, 1])
    with pytest.raises(ValueError):
        Metric.from_rows([[1, 1], [1, 1]])  # degenerate


def test_metric_inverse():
    m = Metric.from_rows([[2, 1], [1, 3]])
    g, gi = m.g, m.g_inv
    for a, b in itertools.product(range(2), repeat=2):
        assert sum(g[a][c] * gi[c][b] for c in range(2)) == (a == b)


def test_family_rejects_unsorted_and_odd_repeat():
    b = GradedBasis((0, 1))
    with pytest.raises(ValueError):
        CorrelatorFamily(b, 4, {3: {(1, 0, 0): Fraction(1)}})
    with pytest.raises(ValueError):
        CorrelatorFamily(b, 4, {3: {(0, 1, 1): Fraction(1)}})


def test_graded_symmetry_of_lookup():
    b = GradedBasis((0, 1, 1))
    F = CorrelatorFamily(b, 3, {3: {(0, 1, 2): Fraction(5)}})
    for perm in itertools.permutations((0, 1, 2)):
        sign = 1 if perm.index(1) < perm.index(2) else -1
        assert F.get(perm) == sign * 5


def test_truncation_error_outside_range():
    F = CorrelatorFamily(GradedBasis.even(1), 4, {3: {(0, 0, 0): Fraction(1)}})
    with pytest.raises(TruncationError):
        F.get((0,) * 5)
    with pytest.raises(TruncationError):
        F.get((0, 0))


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda e: 3 <= sum(e) <= 6),
                       st.fractions(max_denominator=7).filter(lambda q: q != 0), max_size=6))
def test_potential_roundtrip(poly):
    b = GradedBasis.even(2)
    F = correlators_from_potential(b, poly, 6)
    assert potential_view(F) == poly


def test_potential_matches_sympy_derivatives():
    x, y = sympy.symbols("x y")
    phi = sympy.Rational(1, 2) * x**2 * y + sympy.Rational(3, 24) * y**4 + sympy.Rational(2, 6) * x**3
    poly = {tuple(m): Fraction(int(c.p), int(c.q)) for m, c in sympy.Poly(phi, x, y).terms()}
    F = correlators_from_potential(GradedBasis.even(2), poly, 4)
    for n in (3, 4):
        for key in itertools.combinations_with_replacement(range(2), n):
            d = phi
            for a in key:
                d = sympy.diff(d, (x, y)[a])
            v = sympy.Rational(d.subs({x: 0, y: 0}))
            assert F.get(key) == Fraction(int(v.p), int(v.q))


def test_shift_one_dimensional_oracle():
    # Phi = 2 x^3/6 + 3 x^4/24; Phi'''(s) = 2 + 3 s
    R, s = sympy.ring("s", sympy.QQ)
    F = CorrelatorFamily(GradedBasis.even(1), 4, {3: {(0, 0, 0): Fraction(2)}, 4: {(0,) * 4: Fraction(3)}})
    G = shift_correlators(F, {0: s})
    assert G.get((0, 0, 0)) == 3 * s + 2
    assert G.get((0,) * 4) == 3


def test_shift_against_taylor_expansion():
    # Y_n at the shifted point equals the n-th derivative of the truncated potential at x0
    x, y = sympy.symbols("x y")
    phi = x**2 * y / 2 + y**5 / 40 + x * y**3 / 3 + y**4 / 7
    poly = {tuple(m): Fraction(int(c.p), int(c.q)) for m, c in sympy.Poly(phi, x, y).terms()}
    F = correlators_from_potential(GradedBasis.even(2), poly, 5)
    x0 = {0: Fraction(1, 3), 1: Fraction(-2, 5)}
    G = shift_correlators(F, x0)
    at = {x: sympy.Rational(1, 3), y: sympy.Rational(-2, 5)}
    for n in (3, 4, 5):
        for key in itertools.combinations_with_replacement(range(2), n):
            d = phi
            for a in key:
                d = sympy.diff(d, (x, y)[a])
            v = sympy.Rational(d.subs(at))
            assert G.get(key) == Fraction(int(v.p), int(v.q))


def test_shift_rejects_odd_direction():
    F = CorrelatorFamily(GradedBasis((0, 1)), 3, {3: {(0, 0, 0): Fraction(1)}})
    with pytest.raises(ValueError):
        shift_correlators(F, {1: Fraction(1)})
    assert FormalShiftVector({0: 0, 1: 2}).support == (1,)


def test_potential_sign_for_odd_variables():
    b = GradedBasis((1, 1, 0))
    F = CorrelatorFamily(b, 3, {3: {(0, 1, 2): Fraction(1)}})
    pv = potential_view(F)
    # x^2 x^1 x^0 reordered to x^0 x^1 x^2 reverses two odd symbols
    assert pv == {(1, 1, 1): Fraction(-1)}
    assert math.isclose(float(sum(abs(v) for v in pv.values())), 1.0)
