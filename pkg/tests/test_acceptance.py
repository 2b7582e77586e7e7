"""End-to-end acceptance checks.

Each test records a one-line PASS/FAIL verdict (see ``conftest.py``); the
summary is printed at the end of the run.  A verdict is computed from the
comparison itself and never forced.
"""
from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from hypothesis import given, settings
from hypothesis import strategies as st

from frobtensor import m0n
from frobtensor.frobenius import (
    EulerData,
    FrobeniusModel,
    coherence_check,
    conformality_check,
    exponential_plane,
    flat_identity_check,
    flat_identity_plane,
    monomial_plane,
    quasi_homogeneity_check,
    v_is_skew,
    wdvv_check,
)
from frobtensor.rank_one import RankOneTheory, cross_validate, random_theory, tensor_rank1
from frobtensor.semisimple import (
    FirstOrderData,
    SemisimplePointData,
    SpecialInitialConditions,
    diagonalize_exact,
    eta_derivatives,
    first_order_data,
    first_order_idempotents,
    idempotent_expansion_tensor,
    max_difference,
    pn_pm_model,
    pn_special_init,
    tensor_special_init,
)
from frobtensor.series import CorrelatorFamily, GradedBasis, Metric, koszul_sign, odd_repeat, sort_with_sign
from frobtensor.tensor import tensor_correlators, theta_tau_compatibility

# --------------------------------------------------------------------- 1

_R, a4, a5, a6, a7, b4, b5, b6, b7 = sympy.ring("a4,a5,a6,a7,b4,b5,b6,b7", sympy.QQ)

# the four printed formulas, transcribed term by term
PRINTED = {
    4: a4 + b4,
    5: a5 + 5 * a4 * b4 + b5,
    6: a6 + (8 * a4 ** 2 + a5) * b4 + a4 * (8 * b4 ** 2 + b5) + b6,
    7: (a7 + (35 * a4 * a5 + 14 * a6) * b4
        + (61 * a4 ** 2 * b4 ** 2 + 33 * a4 ** 2 * b5 + 33 * a5 * b4 ** 2 + 19 * a5 * b5)
        + a4 * (35 * b4 * b5 + 14 * b6) + b7),
}


def _symbolic_product():
    one = Fraction(1)
    return tensor_rank1(RankOneTheory((one, a4, a5, a6, a7)), RankOneTheory((one, b4, b5, b6, b7)))


@pytest.mark.xfail(strict=True, reason="printed C6 cross terms C5*C4 carry coefficient 1; both pathways give 9")
def test_criterion_1_printed_formulas(verdict):
    t0 = time.perf_counter()
    T = _symbolic_product()
    elapsed = time.perf_counter() - t0
    bad = [n for n, p in PRINTED.items() if T.C(n) != p]
    detail = f"(exact, {elapsed:.2f}s)" if not bad else \
        f"C{bad} differ: C6 - printed = {T.C(6) - PRINTED[6]}"
    verdict(1, not bad and T.C(3) == 1 and elapsed < 10, detail)
    assert not bad


def test_criterion_1_corrected_c6_confirmed_by_diagonal_pathway():
    T = _symbolic_product()
    # C4, C5, C7 as printed; C6 with 9 in place of the two unit cross terms
    for n in (4, 5, 7):
        assert T.C(n) == PRINTED[n]
    assert T.C(6) == PRINTED[6] + 8 * a5 * b4 + 8 * a4 * b5
    # independent check on numbers through the diagonal class of M_{0,6}
    rng = random.Random(6)
    for _ in range(3):
        x = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)]
        y = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)]
        D = tensor_correlators(RankOneTheory((1, *x[:3])).model(6), RankOneTheory((1, *y[:3])).model(6), 6)
        vals = dict(zip([a4, a5, a6, b4, b5, b6], x[:3] + y[:3]))
        c6 = T.C(6).compose(list(vals.items()))
        assert D.Y((0,) * 6) == c6.LC if c6 else D.Y((0,) * 6) == 0


# --------------------------------------------------------------------- 2

def test_criterion_2_pathway_equivalence(verdict):
    rng = random.Random(2024)
    t0 = time.perf_counter()
    failures = []
    for k in range(20):
        t1, t2 = random_theory(rng, 7), random_theory(rng, 7)
        rep = cross_validate(t1, t2, 7)
        if not rep.ok or rep.checked != 5:
            failures.append((k, rep.violations))
    elapsed = time.perf_counter() - t0
    verdict(2, not failures and elapsed < 120, f"20 pairs, n<=7, exact ({elapsed:.1f}s)")
    assert not failures


# --------------------------------------------------------------------- 3

def test_criterion_3_zero_tensor(verdict):
    rng = random.Random(3)
    ok = True
    for _ in range(10):
        t1, t2 = random_theory(rng, 8, c3=0), random_theory(rng, 8, c3=0)
        ok &= all(c == 0 for c in tensor_rank1(t1, t2).coeffs)
    # the diagonal pathway agrees up to n = 7 (n = 8 via the U-side only; see the slow test)
    t1, t2 = random_theory(rng, 7, c3=0), random_theory(rng, 7, c3=0)
    D = tensor_correlators(t1.model(7), t2.model(7), 7)
    ok &= all(D.Y((0,) * n) == 0 for n in range(3, 8))
    verdict(3, ok, "zero through n = 8 (U-pathway) and n = 7 (diagonal pathway), exact")
    assert ok


@pytest.mark.slow
def test_criterion_3_zero_tensor_diagonal_n8():
    rng = random.Random(8)
    t1, t2 = random_theory(rng, 8, c3=0), random_theory(rng, 8, c3=0)
    D = tensor_correlators(t1.model(8), t2.model(8), 8, n_max=8)
    assert all(D.Y((0,) * n) == 0 for n in range(3, 9))


# --------------------------------------------------------------------- 4

def test_criterion_4_diagonal_lemmas(verdict):
    ok = True
    for n in (4, 5, 6):
        ok &= m0n.lemma_forget_both(n)
        ok &= m0n.lemma_forget_one(n)
    for n in (5, 6):
        for s, t in itertools.permutations(range(1, n + 1), 2):
            ok &= m0n.lemma_disjoint(n, s, t)
    for n in range(3, 8):
        for b, c, x in m0n.diagonal(n).pairs:
            ok &= b.num_edges + c.num_edges == n - 3 and x != 0
    verdict(4, ok, "lemmas n<=6, degree constraint n<=7, exact")
    assert ok


# --------------------------------------------------------------------- 5 / 6

def _random_factor(rng, N):
    c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))
    if rng.random() < 0.4:
        return exponential_plane(c, N)
    return monomial_plane(c, rng.randint(3, N), N)


def test_criterion_5_tensor_structure(verdict):
    rng = random.Random(5)
    results = []
    for _ in range(8):
        A, B = _random_factor(rng, 6), _random_factor(rng, 6)
        T = tensor_correlators(A, B, 6)
        reps = [flat_identity_check(T), conformality_check(T), quasi_homogeneity_check(T)]
        results.append(all(r.ok and r.checked > 0 for r in reps))
    verdict(5, all(results), f"{sum(results)}/8 random pairs, N=6, exact")
    assert all(results)


def test_criterion_6_wdvv_closure(verdict):
    rng = random.Random(6)
    passed = 0
    t0 = time.perf_counter()
    for k in range(10):
        if k % 2:
            A, B = _random_factor(rng, 6), _random_factor(rng, 6)
        else:
            f = {j: Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for j in range(3, 7)}
            A, B = flat_identity_plane(f, 6), _random_factor(rng, 6)
        assert wdvv_check(A).ok and wdvv_check(B).ok
        passed += wdvv_check(tensor_correlators(A, B, 6)).ok
    elapsed = time.perf_counter() - t0
    verdict(6, passed == 10 and elapsed < 300, f"{passed}/10 pairs, N=6, exact ({elapsed:.1f}s)")
    assert passed == 10


# --------------------------------------------------------------------- 7

def test_criterion_7_base_point_compatibility(verdict):
    R, s0, s1, t0, t1 = sympy.ring("s0,s1,t0,t1", sympy.QQ)
    pairs = [(exponential_plane(1, 5), monomial_plane(Fraction(1, 2), 4, 5)),
             (monomial_plane(2, 3, 5), exponential_plane(Fraction(-1, 3), 5))]
    ok = True
    for A, B in pairs:
        rep = theta_tau_compatibility(A, B, {0: s0, 1: s1}, {0: t0, 1: t1}, 5)
        ok &= rep.ok and rep.checked > 0
    verdict(7, ok, "symbolic shifts, joint truncation 5, exact")
    assert ok


# --------------------------------------------------------------------- 8

def _delta_blocks_hold(n1, n2):
    u1, u2 = sympy.symbols(f"u0:{n1}"), sympy.symbols(f"w0:{n2}")
    e1, e2 = sympy.symbols(f"h0:{n1}"), sympy.symbols(f"k0:{n2}")
    v1 = [[0 if i == k else sympy.Symbol(f"a{i}_{k}") for k in range(n1)] for i in range(n1)]
    v2 = [[0 if j == l else sympy.Symbol(f"b{j}_{l}") for l in range(n2)] for j in range(n2)]
    S = tensor_special_init(SpecialInitialConditions(list(u1), list(e1), v1),
                            SpecialInitialConditions(list(u2), list(e2), v2), check_tame=False)
    idx = list(itertools.product(range(n1), range(n2)))
    for p, (i, j) in enumerate(idx):
        if sympy.expand(S.u[p] - u1[i] - u2[j]) != 0 or S.eta[p] != e1[i] * e2[j]:
            return False
        for q, (k, l) in enumerate(idx):
            want = v1[i][k] if j == l else v2[j][l] if i == k else 0
            if (i, j) == (k, l):
                want = 0
            if S.v[p][q] != want:
                return False
    return True


def test_criterion_8_semisimple_tensor_law(verdict):
    symbolic = all(_delta_blocks_hold(a, b) for a, b in [(2, 2), (3, 2), (2, 4)])
    x = (0.3 - 0.1j, 0.25, -0.4 + 0.2j)
    worst = 0.0
    for n, m in [(1, 1), (1, 2), (2, 2), (2, 3)]:
        ref = pn_pm_model(n, m, *x)
        S = tensor_special_init(pn_special_init(n, x[0], x[1]), pn_special_init(m, 0, x[2]))
        worst = max(worst, max_difference(S, ref))
    ok = symbolic and worst < 1e-10
    verdict(8, ok, f"symbolic delta-blocks {'exact' if symbolic else 'WRONG'}, P^n x P^m max diff {worst:.1e}")
    assert ok


# --------------------------------------------------------------------- 9

def _symbolic_factor(r, tag):
    e0 = [[sympy.Symbol(f"{tag}E{i}{a}") for a in range(r)] for i in range(r)]
    e1 = [[[sympy.Symbol(f"{tag}F{i}{a}{c}") for c in range(r)] for a in range(r)] for i in range(r)]
    eta = [sympy.Symbol(f"{tag}h{i}") for i in range(r)]
    deta = [[sympy.Symbol(f"{tag}d{i}{a}") for a in range(r)] for i in range(r)]
    return FirstOrderData(e0, e1, eta, deta)


def _differentiation_oracle(f1, f2):
    """Rebuild eta_{ij,kl}(0) by differentiating the first-order eta_{ij}(x) along e_{kl}."""
    T, eta_kl = idempotent_expansion_tensor(f1, f2)
    r1, r2 = len(f1.e0), len(f2.e0)
    dirs = list(itertools.product(range(r1), range(r2)))
    xs = {d: sympy.Symbol(f"x{d[0]}_{d[1]}") for d in dirs}
    mismatches = 0
    for p in range(r1 * r2):
        eta_x = T.eta0[p] + sum(T.deta[p][q] * xs[d] for q, d in enumerate(dirs))
        for q, (k, l) in enumerate(dirs):
            deriv = sum(f1.e0[k][a] * f2.e0[l][b] * sympy.diff(eta_x, xs[(a, b)]) for a, b in dirs)
            mismatches += sympy.cancel(sympy.together(deriv - eta_kl[p][q])) != 0
    return mismatches


def test_criterion_9_idempotent_expansion(verdict):
    symbolic = _differentiation_oracle(_symbolic_factor(2, "p"), _symbolic_factor(2, "q")) == 0
    symbolic &= _differentiation_oracle(_symbolic_factor(2, "p"), _symbolic_factor(3, "q")) == 0
    # exact first-order idempotents of tensor models against the expansion law
    exact = True
    for c1, c2 in [(1, 1), (1, 4), (Fraction(9, 4), 4)]:
        A, B = exponential_plane(c1, 5), exponential_plane(c2, 5)
        f1, f2 = first_order_data(A, diagonalize_exact(A)), first_order_data(B, diagonalize_exact(B))
        T, eta_kl = idempotent_expansion_tensor(f1, f2)
        TM = tensor_correlators(A, B, 5)
        data = SemisimplePointData([None] * 4, T.eta0, T.e0)
        fo = first_order_idempotents(TM, data)
        deta = eta_derivatives(TM, data)
        exact &= fo == T.e1 and deta == T.deta
        exact &= FirstOrderData(T.e0, fo, T.eta0, deta).eta_frame() == eta_kl
    verdict(9, symbolic and exact, "differentiation oracle (symbolic) and tensor models (exact)")
    assert symbolic and exact


# --------------------------------------------------------------------- 10

_PROPS: dict[str, bool] = {}


def _prop(name):
    """Record a failing example under ``name`` (hypothesis control flow passes through)."""
    import functools

    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except Exception:
                _PROPS[name] = False
                raise
            _PROPS.setdefault(name, True)
        return inner
    return wrap


fractions = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@given(st.permutations(range(5)), st.permutations(range(5)), st.lists(st.integers(0, 1), min_size=5, max_size=5))
@settings(max_examples=60, deadline=None)
@_prop("koszul")
def test_property_koszul_laws(p, q, parity):
    composite = [p[q[i]] for i in range(5)]
    inner = [parity[p[i]] for i in range(5)]
    assert koszul_sign(composite, parity) == koszul_sign(p, parity) * koszul_sign(q, inner)


@given(st.lists(st.integers(0, 3), min_size=3, max_size=5), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
@_prop("graded symmetry")
def test_property_graded_symmetry(index, rnd):
    parity = (0, 1, 1, 0)
    key, sign = sort_with_sign(index, parity)
    if sum(parity[i] for i in index) % 2 or odd_repeat(key, parity):
        return  # such entries are forced to vanish
    F = CorrelatorFamily(GradedBasis(parity), 5, {len(key): {key: Fraction(7)}})
    perm = list(range(len(index)))
    rnd.shuffle(perm)
    shuffled = [index[i] for i in perm]
    assert F.get(shuffled) == koszul_sign(perm, [parity[i] for i in index]) * F.get(index)
    assert F.get(index) == sign * 7


@given(st.lists(fractions, min_size=4, max_size=4), st.lists(fractions, min_size=3, max_size=3))
@settings(max_examples=30, deadline=None)
@_prop("wdvv<=>coherence")
def test_property_wdvv_iff_coherence(y3, y4):
    b = GradedBasis.even(2)
    keys3 = list(itertools.combinations_with_replacement(range(2), 3))
    keys4 = [(0, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 1)]
    F = CorrelatorFamily(b, 4, {3: {k: v for k, v in zip(keys3, y3) if v},
                                4: {k: v for k, v in zip(keys4, y4) if v}})
    M = FrobeniusModel(b, Metric.from_rows([[0, 1], [1, 0]]), F)
    w_low = [v for v in wdvv_check(M).violations if len(v["location"]["x_degree"]) <= 1]
    c_low = [v for v in coherence_check(M.truncated(4)).violations if v["location"]["n"] <= 5]
    assert (not w_low) == (not c_low)


@given(fractions, fractions)
@settings(max_examples=40, deadline=None)
@_prop("V-skewness")
def test_property_v_skew(q0, D):
    # g antidiagonal: conformality forces d00 + d22 = D = 2 d11
    d = ((q0, 0, 0), (0, D / 2, 0), (0, 0, D - q0))
    g = Metric.from_rows([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    assert v_is_skew(g, EulerData(d, (0, 0, 0), D, 1))


@pytest.mark.parametrize("n", [5, 6, 7])
@_prop("keel")
def test_property_keel_relations(n):
    labels = range(1, n + 1)
    quads = list(itertools.combinations(labels, 4))
    if n == 7:
        quads = quads[::5]
    for i, j, k, l in quads:
        assert m0n.keel_relation(labels, i, j, k, l).is_zero()


@pytest.mark.parametrize("n", [4, 5, 6, 7])
@_prop("pairing")
def test_property_pairing_nondegenerate(n):
    ring = m0n.get_ring(n)
    for k in range(n - 2):
        G = ring.gram(k)
        assert len(G) == len(G[0])
        assert DomainMatrix([[QQ(x) for x in r] for r in G], (len(G), len(G)), QQ).det() != 0


def test_criterion_10_property_suite(verdict):
    # runs after the property tests above (file order)
    expected = {"koszul", "graded symmetry", "wdvv<=>coherence", "V-skewness", "keel", "pairing"}
    missing = expected - _PROPS.keys()
    ok = not missing and all(_PROPS.values())
    detail = ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in sorted(_PROPS.items()))
    verdict(10, ok, detail + (f"; not run: {sorted(missing)}" if missing else ""))
    assert ok
