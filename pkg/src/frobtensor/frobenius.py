"""Frobenius models and the checks that can be run on a single one.

A :class:`FrobeniusModel` is a truncated formal Frobenius manifold: a graded
basis, an even pairing ``g``, correlators ``Y_3 .. Y_N`` and optionally an
Euler field and a flat identity.  Every check returns a :class:`Report`;
identities whose verification would need correlators beyond the truncation
are listed as unverifiable, never counted as passing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .series import (
    ONE,
    ZERO,
    CorrelatorFamily,
    GradedBasis,
    Metric,
    TruncationError,
    as_rational,
    koszul_sign,
    sort_with_sign,
)
from .trees import StableTree, enumerate_stable_trees, pullback, pushforward


# ------------------------------------------------------------------ reports


@dataclass
class Report:
    name: str
    violations: list[dict] = field(default_factory=list)
    unverifiable: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def status(self) -> str:
        if self.violations:
            return "fail"
        if self.checked == 0 and self.unverifiable:
            return "partial"
        return "pass"

    @property
    def ok(self) -> bool:
        return not self.violations

    def violation(self, location, lhs, rhs):
        self.violations.append({"location": location, "lhs": _fmt(lhs), "rhs": _fmt(rhs)})

    def merge(self, other: "Report") -> "Report":
        out = Report(f"{self.name}+{other.name}" if self.name else other.name)
        out.violations = self.violations + other.violations
        out.unverifiable = self.unverifiable + other.unverifiable
        out.checked = self.checked + other.checked
        return out

    def to_json(self) -> dict:
        return {"check": self.name, "status": self.status, "checked": self.checked,
                "violations": self.violations, "unverifiable": self.unverifiable}


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


# ------------------------------------------------------------------- models


@dataclass(frozen=True)
class EulerData:
    """``E = sum d_ab x^a d_b + sum r^a d_a`` with weights ``D`` (metric) and ``d0`` (product)."""

    d: tuple[tuple[Fraction, ...], ...]
    r: tuple[Fraction, ...]
    D: Fraction
    d0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(tuple(as_rational(x) for x in row) for row in self.d))
        object.__setattr__(self, "r", tuple(as_rational(x) for x in self.r))
        object.__setattr__(self, "D", as_rational(self.D))
        object.__setattr__(self, "d0", as_rational(self.d0))
        n = len(self.d)
        if any(len(row) != n for row in self.d) or len(self.r) != n:
            raise ValueError("Euler data must match the basis dimension")

    def scaled(self, k) -> "EulerData":
        k = as_rational(k)
        return EulerData(tuple(tuple(x * k for x in row) for row in self.d),
                         tuple(x * k for x in self.r), self.D * k, self.d0 * k)


class FrobeniusModel:
    def __init__(self, basis: GradedBasis, metric: Metric, correlators: CorrelatorFamily,
                 euler: EulerData | None = None, identity: int | None = None):
        if metric.dimension != basis.dimension or correlators.dimension != basis.dimension:
            raise ValueError("basis, metric and correlators disagree on the dimension")
        if tuple(metric.parity) != basis.parity:
            raise ValueError("metric parity does not match the basis")
        if identity is not None:
            if not 0 <= identity < basis.dimension:
                raise ValueError("identity index out of range")
            if basis.parity[identity]:
                raise ValueError("the identity must be even")
        if euler is not None:
            if len(euler.d) != basis.dimension:
                raise ValueError("Euler data must match the basis dimension")
            if not conformality_holds(metric, euler):
                raise ValueError("Euler data is not conformal for this metric")
        self.basis = basis
        self.metric = metric
        self.correlators = correlators
        self.euler = euler
        self.identity = identity

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    @property
    def truncation(self) -> int:
        return self.correlators.truncation

    def Y(self, index: Sequence[int]):
        return self.correlators.get(index)

    def with_correlators(self, correlators: CorrelatorFamily) -> "FrobeniusModel":
        return FrobeniusModel(self.basis, self.metric, correlators, self.euler, self.identity)

    def truncated(self, N: int) -> "FrobeniusModel":
        return self.with_correlators(self.correlators.truncated(N))

    def __repr__(self):
        return (f"FrobeniusModel(dim={self.dimension}, N={self.truncation}, "
                f"euler={'yes' if self.euler else 'no'}, identity={self.identity})")


def conformality_holds(metric: Metric, euler: EulerData) -> bool:
    return not conformality_violations(metric, euler)


def conformality_violations(metric: Metric, euler: EulerData) -> list[tuple[int, int]]:
    g, d = metric.g, euler.d
    r = len(g)
    bad = []
    for a in range(r):
        for b in range(r):
            lhs = sum((d[a][c] * g[c][b] for c in range(r)), ZERO) + sum((d[b][c] * g[a][c] for c in range(r)), ZERO)
            if lhs != euler.D * g[a][b]:
                bad.append((a, b))
    return bad


def conformality_check(model: FrobeniusModel) -> Report:
    rep = Report("conformality")
    if model.euler is None:
        rep.unverifiable.append("no Euler data")
        return rep
    for a, b in itertools.product(range(model.dimension), repeat=2):
        rep.checked += 1
    for a, b in conformality_violations(model.metric, model.euler):
        rep.violation({"a": a, "b": b}, "d.g + (d.g)^T", "D g")
    return rep


def v_operator(metric: Metric, euler: EulerData) -> list[list[Fraction]]:
    """Matrix of ``V(X) = [X, E] - (D/2) X``; column ``a`` is the image of ``d_a``."""
    r = metric.dimension
    half = euler.D / 2
    return [[euler.d[a][b] - (half if a == b else 0) for a in range(r)] for b in range(r)]


def v_is_skew(metric: Metric, euler: EulerData) -> bool:
    """``g(V x, y) + g(x, V y) = 0`` for all basis vectors."""
    V = v_operator(metric, euler)
    g = metric.g
    r = metric.dimension
    for a in range(r):
        for b in range(r):
            s = sum((V[c][a] * g[c][b] for c in range(r)), ZERO) + sum((g[a][c] * V[c][b] for c in range(r)), ZERO)
            if s != 0:
                return False
    return True


# --------------------------------------------------------------------- WDVV


def _parity_sum(parity, idx) -> int:
    return sum(parity[a] for a in idx) % 2


def _wdvv_side(model: FrobeniusModel, B: Sequence[int], a: int, b: int, c: int, d: int):
    """``d_B (sum_ef Phi_abe g^ef Phi_fcd)`` at the origin, by the graded Leibniz rule."""
    parity = model.basis.parity
    F = model.correlators
    m = len(B)
    total = ZERO
    pairs = model.metric.inverse_pairs()
    for mask in range(1 << m):
        I = [B[i] for i in range(m) if mask >> i & 1]
        J = [B[i] for i in range(m) if not mask >> i & 1]
        order = [i for i in range(m) if mask >> i & 1] + [i for i in range(m) if not mask >> i & 1]
        eps = koszul_sign(order, [parity[x] for x in B])
        for e, f, ginv in pairs:
            left = F.get(I + [a, b, e])
            if left == 0:
                continue
            right = F.get(J + [f, c, d])
            if right == 0:
                continue
            # d_J passes Phi_abe
            sgn = eps * (-1 if (_parity_sum(parity, J) * _parity_sum(parity, (a, b, e))) % 2 else 1)
            total = total + sgn * ginv * left * right
    return total


def wdvv_check(model: FrobeniusModel) -> Report:
    """Taylor coefficients of the WDVV equations, for every x-degree the truncation sees."""
    rep = Report("wdvv")
    r = model.dimension
    parity = model.basis.parity
    N = model.truncation
    for m in range(0, N - 2):
        for B in itertools.combinations_with_replacement(range(r), m):
            if any(parity[x] and B.count(x) > 1 for x in B):
                continue
            for a, b, c, d in itertools.product(range(r), repeat=4):
                if (_parity_sum(parity, B) + parity[a] + parity[b] + parity[c] + parity[d]) % 2:
                    continue
                lhs = _wdvv_side(model, B, a, b, c, d)
                sign = -1 if (parity[a] * (parity[b] + parity[c])) % 2 else 1
                rhs = sign * _wdvv_side(model, B, b, c, a, d)
                rep.checked += 1
                if lhs != rhs:
                    rep.violation({"x_degree": list(B), "indices": [a, b, c, d]}, lhs, rhs)
    rep.unverifiable.append(f"x-degree >= {N - 2} needs Y_{N + 1} and beyond")
    return rep


# ---------------------------------------------------------------- coherence


def _pairings(i, j, k, l):
    return [((i, j), (k, l)), ((i, k), (j, l)), ((i, l), (j, k))]


def _coherence_sum(model: FrobeniusModel, idx: Sequence[int], left: tuple[int, int], right: tuple[int, int]):
    parity = model.basis.parity
    n = len(idx)
    rest = [p for p in range(n) if p not in left and p not in right]
    pairs = model.metric.inverse_pairs()
    F = model.correlators
    total = ZERO
    for mask in range(1 << len(rest)):
        S1 = sorted(list(left) + [rest[i] for i in range(len(rest)) if mask >> i & 1])
        S2 = sorted(list(right) + [rest[i] for i in range(len(rest)) if not mask >> i & 1])
        eps = koszul_sign(S1 + S2, [parity[x] for x in idx])
        g1 = [idx[p] for p in S1]
        g2 = [idx[p] for p in S2]
        for a, b, ginv in pairs:
            y1 = F.get(g1 + [a])
            if y1 == 0:
                continue
            y2 = F.get([b] + g2)
            if y2 != 0:
                total = total + eps * ginv * y1 * y2
    return total


def coherence_check(model: FrobeniusModel) -> Report:
    """The partition-sum coherence identity for every arity ``4 <= n <= N``.

    ``Y_{|S_i|+1}`` never exceeds ``Y_{n-1}``, so every arity up to ``N + 1`` is
    in reach; we check up to ``N + 1`` to match the WDVV coefficient range.
    """
    rep = Report("coherence")
    r = model.dimension
    parity = model.basis.parity
    for n in range(4, model.truncation + 2):
        for key in itertools.combinations_with_replacement(range(r), n):
            if any(parity[x] and key.count(x) > 1 for x in key) or _parity_sum(parity, key):
                continue
            for quad in itertools.combinations(range(n), 4):
                sums = [_coherence_sum(model, key, L, R) for L, R in _pairings(*quad)]
                rep.checked += 1
                for s, (L, R) in zip(sums[1:], _pairings(*quad)[1:]):
                    if s != sums[0]:
                        rep.violation({"n": n, "index": list(key), "quadruple": list(quad),
                                       "pairing": [list(L), list(R)]}, sums[0], s)
    return rep


# ------------------------------------------------------ operadic correlators


class ArityError(TruncationError):
    """A vertex of the tree needs a correlator beyond the truncation."""


def _check_arity(model: FrobeniusModel, tree: StableTree):
    for v in tree.vertices():
        if tree.valence(v) > model.truncation:
            raise ArityError(f"vertex of valence {tree.valence(v)} exceeds truncation {model.truncation}")


def _tail_index(tree: StableTree, index: Sequence[int]) -> dict[int, int]:
    labels = sorted(tree.labels)
    if len(index) != len(labels):
        raise ValueError(f"tree has {len(labels)} tails, got {len(index)} indices")
    return dict(zip(labels, index))


def operadic_correlator(model: FrobeniusModel, tree: StableTree, index: Sequence[int]):
    """``Y(tau)`` on ``d_{a_1} (x) ... (x) d_{a_n}``; ``a_i`` sits on the i-th smallest tail label."""
    _check_arity(model, tree)
    if model.basis.is_even:
        return _operadic_even(model, tree, _tail_index(tree, index))
    return operadic_correlator_bruteforce(model, tree, index)


def _operadic_even(model: FrobeniusModel, tree: StableTree, at: dict[int, int]):
    r = model.dimension
    ginv = model.metric.g_inv
    F = model.correlators

    def value(v) -> list:
        # vector over the index q on the half-edge above v (length 1 at the root)
        tails = [at[x] for x in sorted(tree.tails_at(v))]
        kids = tree.children(v)
        msgs = []
        for c in kids:
            below = value(c)
            msgs.append([sum((ginv[p][q] * below[q] for q in range(r) if ginv[p][q] and below[q] != 0), ZERO)
                         for p in range(r)])
        tops = [None] if v is None else list(range(r))
        out = []
        for q in tops:
            tot = ZERO
            for ps in itertools.product(*[[p for p in range(r) if m[p] != 0] for m in msgs]):
                y = F.get(tails + list(ps) + ([] if q is None else [q]))
                if y == 0:
                    continue
                w = y
                for m, p in zip(msgs, ps):
                    w = w * m[p]
                tot = tot + w
            out.append(tot)
        return out

    return value(None)[0]


def operadic_correlator_bruteforce(model: FrobeniusModel, tree: StableTree, index: Sequence[int]):
    """Direct sum over all half-edge indices with Koszul signs (works for odd bases)."""
    _check_arity(model, tree)
    at = _tail_index(tree, index)
    parity = model.basis.parity
    r = model.dimension
    ginv = model.metric.g_inv
    edges = sorted(tree.splits, key=lambda A: (len(A), sorted(A)))
    tails = sorted(tree.labels)
    # reference order: tails, then p_1 q_1 p_2 q_2 ...
    pos = {("t", x): i for i, x in enumerate(tails)}
    for k, A in enumerate(edges):
        pos[("e", A, 0)] = len(tails) + 2 * k
        pos[("e", A, 1)] = len(tails) + 2 * k + 1
    blocks = [tree.vertex_flags(v) for v in tree.vertices()]
    order = [pos[f] for blk in blocks for f in blk]
    total = ZERO
    for assignment in itertools.product(range(r), repeat=2 * len(edges)):
        weight = ONE
        for k in range(len(edges)):
            p, q = assignment[2 * k], assignment[2 * k + 1]
            weight = weight * ginv[p][q]
            if weight == 0:
                break
        if weight == 0:
            continue
        seq = [at[x] for x in tails] + list(assignment)
        sign = koszul_sign(order, [parity[a] for a in seq])
        prod: Any = weight * sign
        for blk in blocks:
            y = model.correlators.get([seq[pos[f]] for f in blk])
            if y == 0:
                prod = 0
                break
            prod = prod * y
        if prod != 0:
            total = total + prod
    return total


def operadic_sum(model: FrobeniusModel, trees, index: Sequence[int]):
    """Linear extension of ``Y`` to tree sums ``[(tree, coeff)]``."""
    total = ZERO
    for t, c in trees:
        total = total + c * operadic_correlator(model, t, index)
    return total


# ------------------------------------------------------------ flat identity


def flat_identity_check(model: FrobeniusModel, identity: int | None = None) -> Report:
    rep = Report("flat_identity")
    e = model.identity if identity is None else identity
    if e is None:
        rep.unverifiable.append("no identity index")
        return rep
    r = model.dimension
    g = model.metric.g
    for a in range(r):
        for b in range(a, r):
            rep.checked += 1
            y = model.Y([a, b, e])
            if y != g[a][b]:
                rep.violation({"n": 3, "index": [a, b, e]}, y, g[a][b])
    for n in range(4, model.truncation + 1):
        rep.checked += 1
        for key, value in model.correlators.items(n):
            if e in key:
                rep.violation({"n": n, "index": list(key)}, value, 0)
    return rep


# ---------------------------------------------------------- quasi-homogeneity


def _euler_lhs(model: FrobeniusModel, idx: Sequence[int], Yfun, Yplus):
    eu = model.euler
    r = model.dimension
    total = ZERO
    for i, ai in enumerate(idx):
        for a in range(r):
            if eu.d[ai][a]:
                total = total + eu.d[ai][a] * Yfun(list(idx[:i]) + [a] + list(idx[i + 1:]))
    if Yplus is not None:
        for a in range(r):
            if eu.r[a]:
                total = total + eu.r[a] * Yplus(list(idx) + [a])
    return total


def quasi_homogeneity_check(model: FrobeniusModel) -> Report:
    """``sum_i d_{a_i a} Y_n(.. a ..) + r^a Y_{n+1}(.., a) = (d0 + D) Y_n`` for ``3 <= n <= N``."""
    rep = Report("quasi_homogeneity")
    eu = model.euler
    if eu is None:
        rep.unverifiable.append("no Euler data")
        return rep
    has_r = any(eu.r)
    F = model.correlators
    weight = eu.d0 + eu.D
    for n in range(3, model.truncation + 1):
        if has_r and n + 1 > model.truncation:
            rep.unverifiable.append(f"n={n}: the r-term needs Y_{n + 1}")
            continue
        for key in F.keys(n):
            lhs = _euler_lhs(model, key, F.get, F.get if has_r else None)
            rhs = weight * F.get(key)
            rep.checked += 1
            if lhs != rhs:
                rep.violation({"n": n, "index": list(key)}, lhs, rhs)
    return rep


def operadic_quasi_homogeneity_check(model: FrobeniusModel, tree: StableTree,
                                     indices: Iterable[Sequence[int]] | None = None) -> Report:
    """Tree version: includes ``-|E| d0 Y(tau)`` and the ``r``-term over ``pi^*(tau)``."""
    rep = Report("operadic_quasi_homogeneity")
    eu = model.euler
    if eu is None:
        rep.unverifiable.append("no Euler data")
        return rep
    has_r = any(eu.r)
    try:
        _check_arity(model, tree)
    except ArityError as exc:
        rep.unverifiable.append(str(exc))
        return rep
    new = max(tree.labels) + 1
    pulled = list(pullback(tree, new)) if has_r else []
    if has_r:
        try:
            for t, _ in pulled:
                _check_arity(model, t)
        except ArityError as exc:
            rep.unverifiable.append(f"r-term: {exc}")
            return rep
    Yt = lambda idx: operadic_correlator(model, tree, idx)
    Yp = (lambda idx: operadic_sum(model, pulled, idx)) if has_r else None
    r = model.dimension
    if indices is None:
        indices = itertools.product(range(r), repeat=tree.n)
    for idx in indices:
        idx = list(idx)
        val = Yt(idx)
        lhs = _euler_lhs(model, idx, Yt, Yp) - tree.num_edges * eu.d0 * val
        rhs = (eu.d0 + eu.D) * val
        rep.checked += 1
        if lhs != rhs:
            rep.violation({"tree": tree.to_text(), "index": idx}, lhs, rhs)
    return rep


def identity_pushforward_check(model: FrobeniusModel, tree: StableTree,
                               indices: Iterable[Sequence[int]] | None = None) -> Report:
    """``Y(tau)(.., d_0)`` on the largest tail equals ``Y(pi_* tau)`` on the others."""
    rep = Report("identity_pushforward")
    e = model.identity
    if e is None:
        rep.unverifiable.append("no identity index")
        return rep
    last = max(tree.labels)
    forgotten = list(pushforward(tree, last))
    r = model.dimension
    if indices is None:
        indices = itertools.product(range(r), repeat=tree.n - 1)
    for idx in indices:
        idx = list(idx)
        lhs = operadic_correlator(model, tree, idx + [e])
        rhs = operadic_sum(model, forgotten, idx)
        rep.checked += 1
        if lhs != rhs:
            rep.violation({"tree": tree.to_text(), "index": idx}, lhs, rhs)
    return rep


def class_invariance_check(model: FrobeniusModel, n: int) -> Report:
    """Operadic correlators respect the Keel relations among boundary divisors."""
    rep = Report("class_invariance")
    labels = list(range(1, n + 1))
    r = model.dimension
    for i, j, k, l in itertools.combinations(labels, 4):
        rest = [x for x in labels if x not in (i, j, k, l)]
        sides = {}
        for pair in ((j,), (k,)):
            trees = []
            for m in range(len(rest) + 1):
                for extra in itertools.combinations(rest, m):
                    trees.append((StableTree.from_splits(labels, [{i, pair[0], *extra}]), ONE))
            sides[pair] = trees
        for idx in itertools.product(range(r), repeat=n):
            a = operadic_sum(model, sides[(j,)], idx)
            b = operadic_sum(model, sides[(k,)], idx)
            rep.checked += 1
            if a != b:
                rep.violation({"quadruple": [i, j, k, l], "index": list(idx)}, a, b)
    return rep


# ----------------------------------------------------------- higher products


def higher_product(model: FrobeniusModel, vectors: Sequence[Sequence]) -> list:
    """``circ_n(gamma_1..gamma_n)`` defined by ``g(circ_n(gammas), gamma') = Y_{n+1}``."""
    n = len(vectors)
    if n + 1 > model.truncation:
        raise TruncationError(f"circ_{n} needs Y_{n + 1} beyond truncation {model.truncation}")
    if n < 2:
        raise ValueError("higher products start at n = 2")
    r = model.dimension
    ginv = model.metric.g_inv
    dual = [ZERO] * r  # dual[b] = Y_{n+1}(gammas, d_b)
    supports = [[(a, as_rational(c) if isinstance(c, (int, str)) else c) for a, c in enumerate(v) if c != 0]
                for v in vectors]
    for combo in itertools.product(*supports):
        coeff = ONE
        idx = []
        for a, c in combo:
            coeff = coeff * c
            idx.append(a)
        for b in range(r):
            y = model.Y(idx + [b])
            if y != 0:
                dual[b] = dual[b] + coeff * y
    return [sum((dual[b] * ginv[b][c] for b in range(r) if dual[b] != 0), ZERO) for c in range(r)]


# ------------------------------------------------------------- factories


def unit_model(N: int = 7) -> FrobeniusModel:
    """The one-dimensional cubic theory ``Phi = x^3/6`` with ``E = x d``."""
    basis = GradedBasis.even(1)
    F = CorrelatorFamily(basis, N, {3: {(0, 0, 0): ONE}})
    return FrobeniusModel(basis, Metric.identity(1), F,
                          EulerData(((ONE,),), (ZERO,), Fraction(2), ONE), identity=0)


def rank_one_model(coeffs: Sequence, N: int | None = None, euler: EulerData | None = None) -> FrobeniusModel:
    """``Phi = sum_n C_n x^n / n!`` with ``coeffs = [C_3, C_4, ...]`` and ``g = 1``."""
    N = N if N is not None else len(coeffs) + 2
    basis = GradedBasis.even(1)
    tensors = {}
    for n, c in enumerate(coeffs, start=3):
        if n <= N:
            tensors[n] = {(0,) * n: as_rational(c) if isinstance(c, (int, str)) else c}
    return FrobeniusModel(basis, Metric.identity(1), CorrelatorFamily(basis, N, tensors), euler)


def flat_identity_plane(f_coeffs: dict[int, Any], N: int, euler: EulerData | None = None) -> FrobeniusModel:
    """``Phi = x0^2 x1 / 2 + f(x1)`` with ``f = sum_k f_k x1^k / k!`` on ``g = [[0,1],[1,0]]``."""
    basis = GradedBasis.even(2)
    metric = Metric.from_rows([[0, 1], [1, 0]])
    tensors: dict[int, dict] = {3: {(0, 0, 1): ONE}}
    for k, c in f_coeffs.items():
        if 3 <= k <= N and c != 0:
            tensors.setdefault(k, {})[(1,) * k] = as_rational(c) if isinstance(c, (int, str)) else c
    return FrobeniusModel(basis, metric, CorrelatorFamily(basis, N, tensors), euler, identity=0)


def monomial_plane(c, k: int, N: int) -> FrobeniusModel:
    """``f = c x1^k / k!`` with its Euler field ``x0 d0 + 2/(k-1) x1 d1`` (``d0 = 1``)."""
    if k < 3:
        raise ValueError("k >= 3")
    alpha = Fraction(2, k - 1)
    eu = EulerData(((ONE, ZERO), (ZERO, alpha)), (ZERO, ZERO), 1 + alpha, ONE)
    return flat_identity_plane({k: c}, N, eu)


def exponential_plane(c, N: int) -> FrobeniusModel:
    """``f = c e^{x1}`` (the quantum cohomology of P^1 for ``c = 1``), ``E = x0 d0 + 2 d1``."""
    eu = EulerData(((ONE, ZERO), (ZERO, ZERO)), (ZERO, Fraction(2)), ONE, ONE)
    return flat_identity_plane({k: c for k in range(3, N + 1)}, N, eu)


def constant_algebra_model(structure: dict[tuple[int, int, int], Any], metric: Metric, N: int = 3,
                           identity: int | None = None) -> FrobeniusModel:
    """A model with only ``Y_3`` (a Frobenius algebra given by its cubic form)."""
    basis = GradedBasis(tuple(metric.parity))
    F = CorrelatorFamily.from_values(basis, N, structure.items())
    return FrobeniusModel(basis, metric, F, identity=identity)
