"""Semisimple points: idempotents, canonical coordinates, special initial conditions.

Numerics are double-precision complex and stay inside this module.  Most
routines are written over a generic scalar type, so the same code runs on
Fractions, complex numbers or sympy expressions; only the diagonalisation
itself is numeric (with an exact variant for rational spectra).

Conventions.  For a tame semisimple point with idempotents ``e_i``,
``eta_i = g(e_i, e_i)`` and ``E = sum u^i e_i``.  The operator
``V(X) = [X^flat, E] - (D/2) X`` is written ``V(e_i) = sum_j v_ij e_j``; its
skew-symmetry for the diagonal metric reads ``v_ij eta_j + v_ji eta_i = 0``.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .frobenius import EulerData, FrobeniusModel, v_operator
from .series import ONE, ZERO, CorrelatorFamily, GradedBasis, Metric, shift_correlators

DEFAULT_TOL = 1e-10


class NonSemisimpleError(ValueError):
    """The multiplication at the point is not semisimple."""


class NonTameError(ValueError):
    """Canonical coordinates collide."""

    def __init__(self, message: str, collisions=()):
        super().__init__(message)
        self.collisions = list(collisions)


# ------------------------------------------------------------ linear algebra


def _is_numeric(x) -> bool:
    return isinstance(x, (float, complex, np.floating, np.complexfloating))


def mat_mul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), ZERO) for j in range(len(B[0]))]
            for i in range(len(A))]


def mat_vec(A, v):
    return [sum((A[i][k] * v[k] for k in range(len(v))), ZERO) for i in range(len(A))]


def solve(A, b):
    """Gaussian elimination over any field (partial pivoting on numeric input)."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        cands = [r for r in range(col, n) if M[r][col] != 0]
        if not cands:
            raise ZeroDivisionError("singular matrix")
        piv = max(cands, key=lambda r: abs(M[r][col])) if _is_numeric(M[col][col]) or any(
            _is_numeric(M[r][col]) for r in cands) else cands[0]
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col] / p
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    x = [ZERO] * n
    for i in reversed(range(n)):
        s = M[i][n] - sum((M[i][k] * x[k] for k in range(i + 1, n)), ZERO)
        x[i] = s / M[i][i]
    return x


def inverse(A):
    n = len(A)
    cols = [solve(A, [ONE if i == j else ZERO for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(r) for r in zip(*A)]


# ------------------------------------------------------- algebra at a point


def structure_at(model: FrobeniusModel, point: Sequence | None = None):
    """Correlators re-expanded at ``point`` (numeric, truncated) or at the origin."""
    if point is None or not any(x != 0 for x in point):
        return model.correlators
    shift = {a: x for a, x in enumerate(point) if x != 0}
    return shift_correlators(model.correlators, shift)


def product_tensor(model: FrobeniusModel, F: CorrelatorFamily | None = None):
    """``C[a][b][c]``: ``d_a o d_b = sum_c C[a][b][c] d_c``."""
    F = F or model.correlators
    r = model.dimension
    ginv = model.metric.g_inv
    C = [[[ZERO] * r for _ in range(r)] for _ in range(r)]
    for a, b, e in itertools.product(range(r), repeat=3):
        y = F.get([a, b, e])
        if y != 0:
            for c in range(r):
                if ginv[e][c]:
                    C[a][b][c] = C[a][b][c] + y * ginv[e][c]
    return C


def multiply(C, u, v):
    r = len(C)
    out = [ZERO] * r
    for a in range(r):
        if u[a] == 0:
            continue
        for b in range(r):
            if v[b] == 0:
                continue
            w = u[a] * v[b]
            for c in range(r):
                if C[a][b][c] != 0:
                    out[c] = out[c] + w * C[a][b][c]
    return out


def triple_product(model: FrobeniusModel, u, v, w, F: CorrelatorFamily | None = None):
    """``o_3(u, v, w)`` from ``Y_4``."""
    F = F or model.correlators
    r = model.dimension
    ginv = model.metric.g_inv
    dual = [ZERO] * r
    for a, b, c in itertools.product(range(r), repeat=3):
        coeff = u[a] * v[b] * w[c]
        if coeff == 0:
            continue
        for e in range(r):
            y = F.get([a, b, c, e])
            if y != 0:
                dual[e] = dual[e] + coeff * y
    return [sum((dual[e] * ginv[e][c] for e in range(r) if dual[e] != 0), ZERO) for c in range(r)]


def bilinear(g, u, v):
    r = len(g)
    return sum((u[a] * g[a][b] * v[b] for a in range(r) for b in range(r) if g[a][b]), ZERO)


def euler_vector(euler: EulerData, point: Sequence | None):
    r = len(euler.r)
    vec = list(euler.r)
    if point is not None:
        for a in range(r):
            if point[a] != 0:
                for b in range(r):
                    if euler.d[a][b]:
                        vec[b] = vec[b] + euler.d[a][b] * point[a]
    return vec


# ------------------------------------------------------------ point data


@dataclass
class SemisimplePointData:
    u: list
    eta: list
    idempotents: list          # idempotents[i] = flat coordinates of e_i
    residual: float = 0.0
    first_order: list | None = None  # first_order[i][a] = d_a e_i (flat coordinates)

    @property
    def dimension(self) -> int:
        return len(self.u)

    def frame(self):
        """Matrix with the idempotents as columns."""
        return transpose(self.idempotents)

    def lambdas(self):
        """``lam[i][a]`` with ``d_a = sum_i lam[i][a] e_i``."""
        return inverse(self.frame())


@dataclass
class SpecialInitialConditions:
    u: list
    eta: list
    v: list  # v[i][j]: V(e_i) = sum_j v[i][j] e_j

    @property
    def dimension(self) -> int:
        return len(self.u)

    def v_matrix(self):
        """Matrix of V acting on e-frame column vectors (column i = V(e_i))."""
        n = self.dimension
        return [[self.v[i][j] for i in range(n)] for j in range(n)]

    def to_json(self) -> dict:
        return {"u": [_cjson(x) for x in self.u], "eta": [_cjson(x) for x in self.eta],
                "v": [[_cjson(x) for x in row] for row in self.v],
                "A": [[[_cjson(x) for x in row] for row in A] for A in schlesinger_matrices(self)]}


def _cjson(x):
    z = complex(x)
    return {"re": z.real + 0.0, "im": z.imag + 0.0}  # no signed zeros in output


def tameness_collisions(u: Sequence, tol: float = DEFAULT_TOL, labels=None) -> list:
    n = len(u)
    labels = labels or list(range(n))
    numeric = all(isinstance(x, (int, float, complex, Fraction)) or _is_numeric(x) for x in u)
    if numeric:
        scale = max((abs(complex(x)) for x in u), default=0.0) or 1.0
        return [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)
                if abs(complex(u[i]) - complex(u[j])) <= tol * scale]
    return [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n) if u[i] == u[j]]


def _matrix_np(C, v):
    r = len(C)
    return np.array([[sum(complex(v[a]) * complex(C[a][b][c]) for a in range(r)) for b in range(r)]
                     for c in range(r)], dtype=complex)


def diagonalize_at_point(model: FrobeniusModel, point: Sequence | None = None,
                         rng: random.Random | None = None, tol: float = DEFAULT_TOL,
                         retries: int = 8) -> SemisimplePointData:
    """Idempotents via a random generic element of the algebra; numeric."""
    rng = rng or random.Random(0)
    F = structure_at(model, point)
    C = product_tensor(model, F)
    r = model.dimension
    g = np.array([[complex(x) for x in row] for row in model.metric.g])
    Ls = [_matrix_np(C, [1 if b == a else 0 for b in range(r)]) for a in range(r)]
    scale = max(1.0, max(float(np.abs(L).max()) for L in Ls))
    for _ in range(retries):
        w = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(r)]
        Lw = sum(wa * L for wa, L in zip(w, Ls))
        vals, vecs = np.linalg.eig(Lw)
        gaps = [abs(vals[i] - vals[j]) for i in range(r) for j in range(i + 1, r)]
        if gaps and min(gaps) <= 1e3 * tol * max(scale, float(np.abs(vals).max())):
            continue
        if np.linalg.cond(vecs) > 1e8:
            continue
        idem = []
        for i in range(r):
            x = vecs[:, i]
            xx = np.array([complex(c) for c in multiply(C, list(x), list(x))])
            c = np.vdot(x, xx) / np.vdot(x, x)
            if abs(c) <= tol * scale or np.linalg.norm(xx - c * x) > 1e-6 * np.linalg.norm(xx):
                raise NonSemisimpleError("multiplication has a nilpotent direction")
            idem.append(x / c)
        residual = 0.0
        for i in range(r):
            for j in range(r):
                p = np.array([complex(c) for c in multiply(C, list(idem[i]), list(idem[j]))])
                target = idem[i] if i == j else np.zeros(r)
                residual = max(residual, float(np.linalg.norm(p - target)))
        if residual > max(1e-8, 1e3 * tol) * scale:
            continue
        idem = _sort_frame(idem, model, point)
        eta = [complex(x @ g @ x) for x in idem]
        u = _canonical_u(model, point, idem)
        return SemisimplePointData(u, eta, [list(map(complex, x)) for x in idem], residual)
    # no generic vector separated the spectrum: decide between defective and degenerate
    raise NonSemisimpleError("no generic element with simple spectrum and idempotent eigenbasis")


def _canonical_u(model, point, idem):
    r = model.dimension
    if model.euler is None:
        return [0j] * r
    E = [complex(x) for x in euler_vector(model.euler, point)]
    P = np.array(idem).T
    return [complex(x) for x in np.linalg.solve(P, np.array(E))]


def _sort_frame(idem, model, point):
    u = _canonical_u(model, point, idem)
    order = sorted(range(len(idem)), key=lambda i: (round(u[i].real, 9), round(u[i].imag, 9)))
    return [idem[i] for i in order]


def diagonalize_exact(model: FrobeniusModel) -> SemisimplePointData:
    """Exact idempotents at the origin when the algebra splits over Q."""
    import sympy

    r = model.dimension
    C = product_tensor(model)
    generic = [Fraction(k + 2, 3 + k * k) for k in range(r)]
    L = sympy.Matrix(r, r, lambda c, b: sympy.Rational(
        sum((generic[a] * C[a][b][c] for a in range(r)), ZERO)))
    idem = []
    for val, mult, vecs in L.eigenvects():
        if not val.is_rational:
            raise NonSemisimpleError("spectrum is not rational; use diagonalize_at_point")
        if mult != 1 or len(vecs) != 1:
            raise NonSemisimpleError("generic element has a repeated eigenvalue")
        x = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in vecs[0]]
        xx = multiply(C, x, x)
        k = next(i for i in range(r) if x[i] != 0)
        c = xx[k] / x[k]
        if c == 0 or any(xx[i] != c * x[i] for i in range(r)):
            raise NonSemisimpleError("multiplication has a nilpotent direction")
        idem.append([xi / c for xi in x])
    g = model.metric.g
    eta = [bilinear(g, e, e) for e in idem]
    if model.euler is not None:
        E = euler_vector(model.euler, None)
        u = solve(transpose(idem), E)
    else:
        u = [ZERO] * r
    order = sorted(range(r), key=lambda i: u[i])
    return SemisimplePointData([u[i] for i in order], [eta[i] for i in order], [idem[i] for i in order])


# --------------------------------------------------- first-order expansion


def first_order_idempotents(model: FrobeniusModel, data: SemisimplePointData,
                            F: CorrelatorFamily | None = None) -> list:
    """``d_a e_i`` from ``(1 - 2 L_{e_i}) e_i^a = o_3(e_i, e_i, d_a)``."""
    if model.truncation < 4:
        raise ValueError("first-order data needs Y_4")
    F = F or model.correlators
    C = product_tensor(model, F)
    r = model.dimension
    out = []
    for e in data.idempotents:
        L = [[sum((e[a] * C[a][b][c] for a in range(r)), ZERO) for b in range(r)] for c in range(r)]
        A = [[(ONE if b == c else ZERO) - 2 * L[c][b] for b in range(r)] for c in range(r)]
        rows = []
        for a in range(r):
            unit = [ONE if b == a else ZERO for b in range(r)]
            rows.append(solve(A, triple_product(model, e, e, unit, F)))
        out.append(rows)
    data.first_order = out
    return out


def eta_derivatives(model: FrobeniusModel, data: SemisimplePointData) -> list:
    """``deta[i][a] = d_a eta_i = 2 g(e_i^a, e_i)``."""
    if data.first_order is None:
        raise ValueError("compute first-order idempotents first")
    g = model.metric.g
    return [[2 * bilinear(g, data.first_order[i][a], data.idempotents[i]) for a in range(model.dimension)]
            for i in range(data.dimension)]


def eta_frame_derivatives(model: FrobeniusModel, data: SemisimplePointData) -> list:
    """``eta_ij = e_j(eta_i)``."""
    de = eta_derivatives(model, data)
    r = model.dimension
    return [[sum((data.idempotents[j][a] * de[i][a] for a in range(r)), ZERO) for j in range(data.dimension)]
            for i in range(data.dimension)]


# ---------------------------------------------------- special initial data


def v_in_frame(model: FrobeniusModel, data: SemisimplePointData) -> list:
    """``v[i][j]`` from ``V(e_i) = [e_i^flat, E] - (D/2) e_i``."""
    if model.euler is None:
        raise ValueError("special initial conditions need Euler data")
    V = v_operator(model.metric, model.euler)
    P = data.frame()
    Pinv = inverse(P)
    W = mat_mul(Pinv, mat_mul(V, P))  # column i = V(e_i) in the e-frame
    n = data.dimension
    return [[W[j][i] for j in range(n)] for i in range(n)]


def v_from_rotation(u, eta, eta_ij) -> list:
    """``v_ij = (u^j - u^i) eta_ij / (2 eta_j)`` with ``eta_ij = e_j(eta_i)``."""
    n = len(u)
    return [[ZERO if i == j else (u[j] - u[i]) * eta_ij[i][j] / (2 * eta[j]) for j in range(n)]
            for i in range(n)]


def v_printed(u, eta, eta_ij) -> list:
    """``(u^i - u^j) eta_ij / eta_i`` without the factor 1/2 (kept for comparison)."""
    n = len(u)
    return [[ZERO if i == j else (u[i] - u[j]) * eta_ij[i][j] / eta[i] for j in range(n)]
            for i in range(n)]


def special_init(model: FrobeniusModel, point: Sequence | None = None, rng: random.Random | None = None,
                 tol: float = DEFAULT_TOL, exact: bool = False, method: str = "auto") -> SpecialInitialConditions:
    """``(u, eta, v)`` at a tame semisimple point.

    ``method="rotation"`` uses first-order idempotents (needs ``Y_4``),
    ``"flat"`` reads ``V`` off the Euler data; ``"auto"`` picks rotation when
    ``Y_4`` is available and cross-checks it against the flat route.
    """
    if model.euler is None:
        raise ValueError("special initial conditions need Euler data")
    data = diagonalize_exact(model) if exact else diagonalize_at_point(model, point, rng, tol)
    bad = tameness_collisions(data.u, tol)
    if bad:
        raise NonTameError(f"canonical coordinates collide at {bad}", bad)
    if method == "auto":
        method = "rotation" if model.truncation >= 4 else "flat"
    flat = v_in_frame(model, data)
    if method == "flat":
        v = flat
    elif method == "rotation":
        F = structure_at(model, point) if not exact else None
        first_order_idempotents(model, data, F)
        h = FirstOrderData(data.idempotents, data.first_order, data.eta, eta_derivatives(model, data)).eta_frame()
        v = v_from_rotation(data.u, data.eta, h)
        scale = max(1.0, max(abs(complex(x)) for row in flat for x in row))
        gap = max(abs(complex(a) - complex(b)) for ra, rb in zip(v, flat) for a, b in zip(ra, rb))
        # a truncated expansion away from the origin only agrees approximately
        if point is None and gap > max(1e-8, 1e3 * tol) * scale:
            raise ArithmeticError(f"rotation and flat routes disagree by {gap:.3g}")
    else:
        raise ValueError(f"unknown method {method!r}")
    for i in range(len(v)):
        v[i][i] = ZERO if exact else 0j
    return SpecialInitialConditions(data.u, data.eta, v)


def skewness_defect(S: SpecialInitialConditions) -> float:
    n = S.dimension
    return max((abs(complex(S.v[i][j] * S.eta[j] + S.v[j][i] * S.eta[i]))
                for i in range(n) for j in range(n)), default=0.0)


def schlesinger_matrices(S: SpecialInitialConditions) -> list:
    """``A_j = -(V + Id/2) P_j`` in the e-frame."""
    n = S.dimension
    Vm = S.v_matrix()
    half = Fraction(1, 2)
    out = []
    for j in range(n):
        A = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            A[i][j] = -(Vm[i][j] + (half if i == j else 0))
        out.append(A)
    return out


# ------------------------------------------------------------ tensor law


def tensor_special_init(S1: SpecialInitialConditions, S2: SpecialInitialConditions,
                        tol: float = DEFAULT_TOL, check_tame: bool = True) -> SpecialInitialConditions:
    """``u_ij = u'_i + u''_j``, ``eta_ij = eta'_i eta''_j``, ``v_{ij,kl} = d_jl v'_ik + d_ik v''_jl``."""
    n1, n2 = S1.dimension, S2.dimension
    idx = [(i, j) for i in range(n1) for j in range(n2)]
    u = [S1.u[i] + S2.u[j] for i, j in idx]
    if check_tame:
        bad = tameness_collisions(u, tol, labels=idx)
        if bad:
            raise NonTameError(f"tensor coordinates collide at {bad}", bad)
    eta = [S1.eta[i] * S2.eta[j] for i, j in idx]
    v = []
    for i, j in idx:
        row = []
        for k, l in idx:
            x = ZERO
            if j == l:
                x = x + S1.v[i][k]
            if i == k:
                x = x + S2.v[j][l]
            row.append(x)
        v.append(row)
    return SpecialInitialConditions(u, eta, v)


@dataclass
class FirstOrderData:
    """Idempotents ``e0[i]``, first-order terms ``e1[i][a]``, metric weights and their derivatives."""

    e0: list
    e1: list
    eta0: list
    deta: list  # deta[i][a] = d_a eta_i

    @property
    def lambdas(self):
        return inverse(transpose(self.e0))

    def eta_frame(self):
        """``eta_ij = e_j(eta_i)``."""
        n, r = len(self.e0), len(self.e0[0])
        return [[sum((self.e0[j][a] * self.deta[i][a] for a in range(r)), ZERO) for j in range(n)]
                for i in range(n)]


def _kron(x, y):
    return [a * b for a in x for b in y]


def idempotent_expansion_tensor(f1: FirstOrderData, f2: FirstOrderData) -> tuple[FirstOrderData, list]:
    """First-order idempotents and metric weights of the product, plus ``eta_{ij,kl}(0)``."""
    lam1, lam2 = f1.lambdas, f2.lambdas
    n1, n2 = len(f1.e0), len(f2.e0)
    r1, r2 = len(f1.e0[0]), len(f2.e0[0])
    idx = [(i, j) for i in range(n1) for j in range(n2)]
    dirs = [(a1, a2) for a1 in range(r1) for a2 in range(r2)]
    e0 = [_kron(f1.e0[i], f2.e0[j]) for i, j in idx]
    e1 = []
    deta = []
    for i, j in idx:
        rows, drow = [], []
        for a1, a2 in dirs:
            v1 = [lam2[j][a2] * x for x in _kron(f1.e1[i][a1], f2.e0[j])]
            v2 = [lam1[i][a1] * x for x in _kron(f1.e0[i], f2.e1[j][a2])]
            rows.append([x + y for x, y in zip(v1, v2)])
            drow.append(lam2[j][a2] * f1.deta[i][a1] * f2.eta0[j] + lam1[i][a1] * f1.eta0[i] * f2.deta[j][a2])
        e1.append(rows)
        deta.append(drow)
    eta0 = [f1.eta0[i] * f2.eta0[j] for i, j in idx]
    h1, h2 = f1.eta_frame(), f2.eta_frame()
    eta_kl = [[(h1[i][k] * f2.eta0[j] if j == l else ZERO) + (f1.eta0[i] * h2[j][l] if i == k else ZERO)
               for k, l in idx] for i, j in idx]
    return FirstOrderData(e0, e1, eta0, deta), eta_kl


def first_order_data(model: FrobeniusModel, data: SemisimplePointData) -> FirstOrderData:
    if data.first_order is None:
        first_order_idempotents(model, data)
    return FirstOrderData(data.idempotents, data.first_order, data.eta, eta_derivatives(model, data))


# ---------------------------------------------------------------- P^n data


def _zeta(n: int, k: int) -> complex:
    return cmath.exp(2j * math.pi * k / (n + 1))


def pn_special_init(n: int, x0: complex = 0, x1: complex = 0) -> SpecialInitialConditions:
    """Factor data of the quantum cohomology of ``P^n`` at ``(x0, x1, 0, ...)``."""
    k = n + 1
    u = [x0 + _zeta(n, i) * k * cmath.exp(x1 / k) for i in range(k)]
    eta = [_zeta(n, i) / k * cmath.exp(-x1 * n / k) for i in range(k)]
    v = [[0j if i == j else -_zeta(n, i - j) / (1 - _zeta(n, i - j)) for j in range(k)] for i in range(k)]
    return SpecialInitialConditions(u, eta, v)


def pn_pm_model(n: int, m: int, x00: complex = 0, x10: complex = 0, x01: complex = 0,
                tol: float = DEFAULT_TOL) -> SpecialInitialConditions:
    """Closed form for ``P^n x P^m`` at ``(x00, x10, x01, 0, ...)``; pairs ``(i, j)`` flattened."""
    idx = [(i, j) for i in range(n + 1) for j in range(m + 1)]
    u = [x00 + _zeta(n, i) * (n + 1) * cmath.exp(x10 / (n + 1)) + _zeta(m, j) * (m + 1) * cmath.exp(x01 / (m + 1))
         for i, j in idx]
    bad = tameness_collisions(u, tol, labels=idx)
    if bad:
        raise NonTameError(f"canonical coordinates collide at {bad}", bad)
    eta = [_zeta(n, i) * _zeta(m, j) / ((n + 1) * (m + 1)) * cmath.exp(-x10 * n / (n + 1) - x01 * m / (m + 1))
           for i, j in idx]
    v = []
    for i, j in idx:
        row = []
        for k, l in idx:
            x = 0j
            if j == l and i != k:
                x -= _zeta(n, i - k) / (1 - _zeta(n, i - k))
            if i == k and j != l:
                x -= _zeta(m, j - l) / (1 - _zeta(m, j - l))
            row.append(x)
        v.append(row)
    return SpecialInitialConditions(u, eta, v)


def qh_projective_model(n: int) -> FrobeniusModel:
    """Cubic part of the quantum cohomology of ``P^n`` at the origin, with its Euler field.

    ``Y_3(T_a, T_b, T_c) = 1`` iff ``a + b + c`` is ``n`` (classical) or ``2n + 1``
    (lines); the Euler field is ``sum (1 - a) x^a d_a + (n + 1) d_1``.
    """
    r = n + 1
    basis = GradedBasis.even(r)
    metric = Metric.from_rows([[int(a + b == n) for b in range(r)] for a in range(r)])
    tensors = {3: {key: ONE for key in itertools.combinations_with_replacement(range(r), 3)
                   if sum(key) in (n, 2 * n + 1)}}
    d = tuple(tuple(Fraction(1 - a) if a == b else ZERO for b in range(r)) for a in range(r))
    rvec = tuple(Fraction(n + 1) if a == 1 else ZERO for a in range(r))
    eu = EulerData(d, rvec, Fraction(2 - n), ONE)
    return FrobeniusModel(basis, metric, CorrelatorFamily(basis, 3, tensors), eu, identity=0)


P2_GW = {1: 1, 2: 1, 3: 12, 4: 620}


def qh_p2_model(N: int) -> FrobeniusModel:
    """Quantum cohomology of ``P^2`` truncated at arity ``N`` (exact for ``N <= 13``)."""
    if N > 13:
        raise ValueError("needs Gromov-Witten numbers beyond degree 4")
    basis = GradedBasis.even(3)
    metric = Metric.from_rows([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    tensors: dict[int, dict] = {3: {(0, 0, 2): ONE, (0, 1, 1): ONE}}
    for deg, count in P2_GW.items():
        k2 = 3 * deg - 1
        for k1 in range(0, N - k2 + 1):
            n = k1 + k2
            if n < 3:
                continue
            tensors.setdefault(n, {})[(1,) * k1 + (2,) * k2] = Fraction(count * deg ** k1)
    d = ((ONE, ZERO, ZERO), (ZERO, ZERO, ZERO), (ZERO, ZERO, Fraction(-1)))
    eu = EulerData(d, (ZERO, Fraction(3), ZERO), ZERO, ONE)
    return FrobeniusModel(basis, metric, CorrelatorFamily(basis, N, tensors), eu, identity=0)


def align(S: SpecialInitialConditions, reference: Sequence, tol: float = 1e-8) -> SpecialInitialConditions:
    """Reorder ``S`` so that ``S.u`` matches ``reference`` entry by entry."""
    perm = []
    for x in reference:
        k = min((i for i in range(S.dimension) if i not in perm), key=lambda i: abs(complex(S.u[i]) - complex(x)))
        if abs(complex(S.u[k]) - complex(x)) > tol * max(1.0, abs(complex(x))):
            raise ValueError("canonical coordinates do not match the reference")
        perm.append(k)
    return SpecialInitialConditions([S.u[i] for i in perm], [S.eta[i] for i in perm],
                                    [[S.v[i][j] for j in perm] for i in perm])


def max_difference(S1: SpecialInitialConditions, S2: SpecialInitialConditions) -> float:
    n = S1.dimension
    out = max(abs(complex(a) - complex(b)) for a, b in zip(S1.u + S1.eta, S2.u + S2.eta))
    return max([out] + [abs(complex(S1.v[i][j]) - complex(S2.v[i][j])) for i in range(n) for j in range(n)])
