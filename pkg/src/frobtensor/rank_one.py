"""One-dimensional theories and the U(eta) calculus.

A rank-one theory is ``Phi(x) = sum_{n>=3} C_n x^n / n!`` on a line with
``g(d, d) = 1``.  For ``C_3 = 1`` the U-transform inverts ``y = Phi''(x)``
as ``x = sum_n B_n y^{n+1} / (n+1)!`` and sets ``U(eta) = sum_n B_n eta^n``;
tensor products of theories multiply their U-series.

The rescaling ``C_n -> mu^{n-2} C_n`` commutes with tensoring (each factor
picks up ``mu^{n-2}`` on every tree), so invertible theories are normalised
with ``mu = 1/C_3``.  Arbitrary theories go through universal polynomials
``P_n``: the normalised tensor law with ``C_3`` powers restored by the
bidegree/bilength bookkeeping.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

from sympy import QQ
from sympy.polys.rings import ring

from .frobenius import Report, rank_one_model
from .series import ONE, ZERO, as_rational

# ------------------------------------------------------------ power series
# truncated series are lists of coefficients, index = power


def ps_mul(a: Sequence, b: Sequence, order: int) -> list:
    out = [ZERO] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            if y != 0:
                out[i + j] = out[i + j] + x * y
    return out


def ps_compose(f: Sequence, g: Sequence, order: int) -> list:
    """``f(g(y))`` for ``g(0) = 0``."""
    if g and g[0] != 0:
        raise ValueError("inner series must have no constant term")
    out = [ZERO] * (order + 1)
    power = [ONE] + [ZERO] * order
    for k, c in enumerate(f[: order + 1]):
        if k:
            power = ps_mul(power, g, order)
        if c != 0:
            out = [o + c * p for o, p in zip(out, power)]
    return out


def ps_reversion(f: Sequence, order: int) -> list:
    """Compositional inverse of ``f = y + O(y^2)`` up to ``y^order``."""
    f = list(f) + [ZERO] * (order + 1 - len(f))
    if f[0] != 0 or f[1] != 1:
        raise ValueError("series must start with y")
    h = [ZERO, ZERO] + f[2: order + 1]
    g = [ZERO, ONE] + [ZERO] * (order - 1)
    for _ in range(order):
        hg = ps_compose(h, g, order)
        g = [ZERO, ONE] + [ZERO] * (order - 1)
        g = [x - y for x, y in zip(g, hg)]
    return g


def ps_log1p(u: Sequence, order: int) -> list:
    """``log(U)`` for ``U = 1 + O(eta)``."""
    if u[0] != 1:
        raise ValueError("series must start with 1")
    w = [ZERO] + list(u[1: order + 1]) + [ZERO] * max(0, order + 1 - len(u))
    out = [ZERO] * (order + 1)
    power = [ONE] + [ZERO] * order
    for k in range(1, order + 1):
        power = ps_mul(power, w, order)
        sign = ONE if k % 2 else -ONE
        out = [o + sign * p / k for o, p in zip(out, power)]
    return out


# ------------------------------------------------------------------- types


@dataclass(frozen=True)
class RankOneTheory:
    """Coefficients ``(C_3, ..., C_N)``."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(as_rational(c) if isinstance(c, (int, str)) else c for c in self.coeffs)
        if not cs:
            raise ValueError("need at least C_3")
        object.__setattr__(self, "coeffs", cs)

    @property
    def N(self) -> int:
        return len(self.coeffs) + 2

    def C(self, n: int):
        return self.coeffs[n - 3] if 3 <= n <= self.N else ZERO

    @property
    def invertible(self) -> bool:
        c3 = self.coeffs[0]
        return isinstance(c3, Fraction) and c3 != 0

    def truncated(self, N: int) -> "RankOneTheory":
        return RankOneTheory(self.coeffs[: N - 2])

    def model(self, N: int | None = None):
        return rank_one_model(self.coeffs, N or self.N)


@dataclass(frozen=True)
class USeries:
    """``U(eta) = sum B_n eta^n`` with ``B_0 = 1``."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("U-series must start with 1")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other: "USeries") -> "USeries":
        k = min(self.order, other.order)
        return USeries(tuple(ps_mul(self.coeffs, other.coeffs, k)))

    def minus_log(self) -> list:
        return [-x for x in ps_log1p(self.coeffs, self.order)]


# ----------------------------------------------------------------- transform


def u_transform(theory: RankOneTheory) -> USeries:
    """U-series of a theory with ``C_3 = 1``, exact up to ``eta^{N-3}``."""
    if theory.coeffs[0] != 1:
        raise ValueError("u_transform needs C_3 = 1; normalise first")
    order = theory.N - 2  # y = Phi'' known up to x^{N-2}
    y = [ZERO] * (order + 1)
    for n in range(3, theory.N + 1):
        y[n - 2] = theory.C(n) / math.factorial(n - 2)
    x = ps_reversion(y, order)
    return USeries(tuple(x[m] * math.factorial(m) for m in range(1, order + 1)))


def inverse_u_transform(u: USeries) -> RankOneTheory:
    order = u.order + 1
    x = [ZERO] + [u.coeffs[m - 1] / math.factorial(m) for m in range(1, order + 1)]
    y = ps_reversion(x, order)
    return RankOneTheory(tuple(y[n - 2] * math.factorial(n - 2) for n in range(3, order + 3)))


def lagrange_inverse_coefficients(theory: RankOneTheory) -> list:
    """``[y^m] x(y)`` via Lagrange inversion ``(1/m) [x^{m-1}] (x / Phi''(x))^m``."""
    order = theory.N - 2
    y = [ZERO] * (order + 2)
    for n in range(3, theory.N + 1):
        y[n - 2] = theory.C(n) / math.factorial(n - 2)
    # x / y(x) = 1 / (1 + y_2 x + y_3 x^2 + ...)
    q = [y[k + 1] for k in range(order)]  # y(x)/x
    inv = [ZERO] * order
    inv[0] = ONE / q[0]
    for k in range(1, order):
        inv[k] = -sum((q[j] * inv[k - j] for j in range(1, k + 1)), ZERO) / q[0]
    out = [ZERO]
    power = [ONE] + [ZERO] * (order - 1)
    for m in range(1, order + 1):
        power = ps_mul(power, inv, order - 1)
        out.append(power[m - 1] / m)
    return out


def minus_log_u(theory: RankOneTheory) -> list:
    return u_transform(normalise(theory)[1]).minus_log()


# ------------------------------------------------------------------ scaling


def scale(theory: RankOneTheory, mu) -> RankOneTheory:
    """``C_n -> mu^{n-2} C_n`` (basis rescaling combined with the metric renormalisation)."""
    return RankOneTheory(tuple(c * mu ** (n - 2) for n, c in enumerate(theory.coeffs, start=3)))


def normalise(theory: RankOneTheory) -> tuple[Any, RankOneTheory]:
    """``(C_3, theory with C_3 = 1)`` for an invertible theory."""
    c3 = theory.coeffs[0]
    if c3 == 0:
        raise ZeroDivisionError("theory is not invertible (C_3 = 0)")
    return c3, scale(theory, ONE / c3)


# ---------------------------------------------------------- tensor products


def tensor_normalised(t1: RankOneTheory, t2: RankOneTheory, N: int | None = None) -> RankOneTheory:
    """Tensor of invertible theories through U-multiplication."""
    N = N or min(t1.N, t2.N)
    c1, n1 = normalise(t1.truncated(N))
    c2, n2 = normalise(t2.truncated(N))
    prod = inverse_u_transform(u_transform(n1) * u_transform(n2))
    return scale(prod, c1 * c2)


@lru_cache(maxsize=None)
def universal_polynomials(N: int):
    """``(R, {n: P_n})`` over ``R = Q[c1_3..c1_N, c2_3..c2_N]``."""
    names = [f"c1_{i}" for i in range(3, N + 1)] + [f"c2_{i}" for i in range(3, N + 1)]
    R, *gens = ring(",".join(names), QQ)
    k = N - 2
    g1, g2 = gens[:k], gens[k:]
    red1 = RankOneTheory((R.one,) + tuple(g1[1:]))
    red2 = RankOneTheory((R.one,) + tuple(g2[1:]))
    reduced = inverse_u_transform(u_transform(red1) * u_transform(red2))
    polys = {}
    for n in range(3, N + 1):
        p_red = R(reduced.C(n))
        P = R.zero
        for monom, coeff in p_red.items():
            e1, e2 = monom[:k], monom[k:]
            k1 = sum(e * (i + 3) for i, e in enumerate(e1))
            k2 = sum(e * (i + 3) for i, e in enumerate(e2))
            l1, l2 = sum(e1), sum(e2)
            i = n - 2 - k1 + 2 * l1
            j = n - 2 - k2 + 2 * l2
            if i < 0 or j < 0:
                raise ArithmeticError(f"monomial {monom} of C_{n} cannot be extended")
            new = list(monom)
            new[0] += i
            new[k] += j
            P += R({tuple(new): coeff})
        polys[n] = P
    return R, polys


def bidegree_bilength(monom: Sequence[int], N: int) -> tuple[int, int, int, int]:
    k = N - 2
    e1, e2 = monom[:k], monom[k:]
    return (sum(e * (i + 3) for i, e in enumerate(e1)), sum(e * (i + 3) for i, e in enumerate(e2)),
            sum(e1), sum(e2))


def evaluate_poly(P, values: Sequence):
    total: Any = ZERO
    for monom, coeff in P.items():
        term: Any = Fraction(int(coeff.numerator), int(coeff.denominator))
        for v, e in zip(values, monom):
            if e:
                term = term * v ** e
        total = total + term
    return total


def tensor_universal(t1: RankOneTheory, t2: RankOneTheory, N: int | None = None) -> RankOneTheory:
    N = N or min(t1.N, t2.N)
    _, polys = universal_polynomials(N)
    vals = [t1.C(i) for i in range(3, N + 1)] + [t2.C(i) for i in range(3, N + 1)]
    return RankOneTheory(tuple(evaluate_poly(polys[n], vals) for n in range(3, N + 1)))


def tensor_rank1(t1: RankOneTheory, t2: RankOneTheory, N: int | None = None) -> RankOneTheory:
    """Tensor product; U-multiplication when both are invertible, universal polynomials otherwise."""
    N = N or min(t1.N, t2.N)
    if t1.invertible and t2.invertible:
        return tensor_normalised(t1, t2, N)
    return tensor_universal(t1, t2, N)


def cross_validate(t1: RankOneTheory, t2: RankOneTheory, N: int) -> Report:
    """Compare the U-pathway with the diagonal-class pathway coefficient by coefficient."""
    from .tensor import tensor_correlators

    rep = Report("rank1_cross_validate")
    lhs = tensor_rank1(t1, t2, N)
    T = tensor_correlators(t1.model(N), t2.model(N), N, n_max=max(N, 7))
    for n in range(3, N + 1):
        rhs = T.Y((0,) * n)
        rep.checked += 1
        if lhs.C(n) != rhs:
            rep.violation({"n": n}, lhs.C(n), rhs)
    return rep


def random_theory(rng: random.Random, N: int, c3=None, span: int = 5) -> RankOneTheory:
    def q():
        return Fraction(rng.randint(-span, span), rng.randint(1, span))
    first = q() if c3 is None else as_rational(c3)
    return RankOneTheory((first,) + tuple(q() for _ in range(4, N + 1)))
