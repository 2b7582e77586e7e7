"""Tensor products of Frobenius models.

The product basis is ``d_{a'a''} = d'_{a'} (x) d''_{a''}``, flattened to
``a' * dim'' + a''``.  Correlators of the product are obtained by feeding
the factors' operadic correlators into the diagonal class of ``M_{0,n}``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from . import m0n
from .frobenius import EulerData, FrobeniusModel, Report, operadic_correlator
from .series import (
    ZERO,
    CorrelatorFamily,
    FormalShiftVector,
    GradedBasis,
    Metric,
    TruncationError,
    koszul_sign,
    shift_correlators,
)


class IdentityError(ValueError):
    """A construction needs flat identities that are missing."""


class WeightMismatch(ValueError):
    """Flat identities of the factors have different weights."""


@dataclass(frozen=True)
class TensorIndexMap:
    dims: tuple[int, int]
    parity1: tuple[int, ...]
    parity2: tuple[int, ...]

    @classmethod
    def of(cls, M1: FrobeniusModel, M2: FrobeniusModel) -> "TensorIndexMap":
        return cls((M1.dimension, M2.dimension), M1.basis.parity, M2.basis.parity)

    @property
    def dimension(self) -> int:
        return self.dims[0] * self.dims[1]

    def index(self, a1: int, a2: int) -> int:
        return a1 * self.dims[1] + a2

    def split(self, a: int) -> tuple[int, int]:
        return divmod(a, self.dims[1])

    @property
    def parity(self) -> tuple[int, ...]:
        return tuple((self.parity1[a1] + self.parity2[a2]) % 2
                     for a1 in range(self.dims[0]) for a2 in range(self.dims[1]))

    def basis(self, labels1: Sequence[str], labels2: Sequence[str]) -> GradedBasis:
        labels = tuple(f"{l1}*{l2}" for l1 in labels1 for l2 in labels2)
        return GradedBasis(self.parity, labels)

    def interleave_sign(self, index: Sequence[int]) -> int:
        """Sign of ``g'_1 g''_1 g'_2 g''_2 ... -> g'_1 .. g'_n g''_1 .. g''_n``."""
        n = len(index)
        pars = []
        for a in index:
            a1, a2 = self.split(a)
            pars += [self.parity1[a1], self.parity2[a2]]
        if not any(pars):
            return 1
        order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
        return koszul_sign(order, pars)


def tensor_metric(M1: FrobeniusModel, M2: FrobeniusModel) -> Metric:
    tm = TensorIndexMap.of(M1, M2)
    r1, r2 = tm.dims
    g1, g2 = M1.metric.g, M2.metric.g
    rows = [[ZERO] * tm.dimension for _ in range(tm.dimension)]
    for a1, a2, b1, b2 in itertools.product(range(r1), range(r2), range(r1), range(r2)):
        v = g1[a1][b1] * g2[a2][b2]
        if v:
            # moving d''_{a2} past d'_{b1}
            if M2.basis.parity[a2] and M1.basis.parity[b1]:
                v = -v
            rows[tm.index(a1, a2)][tm.index(b1, b2)] = v
    return Metric(tuple(tuple(r) for r in rows), tm.parity)


# --------------------------------------------------------------- correlators


class _OperadicCache:
    def __init__(self, model: FrobeniusModel):
        self.model = model
        self.values: dict = {}

    def __call__(self, tree, idx: tuple[int, ...]):
        key = (tree, idx)
        v = self.values.get(key)
        if v is None:
            v = operadic_correlator(self.model, tree, idx)
            self.values[key] = v
        return v


def _tensor_arity(M1: FrobeniusModel, M2: FrobeniusModel, n: int, max_shift_degree=None):
    tm = TensorIndexMap.of(M1, M2)
    ring = m0n.get_ring(n, n_max=m0n.N_MAX_EXPENSIVE)
    blocks = []
    for k in range(n - 2):
        B, C = ring.basis(k), ring.basis(n - 3 - k)
        Ginv = ring.gram_inverse(k)
        entries = [(i, j, Ginv[j][i]) for i in range(len(B)) for j in range(len(C)) if Ginv[j][i]]
        blocks.append((B, C, entries))
    c1, c2 = _OperadicCache(M1), _OperadicCache(M2)
    out: dict[tuple[int, ...], Any] = {}
    parity = tm.parity
    for key in itertools.combinations_with_replacement(range(tm.dimension), n):
        if sum(parity[a] for a in key) % 2 or any(parity[a] and key.count(a) > 1 for a in key):
            continue
        i1 = tuple(tm.split(a)[0] for a in key)
        i2 = tuple(tm.split(a)[1] for a in key)
        total = ZERO
        for B, C, entries in blocks:
            u = [c1(t, i1) for t in B]
            if not any(x != 0 for x in u):
                continue
            w = [c2(t, i2) for t in C]
            for i, j, c in entries:
                if u[i] != 0 and w[j] != 0:
                    total = total + c * u[i] * w[j]
        if total != 0:
            total = tm.interleave_sign(key) * total
            if max_shift_degree is not None:
                total = truncate_degree(total, max_shift_degree - n)
            if total != 0:
                out[key] = total
    return n, out


def _tensor_arity_job(args):
    return _tensor_arity(*args)


def tensor_correlators(M1: FrobeniusModel, M2: FrobeniusModel, N_out: int | None = None,
                       n_max: int = m0n.N_MAX_DEFAULT, jobs: int = 1,
                       max_shift_degree: int | None = None) -> FrobeniusModel:
    """``Y_n = eps * (Y' (x) Y'')(Delta_{M_{0,n}})`` for ``3 <= n <= N_out``.

    Euler data and the identity are attached when both factors carry them
    with matching identity weights.  ``max_shift_degree`` truncates
    polynomial coefficients to joint degree (used for formal shifts).
    """
    limit = min(M1.truncation, M2.truncation)
    if N_out is None:
        N_out = min(limit, n_max)
    if N_out > limit:
        raise TruncationError(f"order {N_out} exceeds the factors' truncation {limit}")
    if N_out > n_max:
        raise m0n.RangeError(f"order {N_out} exceeds the diagonal range n_max = {n_max}")
    tm = TensorIndexMap.of(M1, M2)
    basis = tm.basis(M1.basis.labels, M2.basis.labels)
    arities = list(range(3, N_out + 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_tensor_arity_job, [(M1, M2, n, max_shift_degree) for n in arities]))
    else:
        results = [_tensor_arity(M1, M2, n, max_shift_degree) for n in arities]
    F = CorrelatorFamily(basis, N_out, dict(results))
    euler = identity = None
    if M1.identity is not None and M2.identity is not None:
        identity = tm.index(M1.identity, M2.identity)
        if M1.euler is not None and M2.euler is not None and M1.euler.d0 == M2.euler.d0:
            euler = tensor_euler(M1, M2)
    return FrobeniusModel(basis, tensor_metric(M1, M2), F, euler, identity)


def truncate_degree(value, max_degree: int):
    """Drop monomials of total degree above ``max_degree`` from a polynomial value."""
    terms = getattr(value, "terms", None)
    if terms is None or not hasattr(value, "ring"):
        return value
    R = value.ring
    return R({m: c for m, c in value.items() if sum(m) <= max_degree})


# ---------------------------------------------------------- identity / Euler


def tensor_identity(M1: FrobeniusModel, M2: FrobeniusModel) -> int:
    if M1.identity is None or M2.identity is None:
        raise IdentityError("both factors need a flat identity")
    return TensorIndexMap.of(M1, M2).index(M1.identity, M2.identity)


def tensor_euler(M1: FrobeniusModel, M2: FrobeniusModel) -> EulerData:
    """Euler field of the product for factors whose identities share the weight ``d``."""
    if M1.euler is None or M2.euler is None:
        raise ValueError("both factors need Euler data")
    if M1.identity is None or M2.identity is None:
        raise IdentityError("both factors need a flat identity")
    e1, e2 = M1.euler, M2.euler
    if e1.d0 != e2.d0:
        raise WeightMismatch(f"identity weights differ: {e1.d0} vs {e2.d0}; rescale one Euler field")
    dw = e1.d0
    tm = TensorIndexMap.of(M1, M2)
    r1, r2 = tm.dims
    dim = tm.dimension
    d = [[ZERO] * dim for _ in range(dim)]
    for a1, a2, b1, b2 in itertools.product(range(r1), range(r2), range(r1), range(r2)):
        v = ZERO
        if a2 == b2:
            v += e1.d[a1][b1]
        if a1 == b1:
            v += e2.d[a2][b2]
        if a1 == b1 and a2 == b2:
            v -= dw
        d[tm.index(a1, a2)][tm.index(b1, b2)] = v
    r = [ZERO] * dim
    for a1 in range(r1):
        r[tm.index(a1, M2.identity)] += e1.r[a1]
    for a2 in range(r2):
        r[tm.index(M1.identity, a2)] += e2.r[a2]
    return EulerData(tuple(tuple(row) for row in d), tuple(r), e1.D + e2.D - 2 * dw, dw)


def kron_v(V1, V2) -> list[list[Fraction]]:
    """``V' (x) id + id (x) V''`` in the flattened product basis."""
    r1, r2 = len(V1), len(V2)
    dim = r1 * r2
    out = [[ZERO] * dim for _ in range(dim)]
    for b1, b2, a1, a2 in itertools.product(range(r1), range(r2), range(r1), range(r2)):
        v = ZERO
        if a2 == b2:
            v += V1[b1][a1]
        if a1 == b1:
            v += V2[b2][a2]
        out[b1 * r2 + b2][a1 * r2 + a2] = v
    return out


# ---------------------------------------------------- base-point compatibility


def theta_tau(M1: FrobeniusModel, M2: FrobeniusModel) -> list[list[int]]:
    """Matrix of ``d'_a -> d_{a e''}``, ``d''_b -> d_{e' b}`` (rows: product, cols: A' + A'')."""
    if M1.identity is None or M2.identity is None:
        raise IdentityError("theta_tau needs flat identities on both factors")
    tm = TensorIndexMap.of(M1, M2)
    r1, r2 = tm.dims
    mat = [[0] * (r1 + r2) for _ in range(tm.dimension)]
    for a in range(r1):
        mat[tm.index(a, M2.identity)][a] = 1
    for b in range(r2):
        mat[tm.index(M1.identity, b)][r1 + b] = 1
    return mat


def theta_shift(M1: FrobeniusModel, M2: FrobeniusModel, s1: Mapping[int, Any], s2: Mapping[int, Any]) -> dict[int, Any]:
    mat = theta_tau(M1, M2)
    r1 = M1.dimension
    vec = [s1.get(a, 0) for a in range(r1)] + [s2.get(b, 0) for b in range(M2.dimension)]
    out = {}
    for row, coeffs in enumerate(mat):
        v = 0
        for c, x in zip(coeffs, vec):
            if c and x != 0:
                v = v + c * x
        if v != 0:
            out[row] = v
    return out


def theta_tau_compatibility(M1: FrobeniusModel, M2: FrobeniusModel, s1: Mapping[int, Any],
                            s2: Mapping[int, Any], N_cmp: int) -> Report:
    """Shift-then-tensor against tensor-then-shift along ``theta_tau``, at joint order ``N_cmp``."""
    rep = Report("theta_tau_compatibility")
    A = M1.truncated(N_cmp)
    B = M2.truncated(N_cmp)
    shifted1 = A.with_correlators(shift_correlators(A.correlators, FormalShiftVector(dict(s1))))
    shifted2 = B.with_correlators(shift_correlators(B.correlators, FormalShiftVector(dict(s2))))
    lhs = tensor_correlators(shifted1, shifted2, N_cmp, n_max=max(N_cmp, m0n.N_MAX_DEFAULT),
                             max_shift_degree=N_cmp).correlators
    T = tensor_correlators(A, B, N_cmp, n_max=max(N_cmp, m0n.N_MAX_DEFAULT))
    rhs = shift_correlators(T.correlators, FormalShiftVector(theta_shift(A, B, s1, s2)))
    for n in range(3, N_cmp + 1):
        keys = set(dict(lhs.items(n))) | set(dict(rhs.items(n)))
        for key in sorted(keys):
            rep.checked += 1
            l, r = lhs.get_sorted(key), rhs.get_sorted(key)
            if l != r:
                rep.violation({"n": n, "index": list(key)}, l, r)
    return rep


def swap_factors(T: FrobeniusModel, dims: tuple[int, int]) -> CorrelatorFamily:
    """Re-index a product model's correlators from ``A' x A''`` to ``A'' x A'``."""
    r1, r2 = dims
    perm = {a1 * r2 + a2: a2 * r1 + a1 for a1 in range(r1) for a2 in range(r2)}
    parity = [0] * (r1 * r2)
    for old, new in perm.items():
        parity[new] = T.basis.parity[old]
    basis = GradedBasis(tuple(parity))
    values = [(tuple(perm[a] for a in key), v) for key, v in T.correlators.items()]
    return CorrelatorFamily.from_values(basis, T.truncation, values)
