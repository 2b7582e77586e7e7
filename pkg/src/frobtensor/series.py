"""Graded-symmetric correlator tensors over Q.

A truncated potential is stored as its family of correlators ``Y_n`` for
``3 <= n <= N``.  Each ``Y_n`` is a graded-symmetric n-linear form on a
Z/2-graded space with basis ``d_0, ..., d_{r-1}``; we keep one value per
orbit, at the multi-index sorted ascending, and recover every other ordering
through the Koszul sign of the sorting permutation.

Values are usually :class:`fractions.Fraction`, but any commutative ring
element supporting ``+``, ``*`` and comparison with ``0`` works.  Formal
base-point shifts produce values in a polynomial ring (sympy's sparse
``PolyElement``), which is how the shift identities are checked exactly.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class TruncationError(ValueError):
    """Raised when a request needs correlators beyond the stored truncation."""


def as_rational(value: Any) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot read {value!r} as an exact rational")


def rational_str(q: Fraction) -> str:
    q = as_rational(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------- signs


def koszul_sign(perm: Sequence[int], parities: Sequence[int]) -> int:
    """Sign picked up by reordering graded symbols.

    ``perm[i]`` is the original position of the symbol that ends up at
    position ``i``; ``parities`` is indexed by original position.  The sign is
    ``(-1)`` to the number of inversions among odd symbols.
    """
    inversions = 0
    odd_seen: list[int] = []
    for pos in perm:
        if parities[pos] % 2:
            inversions += sum(1 for q in odd_seen if q > pos)
            odd_seen.append(pos)
    return -1 if inversions % 2 else 1


def sort_with_sign(index: Sequence[int], parity: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Sort a multi-index ascending; return the sorted key and the Koszul sign."""
    order = sorted(range(len(index)), key=lambda i: index[i])
    key = tuple(index[i] for i in order)
    if not any(parity[a] for a in index):
        return key, 1
    return key, koszul_sign(order, [parity[a] for a in index])


def odd_repeat(key: Sequence[int], parity: Sequence[int]) -> bool:
    counts = Counter(key)
    return any(parity[a] and c > 1 for a, c in counts.items())


# ----------------------------------------------------------------- basis data


@dataclass(frozen=True)
class GradedBasis:
    parity: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        parity = tuple(int(p) for p in self.parity)
        if not parity:
            raise ValueError("a graded basis needs at least one vector")
        if any(p not in (0, 1) for p in parity):
            raise ValueError("parities must be 0 or 1")
        labels = tuple(self.labels) or tuple(f"d{a}" for a in range(len(parity)))
        if len(labels) != len(parity):
            raise ValueError("one label per basis vector")
        object.__setattr__(self, "parity", parity)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def even(cls, dimension: int) -> "GradedBasis":
        return cls((0,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.parity)

    @property
    def is_even(self) -> bool:
        return not any(self.parity)


@dataclass(frozen=True, eq=False)
class Metric:
    """Non-degenerate even pairing ``g`` with its inverse.

    Graded symmetry is required: ``g[a][b] = (-1)^(|a||b|) g[b][a]``, which is
    plain symmetry on the even block and antisymmetry on the odd block.
    """

    g: tuple[tuple[Fraction, ...], ...]
    parity: tuple[int, ...]
    g_inv: tuple[tuple[Fraction, ...], ...] = field(init=False)

    def __post_init__(self):
        g = tuple(tuple(as_rational(x) for x in row) for row in self.g)
        r = len(g)
        parity = tuple(self.parity)
        if any(len(row) != r for row in g) or len(parity) != r:
            raise ValueError("metric must be square and match the basis")
        for a in range(r):
            for b in range(r):
                if parity[a] != parity[b] and g[a][b] != 0:
                    raise ValueError(f"metric pairs {a} and {b} of different parity")
                sign = -1 if parity[a] and parity[b] else 1
                if g[a][b] != sign * g[b][a]:
                    raise ValueError(f"metric is not graded symmetric at ({a}, {b})")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "parity", parity)
        object.__setattr__(self, "g_inv", _invert(g))

    @classmethod
    def from_rows(cls, rows, parity: Sequence[int] | None = None) -> "Metric":
        rows = tuple(tuple(as_rational(x) for x in row) for row in rows)
        return cls(rows, tuple(parity) if parity is not None else (0,) * len(rows))

    @classmethod
    def identity(cls, dimension: int) -> "Metric":
        return cls.from_rows([[int(a == b) for b in range(dimension)] for a in range(dimension)])

    @property
    def dimension(self) -> int:
        return len(self.g)

    def __eq__(self, other):
        return isinstance(other, Metric) and self.g == other.g and self.parity == other.parity

    def __hash__(self):
        return hash(self.g)

    def inverse_pairs(self) -> list[tuple[int, int, Fraction]]:
        """Nonzero entries ``(e, f, g^{ef})`` of the inverse metric."""
        r = self.dimension
        return [(e, f, self.g_inv[e][f]) for e in range(r) for f in range(r) if self.g_inv[e][f] != 0]


def _invert(rows: Sequence[Sequence[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(rows)
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("metric is degenerate")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


# ------------------------------------------------------------ correlator data


class CorrelatorFamily:
    """Sparse graded-symmetric tensors ``Y_3 .. Y_N``.

    ``tensors`` maps an arity to ``{sorted multi-index: value}``.  Zero values
    are dropped.  A stored value must vanish whenever the key repeats an odd
    index or contains an odd number of odd indices; violating entries raise.
    """

    __slots__ = ("basis", "truncation", "_tensors")

    def __init__(self, basis: GradedBasis, truncation: int,
                 tensors: Mapping[int, Mapping[Sequence[int], Any]] | None = None):
        if truncation < 3:
            raise ValueError("truncation must be at least 3")
        self.basis = basis
        self.truncation = int(truncation)
        clean: dict[int, dict[tuple[int, ...], Any]] = {}
        parity = basis.parity
        for n, entries in (tensors or {}).items():
            n = int(n)
            if not 3 <= n <= truncation:
                if any(v != 0 for v in entries.values()):
                    raise TruncationError(f"arity {n} outside [3, {truncation}]")
                continue
            block: dict[tuple[int, ...], Any] = {}
            for key, value in entries.items():
                key = tuple(int(a) for a in key)
                if len(key) != n:
                    raise ValueError(f"key {key} stored under arity {n}")
                if any(not 0 <= a < basis.dimension for a in key):
                    raise ValueError(f"index out of range in {key}")
                if list(key) != sorted(key):
                    raise ValueError(f"key {key} is not sorted")
                if isinstance(value, (int, str)):
                    value = as_rational(value)
                if value == 0:
                    continue
                if odd_repeat(key, parity):
                    raise ValueError(f"key {key} repeats an odd index but has value {value}")
                if sum(parity[a] for a in key) % 2:
                    raise ValueError(f"key {key} is odd but has value {value}")
                block[key] = value
            if block:
                clean[n] = block
        self._tensors = clean

    @classmethod
    def from_values(cls, basis: GradedBasis, truncation: int,
                    values: Iterable[tuple[Sequence[int], Any]]) -> "CorrelatorFamily":
        """Build from possibly unsorted keys, normalising signs; repeated orbits must agree."""
        tensors: dict[int, dict[tuple[int, ...], Any]] = {}
        for index, value in values:
            key, sign = sort_with_sign(tuple(index), basis.parity)
            if isinstance(value, (int, str)):
                value = as_rational(value)
            block = tensors.setdefault(len(key), {})
            normalised = value * sign
            if key in block and block[key] != normalised:
                raise ValueError(f"conflicting values for orbit {key}")
            block[key] = normalised
        return cls(basis, truncation, tensors)

    # -- access

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def arities(self) -> list[int]:
        return sorted(self._tensors)

    def items(self, n: int | None = None) -> Iterator[tuple[tuple[int, ...], Any]]:
        if n is None:
            for m in self.arities():
                yield from self._tensors[m].items()
        else:
            yield from self._tensors.get(n, {}).items()

    def tensor(self, n: int) -> dict[tuple[int, ...], Any]:
        return dict(self._tensors.get(n, {}))

    def get(self, index: Sequence[int]) -> Any:
        n = len(index)
        if not 3 <= n <= self.truncation:
            raise TruncationError(f"arity {n} outside [3, {self.truncation}]")
        key, sign = sort_with_sign(tuple(index), self.basis.parity)
        value = self._tensors.get(n, {}).get(key)
        if value is None:
            return ZERO
        return value if sign == 1 else -value

    __call__ = get

    def get_sorted(self, key: tuple[int, ...]) -> Any:
        return self._tensors.get(len(key), {}).get(key, ZERO)

    def keys(self, n: int) -> Iterator[tuple[int, ...]]:
        """All admissible sorted keys of arity ``n`` (not only stored ones)."""
        parity = self.basis.parity
        for key in itertools.combinations_with_replacement(range(self.dimension), n):
            if odd_repeat(key, parity) or sum(parity[a] for a in key) % 2:
                continue
            yield key

    # -- derived families

    def truncated(self, truncation: int) -> "CorrelatorFamily":
        if truncation > self.truncation:
            raise TruncationError("cannot raise the truncation of stored data")
        return CorrelatorFamily(self.basis, truncation,
                                {n: t for n, t in self._tensors.items() if n <= truncation})

    def map_values(self, fn) -> "CorrelatorFamily":
        return CorrelatorFamily(self.basis, self.truncation,
                                {n: {k: fn(v) for k, v in t.items()} for n, t in self._tensors.items()})

    def with_entries(self, updates: Mapping[tuple[int, ...], Any]) -> "CorrelatorFamily":
        tensors = {n: dict(t) for n, t in self._tensors.items()}
        for key, value in updates.items():
            tensors.setdefault(len(key), {})[tuple(key)] = value
        return CorrelatorFamily(self.basis, self.truncation, tensors)

    def __eq__(self, other):
        if not isinstance(other, CorrelatorFamily):
            return NotImplemented
        return (self.basis == other.basis and self.truncation == other.truncation
                and self._tensors == other._tensors)

    def __repr__(self):
        sizes = {n: len(t) for n, t in self._tensors.items()}
        return f"CorrelatorFamily(dim={self.dimension}, N={self.truncation}, entries={sizes})"


# -------------------------------------------------------------- potential view


def _potential_sign(key: Sequence[int], parity: Sequence[int]) -> int:
    k = sum(parity[a] for a in key)
    return -1 if (k * (k - 1) // 2) % 2 else 1


def _exponents(key: Sequence[int], dimension: int) -> tuple[int, ...]:
    counts = Counter(key)
    return tuple(counts.get(a, 0) for a in range(dimension))


def _key_of(exponents: Sequence[int]) -> tuple[int, ...]:
    return tuple(a for a, e in enumerate(exponents) for _ in range(e))


def potential_view(family: CorrelatorFamily) -> dict[tuple[int, ...], Any]:
    """The truncated potential as ``{exponent vector: coefficient}``.

    Monomials are read with ascending indices, ``x^{a_1} x^{a_2} ... x^{a_n}``
    for ``a_1 <= ... <= a_n``.  Summing ``Y_n(a) x^{a_n}...x^{a_1} / n!`` over
    all orderings collapses to ``Y_n(key) / prod(multiplicity!)``, with the
    reversal sign of the odd variables.
    """
    parity = family.basis.parity
    out: dict[tuple[int, ...], Any] = {}
    for key, value in family.items():
        exps = _exponents(key, family.dimension)
        denom = math.prod(math.factorial(e) for e in exps)
        out[exps] = value * _potential_sign(key, parity) / denom
    return out


def correlators_from_potential(basis: GradedBasis, polynomial: Mapping[Sequence[int], Any],
                               truncation: int) -> CorrelatorFamily:
    """Inverse of :func:`potential_view`: read ``Y_n`` off Taylor coefficients.

    Terms of degree below 3 are discarded (the potential is defined only up to
    quadratic terms); degrees above ``truncation`` raise.
    """
    tensors: dict[int, dict[tuple[int, ...], Any]] = {}
    for exps, coeff in polynomial.items():
        exps = tuple(int(e) for e in exps)
        if len(exps) != basis.dimension:
            raise ValueError("exponent vector does not match the basis")
        degree = sum(exps)
        if degree < 3 or coeff == 0:
            continue
        if degree > truncation:
            raise TruncationError(f"monomial of degree {degree} beyond truncation {truncation}")
        if any(basis.parity[a] and e > 1 for a, e in enumerate(exps)):
            raise ValueError("odd variables square to zero")
        key = _key_of(exps)
        scale = math.prod(math.factorial(e) for e in exps) * _potential_sign(key, basis.parity)
        tensors.setdefault(degree, {})[key] = coeff * scale
    return CorrelatorFamily(basis, truncation, tensors)


# ---------------------------------------------------------------- base shifts


@dataclass(frozen=True)
class FormalShiftVector:
    """Shift of the base point by ``x_0^a = values[a]``.

    Values are usually degree-one elements of a polynomial ring (formal
    shift symbols) but plain numbers are accepted for numeric evaluation.
    Only even directions may be shifted.
    """

    values: Mapping[int, Any]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(a for a, v in self.values.items() if v != 0))


def shift_correlators(family: CorrelatorFamily, shift: FormalShiftVector | Mapping[int, Any]) -> CorrelatorFamily:
    """Correlators of the potential re-expanded at the shifted base point.

    ``Yhat_n(a) = sum_M 1/M! sum_b x_0^{b_M}...x_0^{b_1} Y_{n+M}(a, b)`` with
    ``n + M <= N``: the shift symbols carry degree one and are truncated
    jointly with the arity.  Because shifts are even, the Koszul factor
    ``eps(b|a)`` is 1 and each multiset ``b`` contributes
    ``prod x_0^b / prod mult(b)!``.
    """
    if not isinstance(shift, FormalShiftVector):
        shift = FormalShiftVector(dict(shift))
    parity = family.basis.parity
    support = shift.support
    for a in support:
        if not 0 <= a < family.dimension:
            raise ValueError(f"shift index {a} out of range")
        if parity[a]:
            raise ValueError(f"cannot shift along odd direction {a}")
    if not support:
        return family
    values = {a: shift.values[a] for a in support}
    out: dict[int, dict[tuple[int, ...], Any]] = {}
    for key, value in family.items():
        counts = Counter(key)
        avail = [(a, counts[a]) for a in support if counts.get(a)]
        ranges = [range(c + 1) for _, c in avail]
        for taken in itertools.product(*ranges):
            m = sum(taken)
            n = len(key) - m
            if n < 3:
                continue
            rest = Counter(counts)
            weight: Any = ONE
            denom = 1
            for (a, _), t in zip(avail, taken):
                if t:
                    rest[a] -= t
                    weight = weight * values[a] ** t
                    denom *= math.factorial(t)
            sub = tuple(sorted(rest.elements()))
            term = value * weight
            if denom != 1:
                term = term * Fraction(1, denom)
            block = out.setdefault(n, {})
            block[sub] = block[sub] + term if sub in block else term
    return CorrelatorFamily(family.basis, family.truncation, out)
