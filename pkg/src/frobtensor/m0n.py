"""Cohomology of the moduli spaces M_{0,S} of stable genus-zero curves.

Classes are written as Q-linear combinations of *divisor monomials*: sorted
tuples of boundary divisors ``D_A`` (a monomial of pairwise distinct,
compatible divisors is exactly the stratum class of the corresponding tree).
Everything is decided through intersection numbers: two classes are equal
iff they pair identically with a basis of the complementary degree
(Poincare duality over Q), and normal forms are coordinates in a fixed
computed strata basis.

Intersection numbers are computed by restriction to a boundary divisor,
``D_A = M_{0, A + z} x M_{0, A^c + z'}`` with normal bundle
``-psi_z - psi_z'``, recursing until every monomial is either a transversal
point (value 1), contains crossing divisors (value 0) or is a pure psi
monomial (a multinomial coefficient).

Internally a label set is a bitmask (label ``l`` is bit ``l``) and a divisor
is the bitmask of its side not containing the lowest label.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix

from .trees import StableTree, TreeSum, enumerate_stable_trees, pullback, pushforward

N_MAX_DEFAULT = 7
N_MAX_EXPENSIVE = 8
_PRIME = 2**61 - 1


class RangeError(ValueError):
    """Requested n lies outside the supported range."""


# ---------------------------------------------------------------- bitmasks


def _mask(labels: Iterable[int]) -> int:
    m = 0
    for x in labels:
        if x < 0:
            raise ValueError("labels must be non-negative")
        m |= 1 << x
    return m


def _bits(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _norm(side: int, L: int) -> int:
    return L & ~side if side & (L & -L) else side


def _compatible(a: int, b: int) -> bool:
    c = a & b
    return c == 0 or c == a or c == b


# ------------------------------------------------------ intersection numbers


@lru_cache(maxsize=None)
def _integrate(L: int, divs: tuple[int, ...], psi: tuple[tuple[int, int], ...]) -> int:
    """``int_{M_{0,L}} prod D * prod psi``; divisors normalised and sorted."""
    m = bin(L).count("1")
    if len(divs) + sum(p for _, p in psi) != m - 3:
        return 0
    if m == 3:
        return 1
    if not divs:
        out = math.factorial(m - 3)
        for _, p in psi:
            out //= math.factorial(p)
        return out
    counts = Counter(divs)
    distinct = list(counts)
    for i, a in enumerate(distinct):
        for b in distinct[i + 1:]:
            if not _compatible(a, b):
                return 0
    if not psi and len(distinct) == len(divs):
        return 1
    A = max(distinct, key=lambda d: (counts[d], -d))
    k = counts[A] - 1
    z = 1 << L.bit_length()
    LA, LB = A | z, (L & ~A) | z
    left, right = [], []
    for B, c in counts.items():
        if B == A:
            continue
        if B & A == B:
            left += [_norm(B, LA)] * c
        elif B & A == 0:
            right += [_norm(B, LB)] * c
        else:  # B contains A, so its complement sits on the other side
            right += [_norm(L & ~B, LB)] * c
    psiL = [(x, p) for x, p in psi if (1 << x) & A]
    psiR = [(x, p) for x, p in psi if not (1 << x) & A]
    left_t, right_t = tuple(sorted(left)), tuple(sorted(right))
    zi = z.bit_length() - 1
    mA, mB = bin(LA).count("1"), bin(LB).count("1")
    baseL = len(left) + sum(p for _, p in psiL)
    baseR = len(right) + sum(p for _, p in psiR)
    total = 0
    sign = -1 if k % 2 else 1
    for j in range(k + 1):
        if baseL + j != mA - 3 or baseR + k - j != mB - 3:
            continue
        pl = tuple(sorted(psiL + ([(zi, j)] if j else [])))
        pr = tuple(sorted(psiR + ([(zi, k - j)] if k - j else [])))
        il = _integrate(LA, left_t, pl)
        if il:
            total += sign * math.comb(k, j) * il * _integrate(LB, right_t, pr)
    return total


def intersection_number(labels: Iterable[int], divisors: Iterable[Iterable[int]],
                        psi: Mapping[int, int] | None = None) -> int:
    """Degree of a product of boundary divisors ``D_A`` and psi classes.

    Divisors are given by either side of their bipartition.
    """
    L = _mask(labels)
    divs = []
    for side in divisors:
        d = _norm(_mask(side), L)
        if d & ~L:
            raise ValueError("divisor uses labels outside the label set")
        n_side = bin(d).count("1")
        if not 2 <= n_side <= bin(L).count("1") - 2:
            raise ValueError("not a boundary divisor")
        divs.append(d)
    ps = tuple(sorted((x, p) for x, p in (psi or {}).items() if p))
    return _integrate(L, tuple(sorted(divs)), ps)


# ---------------------------------------------------------------- betti data


@lru_cache(maxsize=None)
def poincare_polynomial(n: int) -> tuple[int, ...]:
    """Betti numbers ``dim H^{2k}(M_{0,n})`` from Keel's recursion."""
    if n < 3:
        raise ValueError("n >= 3")
    if n == 3:
        return (1,)
    prev = poincare_polynomial(n - 1)
    m = n - 1
    out = [0] * (n - 2)
    for k, b in enumerate(prev):
        out[k] += b
        out[k + 1] += b
    half = [0] * (n - 2)
    for j in range(2, m - 1):
        p, q = poincare_polynomial(j + 1), poincare_polynomial(m - j + 1)
        c = math.comb(m, j)
        for i, x in enumerate(p):
            for l, y in enumerate(q):
                half[i + l + 1] += c * x * y
    return tuple(o + h // 2 for o, h in zip(out, half))


def betti(n: int, k: int) -> int:
    p = poincare_polynomial(n)
    return p[k] if 0 <= k < len(p) else 0


# ------------------------------------------------------------------ elements


Monomial = tuple  # sorted tuple of divisor masks


class StrataElement:
    """A class in ``H*(M_{0,S})`` as a combination of divisor monomials."""

    __slots__ = ("labels", "L", "terms")

    def __init__(self, labels: Iterable[int], terms: Mapping[Monomial, Fraction] | None = None):
        self.labels = frozenset(labels)
        self.L = _mask(self.labels)
        self.terms: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                key = tuple(sorted(mono))
                v = self.terms.get(key, Fraction(0)) + c
                if v:
                    self.terms[key] = v
                else:
                    self.terms.pop(key, None)

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def unit(cls, labels: Iterable[int]) -> "StrataElement":
        return cls(labels, {(): 1})

    @classmethod
    def stratum(cls, tree: StableTree, coeff=1) -> "StrataElement":
        L = _mask(tree.labels)
        return cls(tree.labels, {tuple(sorted(_norm(_mask(A), L) for A in tree.splits)): coeff})

    @classmethod
    def divisor(cls, labels: Iterable[int], side: Iterable[int]) -> "StrataElement":
        labels = frozenset(labels)
        return cls.stratum(StableTree.from_splits(labels, [side]))

    @classmethod
    def from_tree_sum(cls, labels: Iterable[int], ts: TreeSum) -> "StrataElement":
        out = cls(labels)
        for t, c in ts.terms.items():
            out = out + cls.stratum(t, c)
        return out

    def _check(self, other: "StrataElement"):
        if self.labels != other.labels:
            raise ValueError("classes live on different moduli spaces")

    def __add__(self, other: "StrataElement") -> "StrataElement":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return StrataElement(self.labels, terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other: "StrataElement") -> "StrataElement":
        return self + (-other)

    def scale(self, k) -> "StrataElement":
        return StrataElement(self.labels, {m: c * k for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, StrataElement):
            return self.scale(other)
        self._check(other)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = tuple(sorted(m1 + m2))
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return StrataElement(self.labels, terms)

    __rmul__ = scale

    def codims(self) -> set[int]:
        return {len(m) for m in self.terms}

    def homogeneous_part(self, k: int) -> "StrataElement":
        return StrataElement(self.labels, {m: c for m, c in self.terms.items() if len(m) == k})

    def integrate(self) -> Fraction:
        top = self.n - 3
        if any(len(m) != top for m in self.terms):
            raise ValueError(f"integration needs a class of codimension {top}")
        return sum((c * _integrate(self.L, m, ()) for m, c in self.terms.items()), Fraction(0))

    def trees(self) -> TreeSum:
        """Tree form; requires every monomial to be a stratum (e.g. after reduction)."""
        out = TreeSum()
        for m, c in self.terms.items():
            if len(set(m)) != len(m):
                raise ValueError("monomial with repeated divisors is not a stratum")
            out.add(StableTree(self.labels, frozenset(frozenset(_bits(d)) for d in m)), c)
        return out

    def reduced(self, ring: "M0nRing | None" = None) -> "StrataElement":
        return (ring or get_ring(self.labels)).reduce(self)

    def is_zero(self) -> bool:
        return not self.reduced().terms

    def __eq__(self, other):
        if not isinstance(other, StrataElement):
            return NotImplemented
        if self.labels != other.labels:
            return False
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        parts = []
        for m, c in sorted(self.terms.items()):
            name = "*".join("D" + "".join(map(str, _bits(d))) for d in m) or "1"
            parts.append(f"{c}*{name}")
        return " + ".join(parts) or "0"


# -------------------------------------------------------------- ring data


@dataclass
class DiagonalClass:
    labels: frozenset
    pairs: list  # (StableTree, StableTree, Fraction)

    @property
    def n(self) -> int:
        return len(self.labels)


class M0nRing:
    """Bases, Gram inverses, normal forms and the diagonal for one label set."""

    def __init__(self, labels: Iterable[int]):
        self.labels = frozenset(labels)
        self.L = _mask(self.labels)
        self.n = len(self.labels)
        self.dim = self.n - 3
        self._lock = threading.Lock()
        self._strata: dict[int, list[StableTree]] = {}
        self._basis: dict[int, list[StableTree]] = {}
        self._gram_inv: dict[int, list[list[Fraction]]] = {}
        self._diagonal: DiagonalClass | None = None

    # -- data

    def mono(self, tree: StableTree) -> Monomial:
        return tuple(sorted(_norm(_mask(A), self.L) for A in tree.splits))

    def strata(self, k: int) -> list[StableTree]:
        if k not in self._strata:
            self._strata[k] = enumerate_stable_trees(self.labels, k)
        return self._strata[k]

    def pair_monos(self, m1: Monomial, m2: Monomial) -> int:
        return _integrate(self.L, tuple(sorted(m1 + m2)), ())

    def basis(self, k: int) -> list[StableTree]:
        if not 0 <= k <= self.dim:
            raise RangeError(f"codimension {k} outside [0, {self.dim}]")
        with self._lock:
            return self._basis_unlocked(k)

    def _basis_unlocked(self, k: int) -> list[StableTree]:
        if k in self._basis:
            return self._basis[k]
        target = betti(self.n, k)
        comp = self.dim - k
        cands = self.strata(k)
        if comp < k:
            cols = [self.mono(t) for t in self._basis_unlocked(comp)]
        else:
            cols = [self.mono(t) for t in self.strata(comp)]
        rows = [self.mono(t) for t in cands]
        chosen = _greedy_rows(rows, cols, self.pair_monos)
        if len(chosen) != target:
            raise ArithmeticError(
                f"strata span rank {len(chosen)} in codimension {k}, expected {target}")
        self._basis[k] = [cands[i] for i in chosen]
        return self._basis[k]

    def gram(self, k: int) -> list[list[int]]:
        """``G[i][j] = int b_i * b'_j`` for ``b`` in basis(k), ``b'`` in basis(dim-k)."""
        B, C = self.basis(k), self.basis(self.dim - k)
        return [[self.pair_monos(self.mono(b), self.mono(c)) for c in C] for b in B]

    def gram_inverse(self, k: int) -> list[list[Fraction]]:
        if k not in self._gram_inv:
            G = self.gram(k)
            M = DomainMatrix([[QQ(x) for x in row] for row in G], (len(G), len(G)), QQ)
            inv = M.inv().to_Matrix()
            self._gram_inv[k] = [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(len(G))]
                                 for i in range(len(G))]
        return self._gram_inv[k]

    def betti_numbers(self) -> tuple[int, ...]:
        return poincare_polynomial(self.n)

    # -- normal forms

    def coordinates(self, x: StrataElement) -> dict[int, list[Fraction]]:
        """Coordinates of each homogeneous part in ``basis(k)``."""
        if x.labels != self.labels:
            raise ValueError("class lives on a different moduli space")
        out = {}
        for k in sorted(x.codims()):
            if k > self.dim:
                continue
            part = {m: c for m, c in x.terms.items() if len(m) == k}
            C = [self.mono(t) for t in self.basis(self.dim - k)]
            p = [sum((c * self.pair_monos(m, cm) for m, c in part.items()), Fraction(0)) for cm in C]
            if not any(p):
                continue
            Ginv = self.gram_inverse(k)
            # G c = p with G[i][j] paired against b'_j => c_i = sum_j p_j Ginv[j][i]
            coeffs = [sum((p[j] * Ginv[j][i] for j in range(len(p)) if p[j]), Fraction(0))
                      for i in range(len(p))]
            out[k] = coeffs
        return out

    def reduce(self, x: StrataElement) -> StrataElement:
        terms = {}
        for k, coeffs in self.coordinates(x).items():
            for t, c in zip(self.basis(k), coeffs):
                if c:
                    terms[self.mono(t)] = c
        return StrataElement(self.labels, terms)

    # -- diagonal

    def diagonal(self) -> DiagonalClass:
        with self._lock:
            if self._diagonal is not None:
                return self._diagonal
        pairs = []
        for k in range(self.dim + 1):
            B, C = self.basis(k), self.basis(self.dim - k)
            Ginv = self.gram_inverse(k)
            for i, b in enumerate(B):
                for j, c in enumerate(C):
                    if Ginv[j][i]:
                        pairs.append((b, c, Ginv[j][i]))
        self._diagonal = DiagonalClass(self.labels, pairs)
        return self._diagonal


def _greedy_rows(rows: Sequence[Monomial], cols: Sequence[Monomial], pair) -> list[int]:
    """Indices of the first maximal independent prefix-greedy set of rows.

    Rank is computed modulo a large prime; the caller confirms the result
    against the Betti number and the exact Gram inverse confirms it over Q.
    """
    if not rows:
        return []
    F = GF(_PRIME)
    data = [[F(pair(c, r) % _PRIME) for r in rows] for c in cols]
    M = DomainMatrix(data, (len(cols), len(rows)), F)
    _, pivots = M.rref()
    return list(pivots)


_RINGS: dict[frozenset, M0nRing] = {}
_RINGS_LOCK = threading.Lock()


def get_ring(labels: Iterable[int] | int, n_max: int = N_MAX_DEFAULT,
             allow_expensive: bool = False) -> M0nRing:
    labels = frozenset(range(1, labels + 1)) if isinstance(labels, int) else frozenset(labels)
    n = len(labels)
    limit = max(n_max, N_MAX_EXPENSIVE if allow_expensive else n_max)
    if n < 3 or n > limit:
        raise RangeError(f"n = {n} outside supported range [3, {limit}]"
                         + ("" if allow_expensive or n != N_MAX_EXPENSIVE else " (n = 8 needs allow_expensive)"))
    with _RINGS_LOCK:
        if labels not in _RINGS:
            _RINGS[labels] = M0nRing(labels)
        return _RINGS[labels]


# ------------------------------------------------------------ public ops


def multiply(a: StrataElement, b: StrataElement) -> StrataElement:
    return a * b


def integrate(a: StrataElement) -> Fraction:
    return a.integrate()


def basis(n: int, codim: int, **kw) -> list[StrataElement]:
    ring = get_ring(n, **kw)
    return [StrataElement.stratum(t) for t in ring.basis(codim)]


def diagonal(n: int | Iterable[int], **kw) -> DiagonalClass:
    return get_ring(n, **kw).diagonal()


def pushforward_class(x: StrataElement, tail: int) -> StrataElement:
    labels = x.labels - {tail}
    out = StrataElement(labels)
    for t, c in x.reduced().trees():
        out = out + StrataElement.from_tree_sum(labels, pushforward(t, tail).scale(c))
    return out


def pullback_class(x: StrataElement, tail: int) -> StrataElement:
    labels = x.labels | {tail}
    out = StrataElement(labels)
    for t, c in x.reduced().trees():
        out = out + StrataElement.from_tree_sum(labels, pullback(t, tail).scale(c))
    return out


def keel_relation(labels: Iterable[int], i: int, j: int, k: int, l: int) -> StrataElement:
    """``sum_{ij|kl} D_S - sum_{ik|jl} D_S``, which vanishes in cohomology."""
    labels = frozenset(labels)
    rest = sorted(labels - {i, j, k, l})
    out = StrataElement(labels)
    for r in range(len(rest) + 1):
        for extra in _subsets(rest, r):
            out = out + StrataElement.divisor(labels, {i, j, *extra})
            out = out - StrataElement.divisor(labels, {i, k, *extra})
    return out


def _subsets(xs, r):
    import itertools
    return itertools.combinations(xs, r)


# ------------------------------------------------- tensors of two classes


Tensor = dict  # (tree', tree'') -> coefficient, reduced in both factors


def tensor_coordinates(pairs: Iterable[tuple[StrataElement, StrataElement, Fraction]]) -> dict:
    """Reduce ``sum c * x (x) y`` to coordinates ``{(k1, i, k2, j): coeff}`` in the bases."""
    out: dict[tuple, Fraction] = {}
    for x, y, c in pairs:
        if not c:
            continue
        cx = get_ring(x.labels, n_max=N_MAX_EXPENSIVE).coordinates(x)
        cy = get_ring(y.labels, n_max=N_MAX_EXPENSIVE).coordinates(y)
        for k1, v1 in cx.items():
            for i, a in enumerate(v1):
                if not a:
                    continue
                for k2, v2 in cy.items():
                    for j, b in enumerate(v2):
                        if b:
                            key = (k1, i, k2, j)
                            out[key] = out.get(key, Fraction(0)) + c * a * b
    return {k: v for k, v in out.items() if v}


def map_diagonal(delta: DiagonalClass, left, right):
    """Apply class maps to both factors of the diagonal, as (x, y, c) triples."""
    out = []
    for s, t, c in delta.pairs:
        out.append((left(StrataElement.stratum(s)), right(StrataElement.stratum(t)), c))
    return out


def lemma_forget_both(n: int) -> bool:
    """``(pi_*, pi_*) Delta_n = 0`` with ``pi`` forgetting the last label."""
    return not tensor_coordinates(map_diagonal(
        diagonal(n), lambda x: pushforward_class(x, n), lambda y: pushforward_class(y, n)))


def lemma_forget_one(n: int) -> bool:
    """``(id, pi_*) Delta_n = (pi^*, id) Delta_{n-1}``."""
    lhs = tensor_coordinates(map_diagonal(diagonal(n), lambda x: x, lambda y: pushforward_class(y, n)))
    rhs = tensor_coordinates(map_diagonal(diagonal(n - 1), lambda x: pullback_class(x, n), lambda y: y))
    return lhs == rhs


def lemma_disjoint(n: int, s: int, t: int) -> bool:
    """``(pi_s^*, pi_t^*) Delta_{[n] - {s,t}} = (pi_{t*}, pi_{s*}) Delta_n``."""
    if s == t:
        raise ValueError("S and T must be disjoint")
    small = frozenset(range(1, n + 1)) - {s, t}
    lhs = tensor_coordinates(map_diagonal(
        diagonal(small), lambda x: pullback_class(x, s), lambda y: pullback_class(y, t)))
    rhs = tensor_coordinates(map_diagonal(
        diagonal(n), lambda x: pushforward_class(x, t), lambda y: pushforward_class(y, s)))
    return lhs == rhs
