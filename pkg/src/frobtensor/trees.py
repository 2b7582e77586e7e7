"""Stable labelled trees, stabilisation and the forgetful maps.

A stable S-tree is determined by its tail labels and the set of bipartitions
of S cut out by its edges.  We store exactly that: each edge is the half of
its bipartition *not* containing the smallest label (the root).  Two trees
are isomorphic (fixing tail labels) iff these data agree, so the
``StableTree`` value is its own canonical form.

Textual notation: nested parentheses, each group a vertex listing its tails
and child groups, e.g. ``(1 2 (3 4 5))`` is the 5-tree with one edge
separating {1, 2} from {3, 4, 5}.  Any rooting parses to the same tree.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping

Split = frozenset


def _normalise(side: Iterable[int], labels: frozenset) -> frozenset:
    side = frozenset(side)
    if min(labels) in side:
        return labels - side
    return side


def _nontrivial(side: frozenset, labels: frozenset) -> bool:
    return 2 <= len(side) <= len(labels) - 2


def compatible(a: frozenset, b: frozenset) -> bool:
    """Compatibility of two normalised splits (both avoid the root label)."""
    return a <= b or b <= a or not (a & b)


@dataclass(frozen=True)
class StableTree:
    labels: frozenset
    splits: frozenset

    def __post_init__(self):
        labels = frozenset(self.labels)
        if len(labels) < 3:
            raise ValueError("a stable tree needs at least 3 tails")
        splits = frozenset(_normalise(A, labels) for A in self.splits)
        for A in splits:
            if not A <= labels:
                raise ValueError(f"split {sorted(A)} uses unknown labels")
            if not _nontrivial(A, labels):
                raise ValueError(f"split {sorted(A)} does not come from a stable edge")
        for A, B in itertools.combinations(splits, 2):
            if not compatible(A, B):
                raise ValueError(f"splits {sorted(A)} and {sorted(B)} cross")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "splits", splits)

    # -- constructors

    @classmethod
    def corolla(cls, labels: Iterable[int]) -> "StableTree":
        return cls(frozenset(labels), frozenset())

    @classmethod
    def from_splits(cls, labels: Iterable[int], splits: Iterable[Iterable[int]]) -> "StableTree":
        return cls(frozenset(labels), frozenset(frozenset(A) for A in splits))

    @classmethod
    def parse(cls, text: str) -> "StableTree":
        return parse_tree(text)

    # -- basic data

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.splits)

    codim = num_edges

    @property
    def root(self) -> int:
        return min(self.labels)

    def sort_key(self):
        return (len(self.splits), sorted(self.labels),
                sorted((len(A), sorted(A)) for A in self.splits))

    def __lt__(self, other: "StableTree"):
        return self.sort_key() < other.sort_key()

    # -- vertex structure

    def vertices(self) -> list[frozenset | None]:
        """Vertex ids: ``None`` for the root vertex, else the split of the edge above it."""
        return [None] + sorted(self.splits, key=lambda A: (len(A), sorted(A)))

    def children(self, v: frozenset | None) -> list[frozenset]:
        below = [A for A in self.splits if v is None or (A < v)]
        return [A for A in below if not any(A < B for B in below)]

    def tails_at(self, v: frozenset | None) -> frozenset:
        pool = self.labels if v is None else v
        covered = frozenset().union(*self.children(v)) if self.children(v) else frozenset()
        return pool - covered

    def valence(self, v: frozenset | None) -> int:
        return len(self.tails_at(v)) + len(self.children(v)) + (0 if v is None else 1)

    def vertex_of(self, label: int) -> frozenset | None:
        containing = [A for A in self.splits if label in A]
        return min(containing, key=len) if containing else None

    def vertex_flags(self, v: frozenset | None) -> list[tuple]:
        """Flags at ``v``: ``("t", label)`` for tails, ``("e", A, 0|1)`` for half-edges.

        Half-edge ``("e", A, 0)`` sits at the upper end of edge ``A`` and
        ``("e", A, 1)`` at its lower end.
        """
        flags = [("t", x) for x in sorted(self.tails_at(v))]
        flags += [("e", A, 0) for A in sorted(self.children(v), key=sorted)]
        if v is not None:
            flags.append(("e", v, 1))
        return flags

    def quadruple(self):
        """The data ``(F, V, boundary, j)`` of the tree."""
        V = self.vertices()
        boundary = {}
        for v in V:
            for f in self.vertex_flags(v):
                boundary[f] = v
        F = list(boundary)
        j = {}
        for f in F:
            if f[0] == "t":
                j[f] = f
            else:
                j[f] = ("e", f[1], 1 - f[2])
        return F, V, boundary, j

    def edge_sides(self, A: frozenset) -> tuple[frozenset, frozenset]:
        """Tails on the (upper, lower) side of edge ``A``."""
        return self.labels - A, A

    # -- text

    def to_text(self) -> str:
        def render(v):
            items = [(x, str(x)) for x in self.tails_at(v)]
            items += [(min(A), render(A)) for A in self.children(v)]
            return "(" + " ".join(s for _, s in sorted(items)) + ")"
        return render(None)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"StableTree({self.to_text()})"

    def relabel(self, mapping: Mapping[int, int]) -> "StableTree":
        return StableTree.from_splits((mapping[x] for x in self.labels),
                                      ([mapping[x] for x in A] for A in self.splits))


# ------------------------------------------------------------------ parsing


_TOKEN = re.compile(r"\(|\)|-?\d+")


def parse_tree(text: str) -> StableTree:
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != re.sub(r"[\s,]+", "", text):
        raise ValueError(f"unexpected characters in tree notation {text!r}")
    pos = 0
    groups: list[frozenset] = []

    def group() -> frozenset:
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError("tree notation must start with '('")
        pos += 1
        labels: set[int] = set()
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                sub = group()
                groups.append(sub)
                labels |= sub
            else:
                x = int(tokens[pos])
                if x in labels:
                    raise ValueError(f"label {x} repeated")
                labels.add(x)
                pos += 1
        if pos >= len(tokens):
            raise ValueError("unbalanced parentheses")
        pos += 1
        return frozenset(labels)

    try:
        everything = group()
    except IndexError:
        raise ValueError("unbalanced parentheses") from None
    if pos != len(tokens):
        raise ValueError("trailing input after tree")
    raw = RawTree.from_groups(everything, groups, text)
    return raw.stabilize(check_stable=True)


# ------------------------------------------------------------- raw trees


class RawTree:
    """A tree with tails that need not be stable.

    ``tails[v]`` lists the tail labels at vertex ``v`` and ``edges`` is a list
    of vertex pairs.  Used as input to :meth:`stabilize`.
    """

    def __init__(self, tails: Mapping[Hashable, Iterable[int]], edges: Iterable[tuple[Hashable, Hashable]]):
        self.tails = {v: list(ts) for v, ts in tails.items()}
        self.edges = [tuple(e) for e in edges]
        for u, w in self.edges:
            if u not in self.tails or w not in self.tails or u == w:
                raise ValueError(f"bad edge {(u, w)}")
        all_labels = [x for ts in self.tails.values() for x in ts]
        if len(set(all_labels)) != len(all_labels):
            raise ValueError("tail labels must be distinct")
        if len(self.edges) != len(self.tails) - 1 or not self._connected():
            raise ValueError("edge graph is not a tree")

    @classmethod
    def from_groups(cls, everything, groups, text=""):
        # vertices: the root group and each nested group; a group's parent is
        # the smallest group strictly containing it
        verts = [everything] + groups
        if len(set(groups)) != len(groups):
            raise ValueError(f"ambiguous nesting in {text!r}")
        tails, edges = {}, []
        for i, g in enumerate(verts):
            kids = [h for h in groups if h < g and not any(h < k < g for k in groups)]
            covered = frozenset().union(*kids) if kids else frozenset()
            tails[i] = sorted(g - covered)
            if i:
                parents = [j for j, h in enumerate(verts) if g < h]
                parent = min(parents, key=lambda j: len(verts[j]))
                edges.append((parent, i))
        return cls(tails, edges)

    def _connected(self) -> bool:
        if not self.tails:
            return False
        adj = {v: set() for v in self.tails}
        for u, w in self.edges:
            adj[u].add(w)
            adj[w].add(u)
        start = next(iter(self.tails))
        seen, stack = {start}, [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.tails)

    @property
    def labels(self) -> frozenset:
        return frozenset(x for ts in self.tails.values() for x in ts)

    def valence(self, v) -> int:
        return len(self.tails[v]) + sum(1 for e in self.edges if v in e)

    def is_stable(self) -> bool:
        return all(self.valence(v) >= 3 for v in self.tails)

    def contract(self, edge_index: int) -> "RawTree":
        u, w = self.edges[edge_index]
        tails = {v: list(ts) for v, ts in self.tails.items() if v != w}
        tails[u] = tails[u] + self.tails[w]
        edges = []
        for i, (a, b) in enumerate(self.edges):
            if i == edge_index:
                continue
            edges.append((u if a == w else a, u if b == w else b))
        return RawTree(tails, edges)

    def stabilize(self, order: Iterable[int] | None = None, check_stable: bool = False) -> StableTree:
        """Contract one edge at each unstable vertex until everything is stable.

        ``order`` optionally picks, at each step, which of the candidate
        edges to contract (index into the candidate list modulo its length);
        the result does not depend on it.
        """
        if len(self.labels) < 3:
            raise ValueError("stabilisation needs at least 3 tails")
        if check_stable and not self.is_stable():
            raise ValueError("tree notation describes an unstable tree")
        choices = iter(order) if order is not None else None
        tree = self
        while True:
            bad = [v for v in tree.tails if tree.valence(v) < 3]
            if not bad:
                break
            v = bad[0]
            candidates = [i for i, e in enumerate(tree.edges) if v in e]
            pick = next(choices, 0) if choices is not None else 0
            tree = tree.contract(candidates[pick % len(candidates)])
        return tree._as_stable()

    def edge_splits(self) -> list[frozenset]:
        """Tail set on one side of each edge."""
        adj = {v: [] for v in self.tails}
        for u, w in self.edges:
            adj[u].append(w)
            adj[w].append(u)
        out = []
        for u, w in self.edges:
            seen, stack = {w, u}, [w]
            side = set(self.tails[w])
            while stack:
                for y in adj[stack.pop()]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
                        side.update(self.tails[y])
            out.append(frozenset(side))
        return out

    def _as_stable(self) -> StableTree:
        labels = self.labels
        return StableTree(labels, frozenset(_normalise(A, labels) for A in self.edge_splits()))


def stabilize(tree: RawTree | StableTree, order: Iterable[int] | None = None) -> StableTree:
    if isinstance(tree, StableTree):
        return tree
    return tree.stabilize(order)


# ---------------------------------------------------------------- tree sums


class TreeSum:
    """Finite Q-linear combination of stable trees (zero terms dropped)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[StableTree, Fraction] | Iterable[tuple[StableTree, Fraction]] = ()):
        self.terms: dict[StableTree, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for t, c in items:
            self.add(t, c)

    def add(self, tree: StableTree, coeff=1):
        c = self.terms.get(tree, Fraction(0)) + Fraction(coeff)
        if c:
            self.terms[tree] = c
        else:
            self.terms.pop(tree, None)

    def __iter__(self) -> Iterator[tuple[StableTree, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, TreeSum):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __add__(self, other: "TreeSum") -> "TreeSum":
        out = TreeSum(self.terms)
        for t, c in other.terms.items():
            out.add(t, c)
        return out

    def scale(self, k) -> "TreeSum":
        return TreeSum({t: c * k for t, c in self.terms.items()})

    def __repr__(self):
        return " + ".join(f"{c}*{t}" for t, c in self) or "0"


# ----------------------------------------------------------- forgetful maps


def pushforward(tree: StableTree, s: int) -> TreeSum:
    """Forget tail ``s``; the stabilised tree if stabilisation was needed, else 0."""
    if s not in tree.labels:
        raise ValueError(f"{s} is not a tail of {tree}")
    if tree.n < 4:
        raise ValueError("cannot forget a tail of a 3-tree")
    labels = tree.labels - {s}
    new = set()
    for A in tree.splits:
        side = _normalise(A - {s}, labels)
        if _nontrivial(side, labels):
            new.add(side)
    if len(new) == tree.num_edges:
        return TreeSum()
    return TreeSum({StableTree(labels, frozenset(new)): 1})


def pullback(tree: StableTree, s: int) -> TreeSum:
    """Sum over vertices ``v`` of the tree with a new tail ``s`` attached at ``v``."""
    if s in tree.labels:
        raise ValueError(f"label {s} already used")
    labels = tree.labels | {s}
    out = TreeSum()
    for v in tree.vertices():
        splits = []
        for A in tree.splits:
            side = A | {s} if (v is not None and v <= A) else A
            splits.append(_normalise(side, labels))
        out.add(StableTree(labels, frozenset(splits)), 1)
    return out


def pushforward_sum(ts: TreeSum, s: int) -> TreeSum:
    out = TreeSum()
    for t, c in ts.terms.items():
        for u, d in pushforward(t, s).terms.items():
            out.add(u, c * d)
    return out


def pullback_sum(ts: TreeSum, s: int) -> TreeSum:
    out = TreeSum()
    for t, c in ts.terms.items():
        for u, d in pullback(t, s).terms.items():
            out.add(u, c * d)
    return out


# ------------------------------------------------------------- enumeration

N_TREE_MAX = 10


def all_splits(labels: Iterable[int]) -> list[frozenset]:
    labels = frozenset(labels)
    root = min(labels)
    rest = sorted(labels - {root})
    out = []
    for k in range(2, len(labels) - 1):
        out.extend(frozenset(c) for c in itertools.combinations(rest, k))
    return out


def enumerate_stable_trees(n: int | Iterable[int], e: int) -> list[StableTree]:
    """All stable trees with the given tails (``1..n`` if an int) and ``e`` edges."""
    labels = frozenset(range(1, n + 1)) if isinstance(n, int) else frozenset(n)
    m = len(labels)
    if m < 3:
        raise ValueError("need at least 3 tails")
    if m > N_TREE_MAX:
        raise ValueError(f"enumeration supported for at most {N_TREE_MAX} tails")
    if not 0 <= e <= m - 3:
        raise ValueError(f"edge count must lie in [0, {m - 3}]")
    splits = all_splits(labels)
    out: list[StableTree] = []

    def extend(start: int, chosen: list[frozenset]):
        if len(chosen) == e:
            out.append(StableTree(labels, frozenset(chosen)))
            return
        for i in range(start, len(splits)):
            A = splits[i]
            if all(compatible(A, B) for B in chosen):
                chosen.append(A)
                extend(i + 1, chosen)
                chosen.pop()

    extend(0, [])
    return sorted(out)
