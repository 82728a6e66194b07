"""Weighted digraphs, the augmented digraph with a boundary vertex, and
enumeration of rooted spanning forests.

Vertices are ``0 .. N-1`` internally; the boundary ("dagger") vertex of an
augmented digraph is index ``N``.  A forest is stored as a parent tuple:
``parent[i]`` is the head of the unique arc leaving ``i``, or ``None`` when
``i`` is a root.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .errors import InvalidQuery, MissingArc
from .scalars import is_zero, one_like, zero_like

Arc = tuple[int, int]


@dataclass(frozen=True)
class GeneralizedAdjacencyMatrix:
    """Square matrix of scalars read as a weighted digraph (g_ij on arc i->j)."""

    entries: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        n = len(rows)
        if n < 1:
            raise ValueError("matrix must have at least one row")
        for i, r in enumerate(rows):
            if len(r) != n:
                raise ValueError(f"row {i + 1} has {len(r)} entries, expected {n}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows) -> "GeneralizedAdjacencyMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def map(self, fn) -> "GeneralizedAdjacencyMatrix":
        return GeneralizedAdjacencyMatrix(tuple(tuple(fn(x) for x in r) for r in self.entries))

    def transpose(self) -> "GeneralizedAdjacencyMatrix":
        return GeneralizedAdjacencyMatrix(tuple(zip(*self.entries)))

    def strike(self, removed) -> "GeneralizedAdjacencyMatrix":
        """Delete the rows and columns listed in ``removed``."""
        keep = [i for i in range(self.n) if i not in set(removed)]
        return GeneralizedAdjacencyMatrix(tuple(tuple(self.entries[i][j] for j in keep) for i in keep))

    def one(self):
        return one_like(self.entries[0][0])

    def zero(self):
        return zero_like(self.entries[0][0])


@dataclass(frozen=True)
class Digraph:
    """Loop-free weighted digraph on ``n_vertices`` vertices.

    ``arcs`` maps ``(i, j)`` to a weight; arcs absent from the map do not exist.
    """

    n_vertices: int
    arcs: dict
    unit: object = 1

    def out_arcs(self, i: int) -> list:
        return sorted((j, w) for (a, j), w in self.arcs.items() if a == i)

    def weight(self, i: int, j: int):
        try:
            return self.arcs[(i, j)]
        except KeyError:
            raise MissingArc(f"arc ({i}, {j}) is not in the graph") from None

    def one(self):
        return one_like(self.unit)

    def zero(self):
        return zero_like(self.unit)


@dataclass(frozen=True)
class AugmentedDigraph(Digraph):
    """The digraph of a matrix with loops removed and an extra sink vertex.

    Each ordinary vertex ``i`` gets an arc to the sink with weight
    ``-sum_j g_ij`` (diagonal included).  ``source`` keeps the matrix it was
    built from; it is ``None`` when the arc weights were given directly.
    """

    source: Optional[GeneralizedAdjacencyMatrix] = None

    @property
    def n(self) -> int:
        return self.n_vertices - 1

    @property
    def dagger(self) -> int:
        return self.n_vertices - 1

    def row_identity_residuals(self) -> list:
        """``g_i(dagger) + g_ii + sum_{j != i} g_ij`` per row; zero when consistent."""
        if self.source is None:
            raise ValueError("no source matrix stored")
        out = []
        for i in range(self.n):
            total = self.arcs.get((i, self.dagger), self.zero()) + self.source[i, i]
            for j in range(self.n):
                if j != i:
                    total = total + self.arcs.get((i, j), self.zero())
            out.append(total)
        return out


def build_augmented(g: GeneralizedAdjacencyMatrix) -> AugmentedDigraph:
    n = g.n
    arcs = {}
    for i in range(n):
        row_sum = g.zero()
        for j in range(n):
            row_sum = row_sum + g[i, j]
            if j != i:
                arcs[(i, j)] = g[i, j]
        arcs[(i, n)] = -row_sum
    return AugmentedDigraph(n_vertices=n + 1, arcs=arcs, unit=g.one(), source=g)


def matrix_digraph(g: GeneralizedAdjacencyMatrix) -> Digraph:
    """The plain digraph of ``g``: off-diagonal arcs only, no sink vertex."""
    arcs = {(i, j): g[i, j] for i in range(g.n) for j in range(g.n) if i != j}
    return Digraph(n_vertices=g.n, arcs=arcs, unit=g.one())


@dataclass(frozen=True)
class Forest:
    parent: tuple

    @property
    def roots(self) -> frozenset:
        return frozenset(i for i, p in enumerate(self.parent) if p is None)

    @property
    def tree_count(self) -> int:
        return sum(1 for p in self.parent if p is None)

    @property
    def arcs(self) -> list:
        return [(i, p) for i, p in enumerate(self.parent) if p is not None]

    @classmethod
    def from_arcs(cls, n_vertices: int, arcs) -> "Forest":
        parent = [None] * n_vertices
        for i, j in arcs:
            if parent[i] is not None:
                raise ValueError(f"vertex {i} has two out-arcs")
            parent[i] = j
        return cls(tuple(parent))

    def is_valid(self) -> bool:
        """Spanning, out-degree at most one, and free of dicircuits."""
        n = len(self.parent)
        for start in range(n):
            seen = 0
            v = start
            while self.parent[v] is not None:
                v = self.parent[v]
                if not 0 <= v < n:
                    return False
                seen += 1
                if seen > n:
                    return False
        return True


@dataclass(frozen=True)
class ForestQuery:
    """Constraints selecting the forest set with ``k + |required_roots|`` trees.

    ``k=None`` admits every tree count (used for one-pass bucketed sums).
    ``path=(m, n)`` keeps only forests in which the parent walk from ``m``
    reaches ``n``.
    """

    required_roots: frozenset = frozenset()
    k: Optional[int] = 0
    path: Optional[tuple] = None
    forbidden_arcs: frozenset = frozenset()
    required_arcs: frozenset = frozenset()
    include_zero_arcs: bool = False

    def __post_init__(self):
        object.__setattr__(self, "required_roots", frozenset(self.required_roots))
        object.__setattr__(self, "forbidden_arcs", frozenset(self.forbidden_arcs))
        object.__setattr__(self, "required_arcs", frozenset(self.required_arcs))
        if self.k is not None and self.k < 0:
            raise InvalidQuery("k must be nonnegative")
        if self.path is not None and self.path[0] == self.path[1]:
            raise InvalidQuery("path endpoints must differ")


def has_path(f: Forest, m: int, n: int) -> bool:
    if m == n:
        return True
    v = m
    steps = 0
    while f.parent[v] is not None and steps <= len(f.parent):
        v = f.parent[v]
        if v == n:
            return True
        steps += 1
    return False


def productivity(f: Forest, h: Digraph):
    result = h.one()
    for i, j in f.arcs:
        result = result * h.weight(i, j)
    return result


def _check_query(h: Digraph, q: ForestQuery) -> None:
    nv = h.n_vertices
    for w in q.required_roots:
        if not 0 <= w < nv:
            raise InvalidQuery(f"root {w} is not a vertex")
    if q.k is not None and q.k + len(q.required_roots) > nv:
        raise InvalidQuery(
            f"k + |W| = {q.k + len(q.required_roots)} exceeds the vertex count {nv}")
    if q.path is not None:
        for v in q.path:
            if not 0 <= v < nv:
                raise InvalidQuery(f"path endpoint {v} is not a vertex")
    tails = [i for i, _ in q.required_arcs]
    if len(tails) != len(set(tails)):
        raise InvalidQuery("two required arcs leave the same vertex")
    for i, j in q.required_arcs:
        if i in q.required_roots:
            raise InvalidQuery(f"required arc ({i}, {j}) leaves a required root")


def _choices(h: Digraph, q: ForestQuery) -> list:
    """Per-vertex option lists: ``None`` (be a root) then ``(target, weight)`` ascending."""
    forced = dict(q.required_arcs)
    out = []
    for v in range(h.n_vertices):
        if v in q.required_roots:
            out.append([None])
            continue
        arcs = [(j, w) for j, w in h.out_arcs(v)
                if (v, j) not in q.forbidden_arcs
                and (q.include_zero_arcs or not is_zero(w))]
        if v in forced:
            arcs = [(j, w) for j, w in arcs if j == forced[v]]
            out.append(arcs)
        else:
            out.append([None] + arcs)
    return out


def _search(h: Digraph, q: ForestQuery, choices: list) -> Iterator[tuple]:
    """Yield ``(parent_tuple, productivity, root_count)`` for every admissible forest.

    Depth-first over vertices in ascending order; a candidate arc ``v -> t``
    is rejected when the parent walk from ``t`` returns to ``v``.
    """
    nv = h.n_vertices
    must_root = [opts == [None] for opts in choices]
    # suffix counts of vertices that can only be roots
    forced_after = [0] * (nv + 1)
    for v in range(nv - 1, -1, -1):
        forced_after[v] = forced_after[v + 1] + must_root[v]
    if q.k is None:
        lo, hi = len(q.required_roots), nv
    else:
        lo = hi = q.k + len(q.required_roots)
    parent = [None] * nv
    path = q.path

    def closes_cycle(v, t):
        while t is not None:
            if t == v:
                return True
            if t > v:
                # unassigned yet
                return False
            t = parent[t]
        return False

    def reaches(m, n):
        v = m
        while parent[v] is not None:
            v = parent[v]
            if v == n:
                return True
        return False

    def rec(v, weight, roots):
        if v == nv:
            if roots < lo:
                return
            if path is not None and not reaches(*path):
                return
            yield tuple(parent), weight, roots
            return
        remaining = nv - v
        if roots + forced_after[v] > hi or roots + remaining < lo:
            return
        for opt in choices[v]:
            if opt is None:
                if roots + 1 > hi:
                    continue
                parent[v] = None
                yield from rec(v + 1, weight, roots + 1)
            else:
                t, w = opt
                if closes_cycle(v, t):
                    continue
                parent[v] = t
                yield from rec(v + 1, weight * w, roots)
                parent[v] = None

    yield from rec(0, h.one(), 0)


def enumerate_forests(h: Digraph, q: ForestQuery) -> Iterator[Forest]:
    """Yield each forest of the queried set once, in deterministic order."""
    _check_query(h, q)
    for parent, _, _ in _search(h, q, _choices(h, q)):
        yield Forest(parent)


def split_query(h: Digraph, q: ForestQuery) -> list:
    """Partition ``q`` by the choice made at the lowest unconstrained vertex.

    The parts are disjoint, cover ``q``, and their order matches the order in
    which :func:`enumerate_forests` visits them.
    """
    _check_query(h, q)
    choices = _choices(h, q)
    for v, opts in enumerate(choices):
        if len(opts) > 1:
            break
    else:
        return [q]
    parts = []
    for opt in opts:
        if opt is None:
            # v as an extra root; arcs out of v are all forbidden
            forbidden = q.forbidden_arcs | {(v, j) for j, _ in h.out_arcs(v)}
            parts.append(replace(q, forbidden_arcs=frozenset(forbidden)))
        else:
            parts.append(replace(q, required_arcs=q.required_arcs | {(v, opt[0])}))
    return parts


def _bucket_sums(h: Digraph, q: ForestQuery) -> dict:
    sums = {}
    for _, weight, roots in _search(h, q, _choices(h, q)):
        sums[roots] = sums[roots] + weight if roots in sums else weight
    return sums


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("FOREST_SPECTRA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ForestSums:
    """Productivity sums keyed by ``k`` (extra trees beyond the required roots)."""

    by_k: dict = field(default_factory=dict)
    zero: object = 0

    def __getitem__(self, k):
        return self.by_k.get(k, self.zero)


def forest_sums(h: Digraph, q: ForestQuery, workers: Optional[int] = None) -> ForestSums:
    """Sum forest productivities, bucketed by tree count.

    With ``workers > 1`` the query is split by :func:`split_query` and the
    parts are evaluated in a process pool; partial sums are always reduced
    sequentially in partition order so Float64 results are reproducible.
    """
    _check_query(h, q)
    workers = default_workers() if workers is None else workers
    if workers <= 1:
        parts = [_bucket_sums(h, q)]
    else:
        sub = split_query(h, q)
        with ProcessPoolExecutor(max_workers=min(workers, len(sub))) as pool:
            parts = list(pool.map(_bucket_sums, [h] * len(sub), sub))
    merged = {}
    for part in parts:
        for roots in sorted(part):
            merged[roots] = merged[roots] + part[roots] if roots in merged else part[roots]
    base = len(q.required_roots)
    return ForestSums({r - base: s for r, s in merged.items()}, h.zero())
