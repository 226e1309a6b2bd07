"""Undirected graphs, DAGs, and the structure queries the calculus needs.

Vertices are ``0..n-1`` throughout.  Graphs are immutable; adjacency is
precomputed once.  Maximal cliques come from Bron-Kerbosch with pivoting,
chordality from maximum-cardinality search, and clique trees from a
maximum-weight spanning tree over clique intersections.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ValidationError

__all__ = [
    "UndirectedGraph",
    "Dag",
    "maximal_cliques",
    "is_complete",
    "separates",
    "moralize",
    "is_decomposable",
    "find_decomposition",
    "clique_tree",
]


def _normalize_edges(n: int, edges: Iterable[Sequence[int]]) -> frozenset[tuple[int, int]]:
    out = set()
    for e in edges:
        pair = tuple(int(v) for v in e)
        if len(pair) != 2:
            raise ValidationError(f"edge {pair!r} is not a pair")
        i, j = pair
        if i == j:
            raise ValidationError(f"self-loop on vertex {i}")
        for v in (i, j):
            if not 0 <= v < n:
                raise ValidationError(f"vertex {v} out of range for n={n}")
        out.add((min(i, j), max(i, j)))
    return frozenset(out)


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        n = int(self.n)
        if n < 0:
            raise ValidationError("vertex count must be >= 0")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", _normalize_edges(n, self.edges))
        adj = [set() for _ in range(n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adj", tuple(frozenset(s) for s in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "UndirectedGraph":
        return cls(n, _normalize_edges(int(n), edges))

    @classmethod
    def edgeless(cls, n: int) -> "UndirectedGraph":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "UndirectedGraph":
        return cls.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def path(cls, n: int) -> "UndirectedGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "UndirectedGraph":
        if n < 3:
            raise ValidationError("a cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, n: int) -> "UndirectedGraph":
        if n < 1:
            raise ValidationError("a star needs at least 1 vertex")
        return cls.from_edges(n, [(0, i) for i in range(1, n)])

    def neighbors(self, v: int) -> frozenset[int]:
        if not 0 <= v < self.n:
            raise ValidationError(f"vertex {v} out of range for n={self.n}")
        return self._adj[v]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def with_edge(self, i: int, j: int) -> "UndirectedGraph":
        return UndirectedGraph.from_edges(self.n, list(self.edges) + [(i, j)])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def maximal_cliques(graph: UndirectedGraph) -> list[tuple[int, ...]]:
    """All maximal cliques, each sorted, listed in lexicographic order.

    Bron-Kerbosch with pivoting; isolated vertices come out as singleton
    cliques.  On the empty graph (n=0) the list is empty.
    """
    adj = graph._adj
    found: list[tuple[int, ...]] = []

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            found.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda v: (len(adj[v] & p), -v))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.discard(v)
            x.add(v)

    if graph.n:
        expand(set(), set(range(graph.n)), set())
    return sorted(found)


def is_complete(graph: UndirectedGraph, vertices: Sequence[int]) -> bool:
    """True when every pair inside ``vertices`` is an edge (or |set| <= 1)."""
    vs = sorted({int(v) for v in vertices})
    for v in vs:
        if not 0 <= v < graph.n:
            raise ValidationError(f"vertex {v} out of range for n={graph.n}")
    return all(graph.has_edge(a, b) for k, a in enumerate(vs) for b in vs[k + 1 :])


def separates(
    graph: UndirectedGraph,
    set_a: Sequence[int],
    set_b: Sequence[int],
    set_d: Sequence[int],
) -> bool:
    """True when every path from ``set_a`` to ``set_b`` meets ``set_d``.

    The three sets must be pairwise disjoint.  Empty ``set_a`` or ``set_b``
    is vacuously separated.
    """
    a = {int(v) for v in set_a}
    b = {int(v) for v in set_b}
    d = {int(v) for v in set_d}
    for v in a | b | d:
        if not 0 <= v < graph.n:
            raise ValidationError(f"vertex {v} out of range for n={graph.n}")
    if a & b or a & d or b & d:
        raise ValidationError("A, B, D must be pairwise disjoint")
    seen = set(a)
    queue = deque(a)
    while queue:
        v = queue.popleft()
        if v in b:
            return False
        for w in graph._adj[v]:
            if w not in seen and w not in d:
                seen.add(w)
                queue.append(w)
    return not (seen & b)


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph given by per-vertex parent lists."""

    n: int
    parents: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = int(self.n)
        if n < 1:
            raise ValidationError("a DAG needs at least one vertex")
        if len(self.parents) != n:
            raise ValidationError(
                f"{len(self.parents)} parent lists for {n} vertices"
            )
        norm = []
        for child, plist in enumerate(self.parents):
            ps = tuple(sorted({int(p) for p in plist}))
            for p in ps:
                if not 0 <= p < n:
                    raise ValidationError(f"parent {p} out of range for n={n}")
                if p == child:
                    raise ValidationError(f"vertex {child} is its own parent")
            norm.append(ps)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "parents", tuple(norm))
        # Kahn's algorithm; leftovers mean a directed cycle.
        indeg = [len(ps) for ps in self.parents]
        children: list[list[int]] = [[] for _ in range(n)]
        for child, ps in enumerate(self.parents):
            for p in ps:
                children[p].append(child)
        queue = deque(v for v in range(n) if indeg[v] == 0)
        seen = 0
        while queue:
            v = queue.popleft()
            seen += 1
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if seen != n:
            raise ValidationError("parent lists contain a directed cycle")


def moralize(dag: Dag) -> UndirectedGraph:
    """Drop directions and marry all co-parents of every vertex."""
    edges: set[tuple[int, int]] = set()
    for child, ps in enumerate(dag.parents):
        for p in ps:
            edges.add((min(p, child), max(p, child)))
        for k, p in enumerate(ps):
            for q in ps[k + 1 :]:
                edges.add((min(p, q), max(p, q)))
    return UndirectedGraph.from_edges(dag.n, edges)


def _mcs_order(graph: UndirectedGraph) -> list[int]:
    """Maximum-cardinality search visit order (ties broken by lowest index)."""
    n = graph.n
    weight = [0] * n
    visited = [False] * n
    order = []
    for _ in range(n):
        v = max(
            (u for u in range(n) if not visited[u]),
            key=lambda u: (weight[u], -u),
        )
        visited[v] = True
        order.append(v)
        for w in graph._adj[v]:
            if not visited[w]:
                weight[w] += 1
    return order


def is_decomposable(graph: UndirectedGraph) -> bool:
    """Chordality test: the reversed MCS order must eliminate perfectly."""
    order = _mcs_order(graph)
    seen: set[int] = set()
    for v in order:
        earlier = graph._adj[v] & seen
        if not is_complete(graph, tuple(earlier)):
            return False
        seen.add(v)
    return True


def clique_tree(
    graph: UndirectedGraph,
) -> tuple[list[tuple[int, ...]], list[tuple[int, int]]]:
    """Junction tree (forest joined up) of a decomposable graph.

    Returns the lexicographic maximal-clique list plus spanning-tree edges as
    index pairs ``(i, j)`` with ``i < j``.  Built by Prim on intersection
    sizes, which yields the running-intersection property on chordal graphs;
    cliques from different components join through empty separators.
    """
    if not is_decomposable(graph):
        raise ValidationError("clique trees exist only for decomposable graphs")
    cliques = maximal_cliques(graph)
    k = len(cliques)
    if k <= 1:
        return cliques, []
    sets = [set(c) for c in cliques]
    in_tree = {0}
    edges: list[tuple[int, int]] = []
    while len(in_tree) < k:
        best = None
        for i in sorted(in_tree):
            for j in range(k):
                if j in in_tree:
                    continue
                w = len(sets[i] & sets[j])
                cand = (-w, i, j)
                if best is None or cand < best:
                    best = cand
        _, i, j = best
        edges.append((min(i, j), max(i, j)))
        in_tree.add(j)
    return cliques, sorted(edges)


def find_decomposition(
    graph: UndirectedGraph,
) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] | None:
    """A proper decomposition ``(A, B, D)`` of a decomposable graph.

    ``D`` is a complete separator, ``A`` and ``B`` are the nonempty sides.
    Returns None when the graph is not decomposable or has a single maximal
    clique (nothing to split).
    """
    if not is_decomposable(graph):
        return None
    cliques, edges = clique_tree(graph)
    if not edges:
        return None
    i, j = edges[0]
    sep = set(cliques[i]) & set(cliques[j])
    # split the tree at that edge and pool the vertices of each side
    adj: dict[int, set[int]] = {k: set() for k in range(len(cliques))}
    for a, b in edges:
        if (a, b) != (i, j):
            adj[a].add(b)
            adj[b].add(a)
    side = {i}
    stack = [i]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in side:
                side.add(w)
                stack.append(w)
    left = set().union(*(cliques[k] for k in side))
    right = set().union(*(cliques[k] for k in range(len(cliques)) if k not in side))
    a_side = tuple(sorted(left - sep))
    b_side = tuple(sorted(right - sep))
    return a_side, b_side, tuple(sorted(sep))
