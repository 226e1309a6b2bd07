"""Decision-function complexity of graph-compatible tables.

``sign_of`` collapses a table to a +1/-1 decision rule (zero counts as +1).
``contains_xor`` hunts for an embedded parity pattern: a context for the
remaining variables plus one ordered category pair per scanned variable such
that the decision alternates like a product of per-variable flips across all
corners.  Finding one over a subset ``A`` certifies that no table compatible
with a graph leaving ``A`` incomplete can have produced the rule.

``markov_dimension`` is the exact dimension of the space of tables that
split over a graph's cliques, computed as an integer matrix rank; the
``sign_count_bound`` then caps how many distinct decision rules that space
can realize.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ConsistencyError, GuardError, ValidationError
from .exactlinalg import exact_rank
from .graphs import UndirectedGraph, maximal_cliques
from .tables import (
    CategoricalDomain,
    TabularFunction,
    as_subset,
    complement_subset,
)

__all__ = [
    "DecisionFunction",
    "XorWitness",
    "sign_of",
    "contains_xor",
    "xor_scan",
    "markov_dimension",
    "sign_count_bound",
]

_XOR_SEARCH_GUARD = 10**8
_DIM_CELL_GUARD = 10**6


@dataclass(frozen=True, eq=False)
class DecisionFunction:
    """A +1/-1 labeling of every cell of a domain, flat row-major order."""

    domain: CategoricalDomain
    signs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.signs, dtype=np.int8).reshape(-1)
        if arr.size != self.domain.size:
            raise ValidationError(
                f"got {arr.size} signs for a domain of size {self.domain.size}"
            )
        if not np.all(np.isin(arr, (-1, 1))):
            raise ValidationError("signs must be +1 or -1")
        arr.setflags(write=False)
        object.__setattr__(self, "signs", arr)

    def as_nd(self) -> np.ndarray:
        return self.signs.reshape(self.domain.shape)

    def __call__(self, x: Sequence[int]) -> int:
        return int(self.signs[self.domain.flat_index(x)])


def sign_of(f: TabularFunction) -> DecisionFunction:
    """Pointwise sign of ``f`` with the tie convention sign(0) = +1."""
    return DecisionFunction(f.domain, np.where(f.values >= 0.0, 1, -1))


@dataclass(frozen=True)
class XorWitness:
    """Evidence that a decision embeds a parity over ``subset``.

    ``context`` pins the complement variables (aligned with the sorted
    complement).  ``pairs`` holds one ordered category pair ``(marked,
    unmarked)`` per subset variable; on each corner assembled from these
    pairs the decision equals ``(-1) ** (number of marked coordinates)``.
    """

    subset: tuple[int, ...]
    context: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]

    def corners(self, domain: CategoricalDomain) -> Iterator[tuple[tuple[int, ...], int]]:
        """Yield (full assignment, expected sign) for all corners."""
        comp = complement_subset(self.subset, domain.n)
        for choice in itertools.product((0, 1), repeat=len(self.subset)):
            x = [0] * domain.n
            for v, c in zip(comp, self.context):
                x[v] = c
            marked = 0
            for (v, pair), pick in zip(zip(self.subset, self.pairs), choice):
                x[v] = pair[pick]
                marked += pick == 0
            yield tuple(x), (-1) ** marked

    def holds_for(self, phi: DecisionFunction) -> bool:
        return all(phi(x) == s for x, s in self.corners(phi.domain))


def contains_xor(
    phi: DecisionFunction, variables: Sequence[int]
) -> XorWitness | None:
    """Search for a parity pattern of ``phi`` over the given variables.

    Deterministic exhaustive search: contexts for the complement run in
    flat-index order, and for each context the ordered category pairs run
    lexicographically variable by variable.  The first witness wins.

    Raises
    ------
    GuardError
        If the search space exceeds 10**8 corner evaluations.
    """
    sub = as_subset(variables, phi.domain.n)
    if not sub:
        raise ValidationError("need at least one variable to scan")
    cards = phi.domain.cardinalities
    comp = complement_subset(sub, phi.domain.n)
    n_contexts = math.prod(cards[v] for v in comp) if comp else 1
    pair_lists = [
        [(a, b) for a in range(cards[v]) for b in range(cards[v]) if b != a]
        for v in sub
    ]
    combos = math.prod(len(p) for p in pair_lists)
    if n_contexts * combos * (2 ** len(sub)) > _XOR_SEARCH_GUARD:
        raise GuardError("XOR search space exceeds the 1e8 evaluation guard")
    n = phi.domain.n
    nd = phi.as_nd()
    context_iter = (
        itertools.product(*(range(cards[v]) for v in comp)) if comp else iter([()])
    )
    for context in context_iter:
        base = [0] * n
        for v, c in zip(comp, context):
            base[v] = c
        for pairs in itertools.product(*pair_lists):
            ok = True
            for choice in itertools.product((0, 1), repeat=len(sub)):
                marked = 0
                for (v, pair), pick in zip(zip(sub, pairs), choice):
                    base[v] = pair[pick]
                    marked += pick == 0
                if nd[tuple(base)] != (-1) ** marked:
                    ok = False
                    break
            if ok:
                return XorWitness(sub, tuple(context), tuple(pairs))
    return None


def xor_scan(phi: DecisionFunction, max_order: int | None = None) -> list[XorWitness]:
    """All subsets up to ``max_order`` that embed a parity, with witnesses.

    Results come back sorted by (size, subset).  Because a parity over a set
    restricts to a parity over every nonempty subset of it, the reported
    family must be downward closed; this is re-checked and a violation
    raises, since it would mean the search itself is broken.
    """
    n = phi.domain.n
    order = n if max_order is None else int(max_order)
    if not 1 <= order <= n:
        raise ValidationError(f"max_order must be in 1..{n}")
    hits: list[XorWitness] = []
    for size in range(1, order + 1):
        for sub in itertools.combinations(range(n), size):
            w = contains_xor(phi, sub)
            if w is not None:
                hits.append(w)
    found = {w.subset for w in hits}
    for subset in found:
        if len(subset) == 1:
            continue
        for smaller in itertools.combinations(subset, len(subset) - 1):
            if smaller not in found:
                raise ConsistencyError(
                    f"parity over {subset} without one over {smaller}; "
                    "the search violated downward monotonicity"
                )
    return hits


def _config_indicator_matrix(
    graph: UndirectedGraph, domain: CategoricalDomain
) -> list[list[int]]:
    """Rows: cells of the domain; columns: clique-configuration indicators."""
    cells = domain.size
    cliques = maximal_cliques(graph)
    n_cols = sum(math.prod(domain.cardinalities[v] for v in c) for c in cliques)
    if cells > _DIM_CELL_GUARD or cells * n_cols > 5 * 10**7:
        raise GuardError(
            f"indicator matrix {cells} x {n_cols} exceeds the materialization guard"
        )
    columns = []
    coords = np.indices(domain.shape).reshape(domain.n, -1)
    for clique in cliques:
        sub_cards = [domain.cardinalities[v] for v in clique]
        proj = np.ravel_multi_index([coords[v] for v in clique], sub_cards)
        onehot = proj[:, None] == np.arange(math.prod(sub_cards))[None, :]
        columns.append(onehot.astype(np.int64))
    matrix = np.concatenate(columns, axis=1)
    return matrix.tolist()


def markov_dimension(graph: UndirectedGraph, domain: CategoricalDomain) -> int:
    """Exact dimension of the span of clique-configuration indicators.

    Computed as an integer matrix rank, never through floating point.  A
    graph whose single maximal clique covers every variable spans all cell
    indicators, so the rank is the domain size without any elimination.
    """
    if graph.n != domain.n:
        raise ValidationError(
            f"graph has {graph.n} vertices for {domain.n} variables"
        )
    cliques = maximal_cliques(graph)
    if any(len(c) == domain.n for c in cliques):
        return domain.size
    return exact_rank(_config_indicator_matrix(graph, domain))


def sign_count_bound(graph: UndirectedGraph, domain: CategoricalDomain) -> int:
    """Upper bound on how many decision rules the graph's span can realize.

    With ``d`` the span dimension and ``m`` the number of cells, the bound
    is ``2 * sum(C(m - 1, k) for k in range(d))``, computed in exact integer
    arithmetic.
    """
    d = markov_dimension(graph, domain)
    m = domain.size
    return 2 * sum(math.comb(m - 1, k) for k in range(d))
