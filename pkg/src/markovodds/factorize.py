"""Clique factorizations of tables over a graph.

A table ``f`` is compatible with an undirected graph ``G`` when its second
difference over every pair of non-adjacent variables vanishes; such tables
are exactly the sums of terms living on cliques of ``G``.  The terms are
recovered by Moebius inversion of the base-point restrictions

    V_B(x_B) = f(x_B, base elsewhere),
    g_A(x_A) = sum over B inside A of (-1)^{|A - B|} V_B(x_B),

which makes every term vanish whenever one of its coordinates sits at the
base point, and sums back to ``f`` exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .diffs import is_zero, second_difference
from .errors import GuardError, ValidationError
from .graphs import UndirectedGraph, maximal_cliques, separates
from .tables import (
    CategoricalDomain,
    TabularFunction,
    as_subset,
    complement_subset,
)

__all__ = [
    "CliqueFactorization",
    "markov_membership",
    "membership_violations",
    "mobius_decompose",
    "reconstruct",
]

_MOBIUS_MAX_VARS = 20
PRUNE_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class CliqueFactorization:
    """Additive decomposition ``f = constant + sum_A g_A(x_A)``.

    ``terms`` maps nonempty sorted variable subsets to tables over the
    corresponding subdomain.  Every stored term vanishes on slices where any
    of its own coordinates equals the base point.
    """

    domain: CategoricalDomain
    base: tuple[int, ...]
    constant: float
    terms: Mapping[tuple[int, ...], TabularFunction]

    def __post_init__(self) -> None:
        base = self.domain.validate_assignment(self.base)
        object.__setattr__(self, "base", base)
        checked: dict[tuple[int, ...], TabularFunction] = {}
        for subset, table in self.terms.items():
            sub = as_subset(subset, self.domain.n)
            if not sub:
                raise ValidationError("empty subset belongs in `constant`, not terms")
            if table.domain != self.domain.subdomain(sub):
                raise ValidationError(f"term {sub!r} is not over its subdomain")
            checked[sub] = table
        object.__setattr__(self, "terms", MappingProxyType(checked))

    def subsets(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)


def markov_membership(
    f: TabularFunction,
    graph: UndirectedGraph,
    tol: float = 0.0,
    exhaustive: bool = False,
) -> bool:
    """Whether ``f`` splits additively over the cliques of ``graph``.

    The default test takes second differences over every non-adjacent pair
    of variables, which already characterizes membership.  ``exhaustive``
    additionally sweeps every pair of nonempty disjoint subsets separated by
    the rest of the variables; it is exponential and meant for validation.
    """
    return not membership_violations(f, graph, tol, exhaustive)


def membership_violations(
    f: TabularFunction,
    graph: UndirectedGraph,
    tol: float = 0.0,
    exhaustive: bool = False,
) -> list[tuple[tuple[int, ...], tuple[int, ...], float]]:
    """Violating subset pairs ``(A, B, max_abs)``; empty means member."""
    n = f.domain.n
    if graph.n != n:
        raise ValidationError(f"graph has {graph.n} vertices for {n} variables")
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if graph.has_edge(i, j):
                continue
            dd = second_difference(f, (i,), (j,))
            if not is_zero(dd, tol):
                out.append(((i,), (j,), dd.max_abs()))
    if exhaustive:
        for labels in itertools.product((0, 1, 2), repeat=n):
            a = tuple(i for i, s in enumerate(labels) if s == 1)
            b = tuple(i for i, s in enumerate(labels) if s == 2)
            if not a or not b or len(a) + len(b) == 2:
                continue  # pairs are already covered above
            if min(a) > min(b):
                continue  # (A,B) and (B,A) test the same thing
            rest = complement_subset(a + b, n)
            if not separates(graph, a, b, rest):
                continue
            dd = second_difference(f, a, b)
            if not is_zero(dd, tol):
                out.append((a, b, dd.max_abs()))
    return out


def _restriction(f: TabularFunction, subset: tuple[int, ...], base: tuple[int, ...]) -> np.ndarray:
    """Array of ``f`` over the ``subset`` axes, the rest pinned at ``base``."""
    picker: list[object] = [base[i] for i in range(f.domain.n)]
    for v in subset:
        picker[v] = slice(None)
    return np.asarray(f.as_nd()[tuple(picker)])


def _embed(values: np.ndarray, inner: tuple[int, ...], outer: tuple[int, ...]) -> np.ndarray:
    """Broadcast a table over ``inner`` to the axis layout of ``outer``."""
    positions = tuple(k for k, v in enumerate(outer) if v not in set(inner))
    return np.expand_dims(values, axis=positions) if positions else values


def mobius_decompose(
    f: TabularFunction,
    base: Sequence[int] | None = None,
    graph: UndirectedGraph | None = None,
    prune: float = PRUNE_THRESHOLD,
    raw: bool = False,
) -> CliqueFactorization:
    """Split ``f`` into base-point-anchored interaction terms.

    Without a graph every subset of variables is a candidate, which is
    guarded to at most 20 variables.  With a graph, only subsets of its
    maximal cliques are computed; that is exact precisely when ``f`` is a
    member (callers are expected to have checked), and much cheaper.

    Terms whose largest entry is at most ``prune`` are dropped, the constant
    included, unless ``raw`` is set.
    """
    n = f.domain.n
    if n > _MOBIUS_MAX_VARS:
        raise GuardError(
            f"refusing subset enumeration over {n} variables (max {_MOBIUS_MAX_VARS})"
        )
    if base is None:
        base_pt = f.domain.zero_point()
    else:
        base_pt = f.domain.validate_assignment(base)

    if graph is None:
        candidates = [
            tuple(sorted(c))
            for r in range(1, n + 1)
            for c in itertools.combinations(range(n), r)
        ]
    else:
        if graph.n != n:
            raise ValidationError(f"graph has {graph.n} vertices for {n} variables")
        seen = set()
        for clique in maximal_cliques(graph):
            for r in range(1, len(clique) + 1):
                seen.update(itertools.combinations(clique, r))
        candidates = sorted(seen, key=lambda s: (len(s), s))

    restrictions: dict[tuple[int, ...], np.ndarray] = {
        (): np.asarray(_restriction(f, (), base_pt))
    }
    constant = float(restrictions[()])
    terms: dict[tuple[int, ...], TabularFunction] = {}
    for subset in sorted(candidates, key=lambda s: (len(s), s)):
        acc = np.zeros(tuple(f.domain.cardinalities[v] for v in subset))
        for r in range(len(subset) + 1):
            for inner in itertools.combinations(subset, r):
                if inner not in restrictions:
                    restrictions[inner] = _restriction(f, inner, base_pt)
                sign = -1.0 if (len(subset) - r) % 2 else 1.0
                acc = acc + sign * _embed(restrictions[inner], inner, subset)
        table = TabularFunction(f.domain.subdomain(subset), acc.reshape(-1))
        if raw or table.max_abs() > prune:
            terms[subset] = table
    if not raw and abs(constant) <= prune:
        constant = 0.0
    return CliqueFactorization(f.domain, base_pt, constant, terms)


def reconstruct(factorization: CliqueFactorization) -> TabularFunction:
    """Sum the factorization back into a full table."""
    domain = factorization.domain
    full = tuple(range(domain.n))
    acc = np.full(domain.shape, factorization.constant)
    for subset, table in factorization.terms.items():
        shaped = table.values.reshape(table.domain.shape)
        acc = acc + _embed(shaped, subset, full)
    return TabularFunction(domain, acc.reshape(-1))
