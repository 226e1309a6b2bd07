"""Maximum-likelihood fitting with a fixed log-odds table.

Starting from ``p(x, c) ~ exp(c f(x) / 2)``, iterative proportional fitting
rescales the joint by empirical predictor marginals, one maximal clique at a
time.  Each rescale multiplies both class slices of a cell by the same
factor, so the log-odds table never moves; what gets fitted is the predictor
marginal inside the family spanned by clique multipliers.  Empirical clique
configurations with zero count zero out their cells exactly and stay zero,
which is how the closure of the model enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConsistencyError, ValidationError
from .factorize import markov_membership
from .graphs import UndirectedGraph, maximal_cliques
from .models import GenerativeClassifier
from .tables import CategoricalDomain, TabularFunction, as_subset, complement_subset

__all__ = [
    "Dataset",
    "IpfReport",
    "empirical_marginal",
    "marginal_fit",
    "fit_ipf",
    "log_likelihood",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_SWEEPS = 10_000
_DRIFT_TOL = 1e-12
_MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labeled categorical records: assignments plus a +1/-1 class each."""

    domain: CategoricalDomain
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=np.int64)
        y = np.array(self.y, dtype=np.int64).reshape(-1)
        if x.ndim != 2 or x.shape[1] != self.domain.n:
            raise ValidationError(
                f"record matrix must be (N, {self.domain.n}), got {x.shape}"
            )
        if x.shape[0] != y.shape[0]:
            raise ValidationError("record matrix and labels disagree on N")
        if x.shape[0] < 1:
            raise ValidationError("a dataset needs at least one record")
        cards = np.asarray(self.domain.cardinalities)
        if np.any(x < 0) or np.any(x >= cards[None, :]):
            raise ValidationError("record has a category index out of range")
        if not np.all(np.isin(y, (-1, 1))):
            raise ValidationError("class labels must be +1 or -1")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_records(
        cls,
        domain: CategoricalDomain,
        records: Iterable[tuple[Sequence[int], int]],
    ) -> "Dataset":
        xs, ys = [], []
        for assignment, label in records:
            xs.append(domain.validate_assignment(assignment))
            ys.append(int(label))
        return cls(domain, np.array(xs, dtype=np.int64), np.array(ys, dtype=np.int64))

    @property
    def n_records(self) -> int:
        return int(self.x.shape[0])

    def flat_indices(self) -> np.ndarray:
        return np.ravel_multi_index(self.x.T, self.domain.shape)


def empirical_marginal(data: Dataset, variables: Sequence[int]) -> TabularFunction:
    """Relative frequencies of the ``variables`` configurations, class ignored."""
    sub = as_subset(variables, data.domain.n)
    if not sub:
        raise ValidationError("need at least one variable for a marginal")
    subdomain = data.domain.subdomain(sub)
    idx = np.ravel_multi_index(data.x[:, sub].T, subdomain.shape)
    counts = np.bincount(idx, minlength=subdomain.size).astype(np.float64)
    return TabularFunction(subdomain, counts / data.n_records)


def _marginal_of(model: GenerativeClassifier, sub: tuple[int, ...]) -> np.ndarray:
    comp = complement_subset(sub, model.domain.n)
    q = model.predictor_marginal().reshape(model.domain.shape)
    return q.sum(axis=comp) if comp else q


def marginal_fit(
    model: GenerativeClassifier, variables: Sequence[int], data: Dataset
) -> GenerativeClassifier:
    """One proportional-fitting step toward the empirical marginal.

    Every cell is scaled by ``empirical / current`` for its configuration of
    ``variables``; 0/0 counts as 0, and a positive empirical mass over a
    zero current marginal is unrecoverable and raises.
    """
    if data.domain != model.domain:
        raise ValidationError("dataset and model live on different domains")
    sub = as_subset(variables, model.domain.n)
    emp = empirical_marginal(data, sub).values.reshape(
        tuple(model.domain.cardinalities[v] for v in sub)
    )
    cur = _marginal_of(model, sub)
    if np.any((emp > 0) & (cur == 0)):
        raise ConsistencyError(
            "empirical mass on a configuration the model gives zero probability"
        )
    ratio = np.divide(emp, cur, out=np.zeros_like(emp), where=cur > 0)
    # place the ratio's axes back into the full shape for broadcasting
    expand = tuple(k for k in range(model.domain.n) if k not in set(sub))
    ratio_full = np.expand_dims(ratio, axis=expand) if expand else ratio
    shape = model.domain.shape
    new_plus = (model.p_plus.reshape(shape) * ratio_full).reshape(-1)
    new_minus = (model.p_minus.reshape(shape) * ratio_full).reshape(-1)
    return GenerativeClassifier(model.domain, new_plus, new_minus)


def log_likelihood(model: GenerativeClassifier, data: Dataset) -> float:
    """Joint log-likelihood; -inf as soon as any record has zero probability."""
    if data.domain != model.domain:
        raise ValidationError("dataset and model live on different domains")
    idx = data.flat_indices()
    probs = np.where(data.y > 0, model.p_plus[idx], model.p_minus[idx])
    if np.any(probs == 0):
        return float("-inf")
    return float(np.log(probs).sum())


@dataclass(frozen=True)
class IpfReport:
    """What happened during a fit.

    ``loglik_trace`` starts with the initial model's log-likelihood and adds
    one entry per sweep; it must be nondecreasing up to 1e-12 slack.
    ``odds_gap_trace`` records the worst log-odds deviation from the target
    table on cells that still carry mass, one entry per sweep.
    """

    iterations: int
    final_marginal_gap: float
    loglik_trace: tuple[float, ...]
    converged: bool
    odds_gap_trace: tuple[float, ...]


def _odds_gap(model: GenerativeClassifier, f: TabularFunction) -> float:
    support = (model.p_plus > 0) & (model.p_minus > 0)
    if not np.any(support):
        return 0.0
    dev = (
        np.log(model.p_plus[support])
        - np.log(model.p_minus[support])
        - f.values[support]
    )
    return float(np.max(np.abs(dev)))


def fit_ipf(
    f: TabularFunction,
    graph: UndirectedGraph,
    data: Dataset,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> tuple[GenerativeClassifier, IpfReport]:
    """Maximum-likelihood classifier with log-odds pinned to ``f``.

    ``f`` must split over the graph's cliques (within 1e-9).  Sweeps visit
    the maximal cliques in lexicographic order; after each sweep the joint
    is renormalized (the drift absorbed must stay under 1e-12) and
    convergence is declared once every clique marginal matches its
    empirical counterpart within ``tol`` in sup norm.
    """
    if f.domain != data.domain:
        raise ValidationError("log-odds table and dataset live on different domains")
    if graph.n != f.domain.n:
        raise ValidationError(
            f"graph has {graph.n} vertices for {f.domain.n} variables"
        )
    if max_sweeps < 1:
        raise ValidationError("max_sweeps must be >= 1")
    if not markov_membership(f, graph, _MEMBERSHIP_TOL):
        raise ValidationError("log-odds table does not split over the graph's cliques")
    cliques = maximal_cliques(graph)

    shift = 0.5 * f.max_abs()
    w_plus = np.exp(0.5 * f.values - shift)
    w_minus = np.exp(-0.5 * f.values - shift)
    total = float(w_plus.sum() + w_minus.sum())
    model = GenerativeClassifier(f.domain, w_plus / total, w_minus / total)

    empiricals = {
        c: empirical_marginal(data, c).values.reshape(
            tuple(f.domain.cardinalities[v] for v in c)
        )
        for c in cliques
    }

    def marginal_gap(m: GenerativeClassifier) -> float:
        return max(
            float(np.max(np.abs(_marginal_of(m, c) - empiricals[c]))) for c in cliques
        )

    loglik_trace = [log_likelihood(model, data)]
    odds_gaps: list[float] = []
    converged = False
    sweeps = 0
    gap = marginal_gap(model)
    for _ in range(max_sweeps):
        sweeps += 1
        for clique in cliques:
            model = marginal_fit(model, clique, data)
        mass = float(model.p_plus.sum() + model.p_minus.sum())
        if abs(mass - 1.0) > _DRIFT_TOL:
            raise ConsistencyError(
                f"normalization drifted by {abs(mass - 1.0):.3e} in one sweep"
            )
        model = GenerativeClassifier(
            f.domain, model.p_plus / mass, model.p_minus / mass
        )
        loglik_trace.append(log_likelihood(model, data))
        odds_gaps.append(_odds_gap(model, f))
        gap = marginal_gap(model)
        if gap <= tol:
            converged = True
            break
    report = IpfReport(
        iterations=sweeps,
        final_marginal_gap=gap,
        loglik_trace=tuple(loglik_trace),
        converged=converged,
        odds_gap_trace=tuple(odds_gaps),
    )
    return model, report
