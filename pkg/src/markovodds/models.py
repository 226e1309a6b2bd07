"""Generative binary classifiers over a categorical predictor domain.

A classifier is the joint law of predictors and a +1/-1 class, stored as two
tables ``p_plus`` and ``p_minus`` that sum to one together.  The log-odds
table ``ln(p_plus / p_minus)`` carries all the decision information; a
classifier is Markov with respect to a graph exactly when the predictors in
every non-adjacent pair are conditionally independent given the rest and the
class, which in turn is a second-difference statement about the log joint.

Strict positivity is the textbook setting.  Limits of iterative fitting can
carry exact zeros, so zeros are representable here; operations that are
undefined on zeros (the log-odds table, the differential independence test)
either refuse or fall back to the product-form test, which needs no logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diffs import second_difference
from .errors import (
    ConsistencyError,
    PositivityError,
    ValidationError,
)
from .factorize import markov_membership
from .graphs import UndirectedGraph
from .tables import CategoricalDomain, TabularFunction, as_subset, complement_subset

__all__ = [
    "GenerativeClassifier",
    "CiCheck",
    "log_odds",
    "decide",
    "check_ci",
    "ci_details",
    "is_g_markov",
    "from_log_odds",
]

NORMALIZATION_TOL = 1e-12
DEFAULT_CI_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GenerativeClassifier:
    """Joint distribution of categorical predictors and a binary class.

    ``p_plus[i]`` and ``p_minus[i]`` are the joint probabilities of cell
    ``i`` (flat row-major order) with class +1 and -1; together they must
    sum to one within 1e-12.  Entries are nonnegative; exact zeros are
    allowed and mark the extended (closure) case.
    """

    domain: CategoricalDomain
    p_plus: np.ndarray
    p_minus: np.ndarray

    def __post_init__(self) -> None:
        for name in ("p_plus", "p_minus"):
            arr = np.array(getattr(self, name), dtype=np.float64).reshape(-1)
            if arr.size != self.domain.size:
                raise ValidationError(
                    f"{name}: got {arr.size} values for a domain of size {self.domain.size}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name}: probabilities must be finite")
            if np.any(arr < 0):
                raise ValidationError(f"{name}: probabilities must be >= 0")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        total = float(self.p_plus.sum() + self.p_minus.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValidationError(
                f"joint mass {total!r} is not 1 within {NORMALIZATION_TOL}"
            )

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.p_plus > 0) and np.all(self.p_minus > 0))

    def joint(self, label: int) -> np.ndarray:
        if label == 1:
            return self.p_plus
        if label == -1:
            return self.p_minus
        raise ValidationError(f"class label must be +1 or -1, got {label!r}")

    def predictor_marginal(self) -> np.ndarray:
        """P(X = x), flat."""
        return self.p_plus + self.p_minus

    def posterior_plus(self) -> np.ndarray:
        """P(C = +1 | X = x), NaN on cells with no mass."""
        q = self.predictor_marginal()
        out = np.full(self.domain.size, np.nan)
        np.divide(self.p_plus, q, out=out, where=q > 0)
        return out


def log_odds(model: GenerativeClassifier) -> TabularFunction:
    """The discrimination table ``ln(p_plus / p_minus)``.

    Raises
    ------
    PositivityError
        If any cell of either class has zero probability.
    """
    if not model.strictly_positive:
        raise PositivityError("log-odds needs strictly positive probabilities")
    return TabularFunction(model.domain, np.log(model.p_plus) - np.log(model.p_minus))


def decide(model: GenerativeClassifier, x: Sequence[int]) -> int:
    """Maximum-joint-probability class at ``x``; ties go to +1."""
    i = model.domain.flat_index(x)
    return 1 if model.p_plus[i] >= model.p_minus[i] else -1


@dataclass(frozen=True)
class CiCheck:
    """Outcome of a conditional-independence test between two subsets."""

    independent: bool
    toric_residual: float
    diff_residual: float | None
    toric_only: bool


def _toric_residual(
    model: GenerativeClassifier, a: tuple[int, ...], b: tuple[int, ...]
) -> float:
    """Largest relative violation of the cross-product equations.

    For each class and each assignment of the remaining variables, the
    (A, B) slice must have all 2x2 cross products equal; the residual of a
    quadruple is scaled by the larger of its two products.
    """
    n = model.domain.n
    d = complement_subset(a + b, n)
    perm = a + b + d
    cards = model.domain.cardinalities
    na = math.prod(cards[v] for v in a)
    nb = math.prod(cards[v] for v in b)
    worst = 0.0
    for label in (1, -1):
        m = (
            model.joint(label)
            .reshape(model.domain.shape)
            .transpose(perm)
            .reshape(na, nb, -1)
        )
        lhs = np.einsum("abd,ABd->aAbBd", m, m)
        rhs = np.einsum("aBd,Abd->aAbBd", m, m)
        scale = np.maximum(lhs, rhs)
        resid = np.abs(lhs - rhs)
        rel = np.divide(resid, scale, out=np.zeros_like(resid), where=scale > 0)
        worst = max(worst, float(rel.max()))
    return worst


def _diff_residual(
    model: GenerativeClassifier, a: tuple[int, ...], b: tuple[int, ...]
) -> float:
    worst = 0.0
    for label in (1, -1):
        logp = TabularFunction(model.domain, np.log(model.joint(label)))
        worst = max(worst, second_difference(logp, a, b).max_abs())
    return worst


def ci_details(
    model: GenerativeClassifier,
    vars_a: Sequence[int],
    vars_b: Sequence[int],
    tol: float = DEFAULT_CI_TOL,
) -> CiCheck:
    """Test ``X_A`` independent of ``X_B`` given the rest and the class.

    Two routes are taken: the cross-product (toric) equations on the raw
    probabilities, judged by relative residual, and the second difference
    of the log joints, judged absolutely.  Their verdicts must agree; a
    disagreement raises, because it would mean the model data cannot be
    trusted.  With zero cells only the toric route runs and ``toric_only``
    is flagged.
    """
    n = model.domain.n
    a = as_subset(vars_a, n)
    b = as_subset(vars_b, n)
    if not a or not b:
        raise ValidationError("both variable subsets must be nonempty")
    if set(a) & set(b):
        raise ValidationError(f"subsets overlap: {a!r} and {b!r}")
    toric = _toric_residual(model, a, b)
    toric_ok = toric <= tol
    if not model.strictly_positive:
        return CiCheck(toric_ok, toric, None, True)
    diff = _diff_residual(model, a, b)
    diff_ok = diff <= tol
    if toric_ok != diff_ok:
        raise ConsistencyError(
            "independence tests disagree: "
            f"toric residual {toric:.3e}, differential residual {diff:.3e}, tol {tol:.3e}"
        )
    return CiCheck(toric_ok, toric, diff, False)


def check_ci(
    model: GenerativeClassifier,
    vars_a: Sequence[int],
    vars_b: Sequence[int],
    tol: float = DEFAULT_CI_TOL,
) -> bool:
    return ci_details(model, vars_a, vars_b, tol).independent


def is_g_markov(
    model: GenerativeClassifier, graph: UndirectedGraph, tol: float = DEFAULT_CI_TOL
) -> bool:
    """Pairwise Markov property: CI for every non-adjacent pair."""
    n = model.domain.n
    if graph.n != n:
        raise ValidationError(f"graph has {graph.n} vertices for {n} variables")
    for i in range(n):
        for j in range(i + 1, n):
            if graph.has_edge(i, j):
                continue
            if not check_ci(model, (i,), (j,), tol):
                return False
    return True


def from_log_odds(
    f: TabularFunction,
    g: TabularFunction | None = None,
    graph: UndirectedGraph | None = None,
    tol: float = 1e-9,
) -> GenerativeClassifier:
    """Build the classifier ``p(x, c) ~ exp(g(x) + c f(x) / 2)``.

    ``g`` shapes the predictor marginal and defaults to zero.  When a graph
    is given, both ``f`` and ``g`` must split over its cliques (checked with
    ``tol``), which makes the result Markov by construction; without a
    graph no structural constraint is imposed.  Scores are max-shifted
    before exponentiation, so tables with large entries are safe.
    """
    if g is None:
        g = TabularFunction.zeros(f.domain)
    if g.domain != f.domain:
        raise ValidationError("f and g live on different domains")
    if graph is not None:
        if not markov_membership(f, graph, tol):
            raise ValidationError("f does not split over the graph's cliques")
        if not markov_membership(g, graph, tol):
            raise ValidationError("g does not split over the graph's cliques")
    s_plus = g.values + 0.5 * f.values
    s_minus = g.values - 0.5 * f.values
    shift = max(float(s_plus.max()), float(s_minus.max()))
    w_plus = np.exp(s_plus - shift)
    w_minus = np.exp(s_minus - shift)
    total = float(w_plus.sum() + w_minus.sum())
    return GenerativeClassifier(f.domain, w_plus / total, w_minus / total)
