"""scikit-learn estimator facade over the fixed-log-odds IPF fitter.

The calculus itself is a toolkit of pure functions, but the fitting step is
genuinely fit/predict shaped, so it gets an estimator so pipelines, grid
search and friends can drive it.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .errors import ValidationError
from .graphs import UndirectedGraph
from .ipf import DEFAULT_MAX_SWEEPS, DEFAULT_TOL, Dataset, fit_ipf
from .tables import CategoricalDomain, TabularFunction

__all__ = ["FixedOddsMarkovClassifier"]


class FixedOddsMarkovClassifier(ClassifierMixin, BaseEstimator):
    """Generative classifier with a frozen log-odds table, fitted by IPF.

    The decision rule is fixed up front by ``log_odds``; fitting only learns
    the predictor distribution inside the Markov family of ``graph``.
    Deliberately, ``decision_function`` is the input table itself, which
    also covers cells the fitted joint assigns zero mass.

    Parameters
    ----------
    log_odds : TabularFunction or array-like
        Target table ``ln p(x, +1) - ln p(x, -1)``.  Arrays are read in
        flat row-major order and need ``cardinalities``.
    graph : UndirectedGraph or iterable of edge pairs
        Markov structure; ``log_odds`` must split over its cliques.
    cardinalities : sequence of int, optional
        Domain shape; ignored when ``log_odds`` is a TabularFunction.
    tol : float
        Sup-norm marginal gap declaring convergence.
    max_sweeps : int
        Hard cap on IPF sweeps.

    Attributes
    ----------
    model_ : GenerativeClassifier
        The fitted joint distribution.
    report_ : IpfReport
        Convergence data for the fit.
    classes_ : ndarray
        Always ``[-1, 1]``.
    """

    def __init__(
        self,
        log_odds: TabularFunction | Sequence[float] | None = None,
        graph: UndirectedGraph | Iterable[Sequence[int]] | None = None,
        cardinalities: Sequence[int] | None = None,
        tol: float = DEFAULT_TOL,
        max_sweeps: int = DEFAULT_MAX_SWEEPS,
    ):
        self.log_odds = log_odds
        self.graph = graph
        self.cardinalities = cardinalities
        self.tol = tol
        self.max_sweeps = max_sweeps

    def _resolve_table(self) -> TabularFunction:
        if isinstance(self.log_odds, TabularFunction):
            return self.log_odds
        if self.log_odds is None:
            raise ValidationError("log_odds is required")
        if self.cardinalities is None:
            raise ValidationError("cardinalities are required with a raw log_odds array")
        domain = CategoricalDomain(tuple(int(c) for c in self.cardinalities))
        return TabularFunction(domain, np.asarray(self.log_odds, dtype=np.float64))

    def _resolve_graph(self, n: int) -> UndirectedGraph:
        if isinstance(self.graph, UndirectedGraph):
            return self.graph
        if self.graph is None:
            raise ValidationError("graph is required")
        return UndirectedGraph.from_edges(n, list(self.graph))

    def _check_X(self, X, domain: CategoricalDomain) -> np.ndarray:
        arr = np.asarray(X)
        if arr.ndim != 2 or arr.shape[1] != domain.n:
            raise ValidationError(
                f"X must be (n_samples, {domain.n}), got {arr.shape}"
            )
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(np.asarray(arr, dtype=np.float64))
            if not np.all(rounded == np.asarray(arr, dtype=np.float64)):
                raise ValidationError("X must hold integer category indices")
            arr = rounded
        arr = arr.astype(np.int64)
        cards = np.asarray(domain.cardinalities)
        if np.any(arr < 0) or np.any(arr >= cards[None, :]):
            raise ValidationError("X has a category index out of range")
        return arr

    @staticmethod
    def _check_y(y) -> np.ndarray:
        arr = np.asarray(y).reshape(-1)
        vals = set(np.unique(arr).tolist())
        if vals <= {-1, 1}:
            return arr.astype(np.int64)
        if vals <= {0, 1}:
            return np.where(arr == 0, -1, 1).astype(np.int64)
        raise ValidationError(f"labels must be in {{-1,+1}} or {{0,1}}, got {sorted(vals)}")

    def fit(self, X, y) -> "FixedOddsMarkovClassifier":
        f = self._resolve_table()
        graph = self._resolve_graph(f.domain.n)
        x_arr = self._check_X(X, f.domain)
        y_arr = self._check_y(y)
        data = Dataset(f.domain, x_arr, y_arr)
        self.model_, self.report_ = fit_ipf(
            f, graph, data, tol=self.tol, max_sweeps=self.max_sweeps
        )
        self.table_ = f
        self.classes_ = np.array([-1, 1])
        self.n_features_in_ = f.domain.n
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        x_arr = self._check_X(X, self.table_.domain)
        idx = np.ravel_multi_index(x_arr.T, self.table_.domain.shape)
        return self.table_.values[idx]

    def predict(self, X) -> np.ndarray:
        scores = self.decision_function(X)
        return np.where(scores >= 0, 1, -1)

    def predict_proba(self, X) -> np.ndarray:
        """Class posteriors ``[P(-1|x), P(+1|x)]`` from the fixed log-odds."""
        scores = self.decision_function(X)
        plus = 1.0 / (1.0 + np.exp(-scores))
        return np.column_stack([1.0 - plus, plus])
