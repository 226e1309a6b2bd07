import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from markovodds import (
    CategoricalDomain,
    ConsistencyError,
    Dataset,
    GenerativeClassifier,
    TabularFunction,
    UndirectedGraph,
    ValidationError,
    empirical_marginal,
    fit_ipf,
    log_likelihood,
    log_odds,
    marginal_fit,
)

from oracles import pooled_decomposable_mle, random_clique_sum


def _random_dataset(rng, cards, n_records, forbid=None):
    """Uniformly random records; optionally reject a set of configurations."""
    dom = CategoricalDomain(cards)
    rows = []
    while len(rows) < n_records:
        row = tuple(int(rng.integers(c)) for c in cards)
        if forbid and forbid(row):
            continue
        rows.append(row)
    y = rng.choice((-1, 1), size=n_records)
    return Dataset(dom, np.array(rows), y)


def _counts(data):
    return np.bincount(data.flat_indices(), minlength=data.domain.size).reshape(
        data.domain.shape
    )


class TestDataset:
    def test_from_records(self):
        dom = CategoricalDomain((2, 3))
        data = Dataset.from_records(dom, [((0, 2), 1), ((1, 0), -1), ((0, 0), 1)])
        assert data.n_records == 3
        assert_array_equal(data.x, [[0, 2], [1, 0], [0, 0]])
        assert_array_equal(data.y, [1, -1, 1])

    def test_flat_indices(self):
        dom = CategoricalDomain((2, 2))
        data = Dataset.from_records(dom, [((0, 1), 1), ((1, 0), -1)])
        assert_array_equal(data.flat_indices(), [1, 2])

    def test_arrays_frozen(self):
        dom = CategoricalDomain((2, 2))
        data = Dataset.from_records(dom, [((0, 0), 1)])
        assert not data.x.flags.writeable
        assert not data.y.flags.writeable

    def test_rejects_wrong_width(self):
        dom = CategoricalDomain((2, 2))
        with pytest.raises(ValidationError):
            Dataset(dom, np.zeros((3, 3), dtype=int), np.ones(3, dtype=int))

    def test_rejects_length_mismatch(self):
        dom = CategoricalDomain((2, 2))
        with pytest.raises(ValidationError):
            Dataset(dom, np.zeros((3, 2), dtype=int), np.ones(2, dtype=int))

    def test_rejects_empty(self):
        dom = CategoricalDomain((2, 2))
        with pytest.raises(ValidationError):
            Dataset(dom, np.zeros((0, 2), dtype=int), np.ones(0, dtype=int))

    def test_rejects_out_of_range_category(self):
        dom = CategoricalDomain((2, 2))
        with pytest.raises(ValidationError):
            Dataset(dom, np.array([[0, 2]]), np.array([1]))

    def test_rejects_bad_label(self):
        dom = CategoricalDomain((2, 2))
        with pytest.raises(ValidationError):
            Dataset(dom, np.array([[0, 1]]), np.array([0]))


class TestEmpiricalMarginal:
    def test_hand_counts(self):
        dom = CategoricalDomain((2, 2))
        data = Dataset.from_records(
            dom, [((0, 0), 1), ((0, 1), -1), ((0, 1), 1), ((1, 0), 1)]
        )
        assert_allclose(empirical_marginal(data, [0]).values, [0.75, 0.25])
        assert_allclose(empirical_marginal(data, [1]).values, [0.5, 0.5])
        assert_allclose(
            empirical_marginal(data, [0, 1]).values, [0.25, 0.5, 0.25, 0.0]
        )

    def test_sums_to_one(self):
        rng = np.random.default_rng(7)
        data = _random_dataset(rng, (2, 3, 2), 40)
        for sub in ([0], [2], [0, 1], [1, 2], [0, 1, 2]):
            assert empirical_marginal(data, sub).values.sum() == pytest.approx(1.0)

    def test_order_insensitive(self):
        rng = np.random.default_rng(8)
        data = _random_dataset(rng, (2, 3), 25)
        a = empirical_marginal(data, [0, 1])
        b = empirical_marginal(data, [1, 0])
        assert_array_equal(a.values, b.values)

    def test_rejects_empty_subset(self):
        rng = np.random.default_rng(9)
        data = _random_dataset(rng, (2, 2), 10)
        with pytest.raises(ValidationError):
            empirical_marginal(data, [])


class TestMarginalFit:
    def test_one_step_matches_empirical(self):
        rng = np.random.default_rng(11)
        dom = CategoricalDomain((2, 3))
        p = rng.uniform(0.1, 1.0, dom.size)
        q = rng.uniform(0.1, 1.0, dom.size)
        total = p.sum() + q.sum()
        model = GenerativeClassifier(dom, p / total, q / total)
        data = _random_dataset(rng, (2, 3), 60)
        fitted = marginal_fit(model, [0], data)
        got = (fitted.p_plus + fitted.p_minus).reshape(2, 3).sum(axis=1)
        assert_allclose(got, empirical_marginal(data, [0]).values, atol=1e-15)

    def test_step_preserves_log_odds(self):
        rng = np.random.default_rng(12)
        dom = CategoricalDomain((2, 2))
        p = rng.uniform(0.1, 1.0, dom.size)
        q = rng.uniform(0.1, 1.0, dom.size)
        total = p.sum() + q.sum()
        model = GenerativeClassifier(dom, p / total, q / total)
        data = _random_dataset(rng, (2, 2), 30)
        fitted = marginal_fit(model, [1], data)
        assert_allclose(
            log_odds(fitted).values, log_odds(model).values, atol=1e-12
        )

    def test_zero_count_zeroes_cells(self):
        rng = np.random.default_rng(13)
        dom = CategoricalDomain((2, 2))
        half = np.full(dom.size, 0.5 / dom.size)
        model = GenerativeClassifier(dom, half, half)
        data = _random_dataset(rng, (2, 2), 30, forbid=lambda r: r[0] == 1)
        fitted = marginal_fit(model, [0], data)
        plus = fitted.p_plus.reshape(2, 2)
        minus = fitted.p_minus.reshape(2, 2)
        assert np.all(plus[1] == 0.0)
        assert np.all(minus[1] == 0.0)

    def test_unrecoverable_mass_raises(self):
        dom = CategoricalDomain((2, 2))
        model = GenerativeClassifier(
            dom,
            np.array([0.0, 0.0, 0.25, 0.25]),
            np.array([0.0, 0.0, 0.25, 0.25]),
        )
        data = Dataset.from_records(dom, [((0, 0), 1), ((1, 1), -1)])
        with pytest.raises(ConsistencyError):
            marginal_fit(model, [0], data)

    def test_domain_mismatch(self):
        dom = CategoricalDomain((2, 2))
        half = np.full(dom.size, 0.5 / dom.size)
        model = GenerativeClassifier(dom, half, half)
        rng = np.random.default_rng(14)
        data = _random_dataset(rng, (2, 3), 10)
        with pytest.raises(ValidationError):
            marginal_fit(model, [0], data)


class TestLogLikelihood:
    def test_uniform_hand_value(self):
        dom = CategoricalDomain((2, 2))
        half = np.full(dom.size, 0.125)
        model = GenerativeClassifier(dom, half, half)
        data = Dataset.from_records(dom, [((0, 0), 1), ((1, 1), -1), ((0, 1), 1)])
        assert log_likelihood(model, data) == pytest.approx(3 * np.log(0.125))

    def test_zero_probability_record(self):
        dom = CategoricalDomain((2,))
        model = GenerativeClassifier(
            dom, np.array([0.5, 0.0]), np.array([0.5, 0.0])
        )
        data = Dataset.from_records(dom, [((1,), 1)])
        assert log_likelihood(model, data) == float("-inf")

    def test_domain_mismatch(self):
        dom = CategoricalDomain((2, 2))
        half = np.full(dom.size, 0.125)
        model = GenerativeClassifier(dom, half, half)
        data = Dataset.from_records(CategoricalDomain((2,)), [((0,), 1)])
        with pytest.raises(ValidationError):
            log_likelihood(model, data)


class TestFitIpf:
    def _fit(self, seed, cards, graph, n_records=200, f=None, **kw):
        rng = np.random.default_rng(seed)
        dom = CategoricalDomain(cards)
        if f is None:
            values = random_clique_sum(rng, dom.n, graph.sorted_edges(), cards)
            f = TabularFunction(dom, values.reshape(-1))
        data = _random_dataset(rng, cards, n_records)
        model, report = fit_ipf(f, graph, data, **kw)
        return f, data, model, report

    def test_converges_and_reports(self):
        f, data, model, report = self._fit(21, (2, 2, 2), UndirectedGraph.path(3))
        assert report.converged
        assert report.final_marginal_gap <= 1e-8
        assert report.iterations >= 1
        assert len(report.loglik_trace) == report.iterations + 1
        assert len(report.odds_gap_trace) == report.iterations

    def test_log_odds_pinned_every_sweep(self):
        _, _, _, report = self._fit(22, (2, 3, 2), UndirectedGraph.path(3))
        assert max(report.odds_gap_trace) <= 1e-10

    def test_loglik_nondecreasing(self):
        _, _, _, report = self._fit(23, (2, 2, 2, 2), UndirectedGraph.path(4))
        trace = np.array(report.loglik_trace)
        assert np.all(np.diff(trace) >= -1e-12)

    def test_clique_marginals_match_empirical(self):
        f, data, model, report = self._fit(24, (2, 2, 2), UndirectedGraph.path(3), tol=1e-10)
        q = (model.p_plus + model.p_minus).reshape(2, 2, 2)
        emp01 = empirical_marginal(data, [0, 1]).values.reshape(2, 2)
        emp12 = empirical_marginal(data, [1, 2]).values.reshape(2, 2)
        assert_allclose(q.sum(axis=2), emp01, atol=1e-10)
        assert_allclose(q.sum(axis=0), emp12, atol=1e-10)

    def test_complete_graph_one_sweep(self):
        f, data, model, report = self._fit(25, (2, 3), UndirectedGraph.complete(2))
        assert report.iterations == 1
        want = _counts(data).reshape(-1) / data.n_records
        assert_allclose(model.p_plus + model.p_minus, want, atol=1e-14)

    def test_single_predictor_hand_values(self):
        # f == ln 3 forces P(C=+1|x) = 3/4 everywhere; balanced counts force
        # the uniform predictor marginal
        dom = CategoricalDomain((2,))
        f = TabularFunction(dom, np.full(1, np.log(3.0)).repeat(2))
        data = Dataset.from_records(
            dom, [((0,), 1), ((0,), -1), ((1,), 1), ((1,), 1)]
        )
        model, report = fit_ipf(f, UndirectedGraph.edgeless(1), data)
        assert report.converged
        assert_allclose(model.predictor_marginal(), [0.5, 0.5], atol=1e-14)
        assert_allclose(model.posterior_plus(), [0.75, 0.75], atol=1e-14)

    def test_constant_odds_matches_closed_form(self):
        rng = np.random.default_rng(26)
        dom = CategoricalDomain((2, 2, 2))
        f = TabularFunction(dom, np.zeros(dom.size))
        data = _random_dataset(rng, (2, 2, 2), 300)
        model, report = fit_ipf(f, UndirectedGraph.path(3), data, tol=1e-12)
        mle = pooled_decomposable_mle(_counts(data), 3, [(0, 1), (1, 2)])
        assert_allclose(model.p_plus + model.p_minus, mle.reshape(-1), atol=1e-8)
        # zero log odds means the two class slices are identical
        assert_allclose(model.p_plus, model.p_minus, atol=1e-15)

    def test_zero_marginal_cells_exactly_zero(self):
        rng = np.random.default_rng(27)
        dom = CategoricalDomain((2, 2, 2))
        values = random_clique_sum(rng, 3, [(0, 1), (1, 2)], (2, 2, 2))
        f = TabularFunction(dom, values.reshape(-1))
        data = _random_dataset(
            rng, (2, 2, 2), 120, forbid=lambda r: r[0] == 1 and r[1] == 1
        )
        model, report = fit_ipf(f, UndirectedGraph.path(3), data)
        assert report.converged
        plus = model.p_plus.reshape(2, 2, 2)
        minus = model.p_minus.reshape(2, 2, 2)
        assert np.all(plus[1, 1] == 0.0)
        assert np.all(minus[1, 1] == 0.0)
        assert (model.p_plus + model.p_minus).sum() == pytest.approx(1.0)

    def test_rejects_non_member_table(self):
        rng = np.random.default_rng(28)
        dom = CategoricalDomain((2, 2, 2))
        f = TabularFunction(dom, rng.normal(size=dom.size))
        data = _random_dataset(rng, (2, 2, 2), 50)
        with pytest.raises(ValidationError):
            fit_ipf(f, UndirectedGraph.path(3), data)

    def test_rejects_domain_mismatch(self):
        rng = np.random.default_rng(29)
        dom = CategoricalDomain((2, 2))
        f = TabularFunction(dom, np.zeros(dom.size))
        data = _random_dataset(rng, (2, 3), 20)
        with pytest.raises(ValidationError):
            fit_ipf(f, UndirectedGraph.complete(2), data)

    def test_rejects_graph_size_mismatch(self):
        rng = np.random.default_rng(30)
        dom = CategoricalDomain((2, 2, 2))
        f = TabularFunction(dom, np.zeros(dom.size))
        data = _random_dataset(rng, (2, 2, 2), 20)
        with pytest.raises(ValidationError):
            fit_ipf(f, UndirectedGraph.complete(2), data)

    def test_rejects_bad_max_sweeps(self):
        rng = np.random.default_rng(31)
        dom = CategoricalDomain((2, 2))
        f = TabularFunction(dom, np.zeros(dom.size))
        data = _random_dataset(rng, (2, 2), 20)
        with pytest.raises(ValidationError):
            fit_ipf(f, UndirectedGraph.complete(2), data, max_sweeps=0)
