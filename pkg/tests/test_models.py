import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from markovodds import (
    CategoricalDomain,
    ConsistencyError,
    GenerativeClassifier,
    PositivityError,
    TabularFunction,
    UndirectedGraph,
    ValidationError,
    check_ci,
    ci_details,
    decide,
    from_log_odds,
    is_g_markov,
    log_odds,
    second_difference,
)

from oracles import ci_gap, product_ci_table, random_clique_sum


def _uniform_model(cards):
    dom = CategoricalDomain(cards)
    half = np.full(dom.size, 0.5 / dom.size)
    return GenerativeClassifier(dom, half, half)


def _random_model(rng, cards):
    dom = CategoricalDomain(cards)
    p = rng.uniform(0.05, 1.0, size=dom.size)
    q = rng.uniform(0.05, 1.0, size=dom.size)
    total = p.sum() + q.sum()
    return GenerativeClassifier(dom, p / total, q / total)


def _model_from_class_tables(cards, plus_nd, minus_nd, prior_plus=0.5):
    dom = CategoricalDomain(cards)
    p = prior_plus * np.asarray(plus_nd, dtype=float).ravel()
    q = (1.0 - prior_plus) * np.asarray(minus_nd, dtype=float).ravel()
    return GenerativeClassifier(dom, p, q)


class TestGenerativeClassifier:
    def test_must_sum_to_one(self):
        dom = CategoricalDomain((2,))
        with pytest.raises(ValidationError):
            GenerativeClassifier(dom, np.array([0.5, 0.5]), np.array([0.5, 0.5]))

    def test_rejects_negative_mass(self):
        dom = CategoricalDomain((2,))
        with pytest.raises(ValidationError):
            GenerativeClassifier(dom, np.array([0.7, -0.1]), np.array([0.2, 0.2]))

    def test_predictor_marginal_and_posterior(self):
        model = _model_from_class_tables(
            (2,), [0.8, 0.2], [0.4, 0.6], prior_plus=0.25
        )
        assert_allclose(model.predictor_marginal(), [0.5, 0.5])
        # posterior of + at cell 0: 0.25*0.8 / 0.5
        assert_allclose(model.posterior_plus()[0], 0.4)

    def test_posterior_nan_off_support(self):
        dom = CategoricalDomain((2,))
        model = GenerativeClassifier(dom, np.array([1.0, 0.0]), np.array([0.0, 0.0]))
        assert np.isnan(model.posterior_plus()[1])

    def test_strictly_positive_flag(self):
        assert _uniform_model((2, 2)).strictly_positive
        dom = CategoricalDomain((2,))
        zero = GenerativeClassifier(dom, np.array([1.0, 0.0]), np.array([0.0, 0.0]))
        assert not zero.strictly_positive


class TestLogOddsAndDecide:
    def test_log_odds_values(self):
        model = _model_from_class_tables((2,), [0.8, 0.2], [0.4, 0.6])
        f = log_odds(model)
        assert_allclose(f.values, [np.log(2.0), np.log(1.0 / 3.0)])

    def test_positivity_required(self):
        dom = CategoricalDomain((2,))
        model = GenerativeClassifier(dom, np.array([1.0, 0.0]), np.array([0.0, 0.0]))
        with pytest.raises(PositivityError):
            log_odds(model)

    def test_decide_and_tie(self):
        model = _model_from_class_tables((2,), [0.8, 0.2], [0.8, 0.2])
        assert decide(model, (0,)) == 1  # exact tie goes positive
        skew = _model_from_class_tables((2,), [0.2, 0.8], [0.8, 0.2])
        assert decide(skew, (0,)) == -1
        assert decide(skew, (1,)) == 1


class TestFromLogOdds:
    def test_round_trip_table(self):
        # the worked 2x3 table comes back exactly (within float arithmetic)
        dom = CategoricalDomain((2, 3))
        f = TabularFunction(dom, np.array([-1.0, 5.0, 2.0, 3.0, -7.0, -4.0]))
        model = from_log_odds(f)
        assert_allclose(log_odds(model).values, f.values, atol=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(60)
        for cards in [(2, 2), (3, 2, 2)]:
            dom = CategoricalDomain(cards)
            f = TabularFunction(dom, rng.normal(scale=3.0, size=dom.size))
            g = TabularFunction(dom, rng.normal(size=dom.size))
            model = from_log_odds(f, g=g)
            assert_allclose(log_odds(model).values, f.values, atol=1e-12)

    def test_g_shifts_marginal_not_odds(self):
        rng = np.random.default_rng(61)
        dom = CategoricalDomain((2, 2))
        f = TabularFunction(dom, rng.normal(size=4))
        g = TabularFunction(dom, rng.normal(size=4))
        plain = from_log_odds(f)
        shifted = from_log_odds(f, g=g)
        assert_allclose(
            log_odds(plain).values, log_odds(shifted).values, atol=1e-12
        )
        assert not np.allclose(
            plain.predictor_marginal(), shifted.predictor_marginal()
        )

    def test_graph_membership_enforced(self):
        rng = np.random.default_rng(62)
        dom = CategoricalDomain((2, 2, 2))
        graph = UndirectedGraph.path(3)
        generic = TabularFunction(dom, rng.normal(size=8))
        with pytest.raises(ValidationError):
            from_log_odds(generic, graph=graph)
        member_nd = random_clique_sum(rng, 3, graph.sorted_edges(), (2, 2, 2))
        member = TabularFunction.from_nd(dom, member_nd)
        model = from_log_odds(member, graph=graph)
        assert is_g_markov(model, graph)

    def test_extreme_values_stay_normalized(self):
        dom = CategoricalDomain((2,))
        f = TabularFunction(dom, np.array([700.0, -700.0]))
        model = from_log_odds(f)
        assert_allclose(model.p_plus.sum() + model.p_minus.sum(), 1.0)


class TestConditionalIndependence:
    def test_product_construction_is_independent(self):
        rng = np.random.default_rng(63)
        for _ in range(20):
            plus = product_ci_table(rng, (2, 3, 2), (0,), (1,))
            minus = product_ci_table(rng, (2, 3, 2), (0,), (1,))
            model = _model_from_class_tables((2, 3, 2), plus, minus)
            assert check_ci(model, (0,), (1,))

    def test_generic_model_is_not(self):
        rng = np.random.default_rng(64)
        model = _random_model(rng, (2, 2, 2))
        assert not check_ci(model, (0,), (1,))

    def test_routes_agree_and_match_oracle(self):
        rng = np.random.default_rng(65)
        for _ in range(20):
            model = _random_model(rng, (2, 2, 2))
            details = ci_details(model, (0,), (2,))
            plus_gap = ci_gap(model.joint(1).reshape(2, 2, 2), (0,), (2,))
            minus_gap = ci_gap(model.joint(-1).reshape(2, 2, 2), (0,), (2,))
            oracle_independent = max(plus_gap, minus_gap) <= 1e-9
            assert details.independent == oracle_independent
            assert details.diff_residual is not None

    def test_ci_equals_vanishing_second_difference(self):
        rng = np.random.default_rng(66)
        dom = CategoricalDomain((2, 3, 2))
        for _ in range(20):
            plus = product_ci_table(rng, (2, 3, 2), (0,), (1,))
            minus = product_ci_table(rng, (2, 3, 2), (0,), (1,))
            model = _model_from_class_tables((2, 3, 2), plus, minus)
            f = log_odds(model)
            assert second_difference(f, (0,), (1,)).max_abs() < 1e-9

    def test_zeros_fall_back_to_toric_route(self):
        dom = CategoricalDomain((2, 2))
        p = np.array([0.5, 0.0, 0.0, 0.0])
        q = np.array([0.0, 0.5, 0.0, 0.0])
        model = GenerativeClassifier(dom, p, q)
        details = ci_details(model, (0,), (1,))
        assert details.toric_only
        assert details.diff_residual is None

    def test_validates_subsets(self):
        model = _uniform_model((2, 2))
        with pytest.raises(ValidationError):
            ci_details(model, (0,), (0,))
        with pytest.raises(ValidationError):
            ci_details(model, (), (1,))


class TestIsGMarkov:
    def test_uniform_is_markov_for_anything(self):
        model = _uniform_model((2, 2, 2))
        assert is_g_markov(model, UndirectedGraph.edgeless(3))

    def test_built_from_clique_terms(self):
        rng = np.random.default_rng(67)
        graph = UndirectedGraph.cycle(4)
        cards = (2, 2, 2, 2)
        dom = CategoricalDomain(cards)
        f = TabularFunction.from_nd(
            dom, random_clique_sum(rng, 4, graph.sorted_edges(), cards)
        )
        g = TabularFunction.from_nd(
            dom, random_clique_sum(rng, 4, graph.sorted_edges(), cards)
        )
        model = from_log_odds(f, g=g, graph=graph)
        assert is_g_markov(model, graph)
        # but not for a strictly smaller graph
        assert not is_g_markov(model, UndirectedGraph.edgeless(4))
