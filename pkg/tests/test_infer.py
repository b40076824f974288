"""Exact enumeration, likelihood weighting and reverse queries."""

import numpy as np
import pytest

from turfbbn.core import Cpt, Dag, Evidence, Variable, build_network
from turfbbn.errors import (
    AllZeroWeights,
    InconsistentQuery,
    ThresholdNotACutPoint,
    TooManyVariables,
    UnknownState,
    UnknownVariable,
    ZeroProbabilityEvidence,
)
from turfbbn.infer import (
    QueryEvent,
    QueryResult,
    exact_query,
    good_state_event,
    lw_query,
    reverse_query,
)

from conftest import (
    CORPUS_BUILDERS,
    binary,
    net_chain2,
    net_chain3,
    net_collider,
    net_diamond,
    net_single,
)
from oracles import oracle_conditional


def deterministic_root():
    """P(a=T) = 1 exactly, so evidence a=F has zero probability."""
    v = binary("a")
    return build_network(Dag((v,)), [Cpt("a", (), (), np.array([[1.0, 0.0]]))])


def deterministic_chain():
    """a -> b with P(a=F) = 0: evidence a=F is impossible without
    contradicting an event on b."""
    a, b = binary("a"), binary("b")
    dag = Dag((a, b), frozenset({("a", "b")}))
    return build_network(dag, [
        Cpt("a", (), (), np.array([[1.0, 0.0]])),
        Cpt("b", ("a",), (2,), np.array([[0.9, 0.1], [0.5, 0.5]])),
    ])


def wide_network(n_nodes):
    vs = tuple(binary(f"n{i}") for i in range(n_nodes))
    dag = Dag(vs)
    cpts = [Cpt(v.name, (), (), np.array([[0.5, 0.5]])) for v in vs]
    return build_network(dag, cpts)


class TestQueryEvent:
    def test_must_constrain_something(self):
        with pytest.raises(ValueError):
            QueryEvent()

    def test_inherits_set_semantics(self):
        ev = QueryEvent(constraints={"a": frozenset({"T", "F"})})
        assert ev.constraints["a"] == frozenset({"T", "F"})


class TestQueryResult:
    def test_interval_must_bracket_estimate(self):
        with pytest.raises(ValueError):
            QueryResult(estimate=0.5, ci_low=0.6, ci_high=0.7,
                        n_samples=10, method="likelihood_weighting")

    def test_exact_interval_must_be_degenerate(self):
        with pytest.raises(ValueError):
            QueryResult(estimate=0.5, ci_low=0.4, ci_high=0.6,
                        n_samples=0, method="exact")

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            QueryResult(estimate=0.5, ci_low=0.5, ci_high=0.5,
                        n_samples=0, method="guesswork")


class TestExactQuery:
    def test_root_marginal(self):
        r = exact_query(net_single(), QueryEvent(constraints={"a": frozenset({"T"})}))
        assert r.estimate == pytest.approx(0.7, abs=1e-12)
        assert r.ci_low == r.estimate == r.ci_high
        assert r.method == "exact"
        assert r.n_samples == 0

    def test_chain_marginal_by_hand(self):
        # P(b=T) = 0.7 * 0.9 + 0.3 * 0.2
        r = exact_query(net_chain2(), QueryEvent(constraints={"b": frozenset({"T"})}))
        assert r.estimate == pytest.approx(0.69, abs=1e-12)

    def test_posterior_by_hand(self):
        # P(a=T | b=T) = 0.63 / 0.69
        r = exact_query(net_chain2(),
                        QueryEvent(constraints={"a": frozenset({"T"})}),
                        Evidence.of(b="T"))
        assert r.estimate == pytest.approx(0.63 / 0.69, abs=1e-12)

    def test_event_equal_to_evidence_is_certain(self):
        r = exact_query(net_chain2(),
                        QueryEvent(constraints={"a": frozenset({"T"})}),
                        Evidence.of(a="T"))
        assert r.estimate == 1.0

    def test_overlap_intersects(self):
        # event allows both states, evidence narrows to one: certainty
        r = exact_query(net_chain2(),
                        QueryEvent(constraints={"a": frozenset({"T", "F"})}),
                        Evidence.of(a="T"))
        assert r.estimate == 1.0

    def test_contradictory_overlap(self):
        with pytest.raises(InconsistentQuery):
            exact_query(net_chain2(),
                        QueryEvent(constraints={"a": frozenset({"T"})}),
                        Evidence.of(a="F"))

    def test_tautological_event(self):
        r = exact_query(net_chain3(),
                        QueryEvent(constraints={"b": frozenset({"x", "y", "z"})}))
        assert r.estimate == pytest.approx(1.0, abs=1e-12)

    def test_zero_probability_evidence(self):
        with pytest.raises(ZeroProbabilityEvidence):
            exact_query(deterministic_chain(),
                        QueryEvent(constraints={"b": frozenset({"T"})}),
                        Evidence.of(a="F"))

    def test_unknown_variable_and_state(self):
        with pytest.raises(UnknownVariable):
            exact_query(net_single(), QueryEvent(constraints={"b": frozenset({"T"})}))
        with pytest.raises(UnknownState):
            exact_query(net_single(), QueryEvent(constraints={"a": frozenset({"Q"})}))

    def test_node_limit(self):
        net = wide_network(21)
        with pytest.raises(TooManyVariables):
            exact_query(net, QueryEvent(constraints={"n0": frozenset({"T"})}))

    @pytest.mark.parametrize("name", sorted(CORPUS_BUILDERS))
    def test_matches_joint_table_oracle(self, name, small_corpus):
        net = small_corpus[name]
        rng = np.random.default_rng(hash(name) % 2**32)
        names = [v.name for v in net.dag.variables]
        for _ in range(12):
            k = int(rng.integers(1, len(names) + 1))
            chosen = list(rng.choice(names, size=k, replace=False))
            event_var, evid_vars = chosen[0], chosen[1:]

            def subset(var):
                states = net.dag.variable(var).states
                size = int(rng.integers(1, len(states)))
                return frozenset(rng.choice(states, size=size, replace=False))

            event = QueryEvent(constraints={event_var: subset(event_var)})
            evidence = (Evidence(constraints={v: subset(v) for v in evid_vars})
                        if evid_vars else None)
            try:
                got = exact_query(net, event, evidence).estimate
            except ZeroProbabilityEvidence:
                continue
            want = oracle_conditional(
                net, event.constraints,
                evidence.constraints if evidence else None)
            assert got == pytest.approx(want, abs=1e-9)

    def test_law_of_total_probability(self):
        net = net_diamond()
        event = QueryEvent(constraints={"z": frozenset({"s1"})})
        total = sum(
            exact_query(net, event, Evidence.of(w=state)).estimate
            * exact_query(net, QueryEvent(constraints={"w": frozenset({state})})).estimate
            for state in net.dag.variable("w").states
        )
        assert total == pytest.approx(
            exact_query(net, event).estimate, abs=1e-9)

    def test_enlarging_the_event_never_lowers_probability(self):
        net = net_chain3()
        small = exact_query(net, QueryEvent(constraints={"b": frozenset({"x"})}))
        big = exact_query(net, QueryEvent(constraints={"b": frozenset({"x", "y"})}))
        assert big.estimate >= small.estimate


class TestLikelihoodWeighting:
    def test_deterministic_per_seed(self):
        net = net_chain3()
        event = QueryEvent(constraints={"c": frozenset({"T"})})
        a = lw_query(net, event, Evidence.of(a="T"), n=500, seed=9)
        b = lw_query(net, event, Evidence.of(a="T"), n=500, seed=9)
        assert a == b

    def test_metadata(self):
        r = lw_query(net_single(), QueryEvent(constraints={"a": frozenset({"T"})}),
                     n=256, seed=1)
        assert r.method == "likelihood_weighting"
        assert r.n_samples == 256
        assert 0.0 <= r.ci_low <= r.estimate <= r.ci_high <= 1.0

    def test_mean_over_seeds_near_exact(self):
        net = net_diamond()
        event = QueryEvent(constraints={"z": frozenset({"s0", "s2"})})
        evidence = Evidence(constraints={"w": frozenset({"s1"}),
                                         "x": frozenset({"s0", "s2"})})
        exact = exact_query(net, event, evidence).estimate
        estimates = [lw_query(net, event, evidence, n=2000, seed=s).estimate
                     for s in range(50)]
        assert abs(float(np.mean(estimates)) - exact) <= 0.01

    def test_interval_covers_exact_value(self):
        net = net_chain3()
        event = QueryEvent(constraints={"c": frozenset({"T"})})
        evidence = Evidence.of(a="T")
        exact = exact_query(net, event, evidence).estimate
        covered = sum(
            1 for seed in range(100)
            if (r := lw_query(net, event, evidence, n=2000, seed=seed)).ci_low
            <= exact <= r.ci_high
        )
        assert covered >= 88  # nominal 95%, observed 93-96

    def test_interval_narrows_with_more_samples(self):
        net = net_chain3()
        event = QueryEvent(constraints={"c": frozenset({"T"})})
        small = lw_query(net, event, n=200, seed=3)
        large = lw_query(net, event, n=20_000, seed=3)
        assert (large.ci_high - large.ci_low) < (small.ci_high - small.ci_low)

    def test_tautological_event_is_certain(self):
        r = lw_query(net_single(),
                     QueryEvent(constraints={"a": frozenset({"T", "F"})}),
                     n=100, seed=0)
        assert r.estimate == 1.0

    def test_impossible_evidence_raises(self):
        with pytest.raises(AllZeroWeights):
            lw_query(deterministic_chain(),
                     QueryEvent(constraints={"b": frozenset({"T"})}),
                     Evidence.of(a="F"), n=100, seed=0)

    def test_contradictory_query_raises_before_sampling(self):
        with pytest.raises(InconsistentQuery):
            lw_query(net_chain2(),
                     QueryEvent(constraints={"a": frozenset({"T"})}),
                     Evidence.of(a="F"), n=10, seed=0)

    def test_needs_at_least_one_sample(self):
        with pytest.raises(ValueError):
            lw_query(net_single(), QueryEvent(constraints={"a": frozenset({"T"})}),
                     n=0)

    def test_works_beyond_exact_node_limit(self):
        net = wide_network(25)
        r = lw_query(net, QueryEvent(constraints={"n0": frozenset({"T"})}),
                     n=4000, seed=2)
        assert r.estimate == pytest.approx(0.5, abs=0.05)


class TestReverseQuery:
    def test_two_node_posterior_by_hand(self):
        post = reverse_query(net_chain2(), "a", Evidence.of(b="T"))
        assert post["T"] == pytest.approx(0.63 / 0.69, abs=1e-12)
        assert post["F"] == pytest.approx(0.06 / 0.69, abs=1e-12)

    def test_distribution_sums_to_one(self, small_corpus):
        for net in small_corpus.values():
            driver = net.dag.variables[0].name
            responders = [v for v in net.dag.variables if v.name != driver]
            if not responders:
                continue
            event = Evidence.of(**{responders[-1].name: responders[-1].states[0]})
            post = reverse_query(net, driver, event)
            assert sum(post.values()) == pytest.approx(1.0, abs=1e-9)

    def test_dseparated_driver_keeps_marginal(self):
        # a and b are marginally independent while the collider is unobserved
        net = net_collider()
        post = reverse_query(net, "a", Evidence.of(b="T"))
        prior = exact_query(net, QueryEvent(constraints={"a": frozenset({"T"})}))
        assert post["T"] == pytest.approx(prior.estimate, abs=1e-12)

    def test_driver_in_event_rejected(self):
        with pytest.raises(InconsistentQuery):
            reverse_query(net_chain2(), "a", Evidence.of(a="T", b="T"))

    def test_unknown_driver(self):
        with pytest.raises(UnknownVariable):
            reverse_query(net_chain2(), "ghost", Evidence.of(b="T"))


class TestGoodStateEvent:
    @staticmethod
    def response_network():
        size = Variable("relative_size", ("le_0.5", "0.5_to_0.59", "gt_0.59"), "ordinal")
        illegal = Variable("illegal_proportion",
                           ("le_0.15", "0.15_to_0.31", "gt_0.31"), "ordinal")
        dag = Dag((size, illegal))
        return build_network(dag, [
            Cpt("relative_size", (), (), np.array([[0.2, 0.3, 0.5]])),
            Cpt("illegal_proportion", (), (), np.array([[0.6, 0.3, 0.1]])),
        ])

    def test_default_thresholds(self):
        event = good_state_event(self.response_network())
        assert event.constraints["relative_size"] == frozenset({"gt_0.59"})
        assert event.constraints["illegal_proportion"] == frozenset(
            {"le_0.15", "0.15_to_0.31"})

    def test_alternate_cut_point(self):
        event = good_state_event(self.response_network(),
                                 e_hat_threshold=0.5, illegal_threshold=0.15)
        assert event.constraints["relative_size"] == frozenset(
            {"0.5_to_0.59", "gt_0.59"})
        assert event.constraints["illegal_proportion"] == frozenset({"le_0.15"})

    def test_threshold_must_be_cut_point(self):
        with pytest.raises(ThresholdNotACutPoint):
            good_state_event(self.response_network(), e_hat_threshold=0.55)

    def test_missing_response_variable(self):
        with pytest.raises(UnknownVariable):
            good_state_event(net_chain2())

    def test_event_probability_is_product_for_independent_responses(self):
        net = self.response_network()
        event = good_state_event(net)
        r = exact_query(net, event)
        assert r.estimate == pytest.approx(0.5 * 0.9, abs=1e-12)
