"""Shared fixtures: a corpus of small networks and the fitted fishery model.

`small_corpus` gathers every hand-sized network used across the suite so
consistency sweeps (normalization, posterior agreement) can iterate over
all of them in one place.
"""

from __future__ import annotations

from importlib.resources import files

import numpy as np
import pytest

from turfbbn.core import Cpt, Dag, Variable, build_network
from turfbbn.learn import SearchConfig, fit_cpts, parse_constraints, tabu_search
from turfbbn.pipeline import (
    DEFAULT_DROPPED,
    default_fishery_spec,
    discretize,
    drop_variables,
    ingest_ma_csv,
    ingest_sizes_csv,
    pair_metrics,
)
from turfbbn.standin import StandInConfig, write_standin_csvs

from oracles import make_random_network


def binary(name: str) -> Variable:
    return Variable(name, ("T", "F"))


def net_single():
    """One binary node, P(T) = 0.7."""
    v = binary("a")
    dag = Dag((v,))
    return build_network(dag, [Cpt("a", (), (), np.array([[0.7, 0.3]]))])


def net_chain2():
    """a -> b with P(a=T)=0.7, P(b=T|a=T)=0.9, P(b=T|a=F)=0.2."""
    a, b = binary("a"), binary("b")
    dag = Dag((a, b), frozenset({("a", "b")}))
    return build_network(dag, [
        Cpt("a", (), (), np.array([[0.7, 0.3]])),
        Cpt("b", ("a",), (2,), np.array([[0.9, 0.1], [0.2, 0.8]])),
    ])


def net_chain3():
    """a -> b -> c, mixed cardinalities."""
    a = binary("a")
    b = Variable("b", ("x", "y", "z"))
    c = binary("c")
    dag = Dag((a, b, c), frozenset({("a", "b"), ("b", "c")}))
    return build_network(dag, [
        Cpt("a", (), (), np.array([[0.6, 0.4]])),
        Cpt("b", ("a",), (2,), np.array([[0.5, 0.3, 0.2], [0.1, 0.2, 0.7]])),
        Cpt("c", ("b",), (3,), np.array([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]])),
    ])


def net_collider():
    """a -> c <- b."""
    a, b, c = binary("a"), binary("b"), binary("c")
    dag = Dag((a, b, c), frozenset({("a", "c"), ("b", "c")}))
    return build_network(dag, [
        Cpt("a", (), (), np.array([[0.3, 0.7]])),
        Cpt("b", (), (), np.array([[0.8, 0.2]])),
        Cpt("c", ("a", "b"), (2, 2),
            np.array([[0.95, 0.05], [0.6, 0.4], [0.4, 0.6], [0.05, 0.95]])),
    ])


def net_diamond():
    """w -> x, w -> y, x -> z, y -> z with random rows."""
    return make_random_network(
        ["w", "x", "y", "z"], [2, 3, 2, 3],
        {("w", "x"), ("w", "y"), ("x", "z"), ("y", "z")}, seed=42)


def net_five():
    """Five nodes, moderately dense, random rows."""
    return make_random_network(
        ["a", "b", "c", "d", "e"], [2, 2, 3, 2, 3],
        {("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"), ("c", "e")}, seed=7)


CORPUS_BUILDERS = {
    "single": net_single,
    "chain2": net_chain2,
    "chain3": net_chain3,
    "collider": net_collider,
    "diamond": net_diamond,
    "five": net_five,
}


@pytest.fixture(name="net_chain2")
def net_chain2_fixture():
    return net_chain2()


@pytest.fixture(name="net_chain3")
def net_chain3_fixture():
    return net_chain3()


@pytest.fixture(name="net_collider")
def net_collider_fixture():
    return net_collider()


@pytest.fixture(name="net_diamond")
def net_diamond_fixture():
    return net_diamond()


@pytest.fixture(name="net_five")
def net_five_fixture():
    return net_five()


@pytest.fixture(scope="session")
def small_corpus():
    return {name: build() for name, build in CORPUS_BUILDERS.items()}


@pytest.fixture(scope="session")
def standin_paths(tmp_path_factory):
    """Generated driver and size tables on disk, default configuration."""
    root = tmp_path_factory.mktemp("standin")
    paths = {"ma": root / "ma.csv", "sizes": root / "sizes.csv"}
    write_standin_csvs(paths["ma"], paths["sizes"], StandInConfig())
    return paths


@pytest.fixture(scope="session")
def fishery_artifacts(standin_paths):
    """The full learning pipeline run once: records, metrics, dataset, network."""
    records = ingest_ma_csv(standin_paths["ma"])
    samples = ingest_sizes_csv(standin_paths["sizes"])
    metrics = pair_metrics(records, samples)
    spec = default_fishery_spec(records)
    dataset = drop_variables(discretize(records, metrics, spec), DEFAULT_DROPPED)
    text = (files("turfbbn") / "data" / "fishery.constraints").read_text()
    required, forbidden = parse_constraints(text)
    result = tabu_search(dataset, SearchConfig(required_edges=required,
                                               forbidden_edges=forbidden))
    network = fit_cpts(dataset, result.dag, alpha=1.0)
    return {
        "records": records,
        "samples": samples,
        "metrics": metrics,
        "dataset": dataset,
        "network": network,
        "score": result.total_score,
    }
