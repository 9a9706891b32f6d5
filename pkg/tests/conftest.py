"""Shared brute-force oracles and instance factories.

The oracles here are deliberately naive (full enumeration, direct
product weights) and independent of the library's evaluation paths;
tests freeze their outputs as the expected values.
"""

import itertools

import numpy as np
import pytest

from submax import (
    CacheNetworkObjective,
    CacheRequest,
    FacilityLocationObjective,
    GeneralPolynomial,
    InfluenceObjective,
    SummarizationObjective,
)


def bernoulli_weight(x_bits, y):
    """prod y_i^{x_i} (1-y_i)^{1-x_i} computed directly."""
    w = 1.0
    for i, b in enumerate(x_bits):
        w *= y[i] if b else (1.0 - y[i])
    return w


def enumerate_binary(n):
    return itertools.product((0, 1), repeat=n)


def bernoulli_expectation(fn, y):
    """E[fn(x)] under independent Bernoulli(y), by full enumeration."""
    n = len(y)
    total = 0.0
    for bits in enumerate_binary(n):
        total += fn(np.array(bits)) * bernoulli_weight(bits, y)
    return total


def random_general_polynomial(rng, n, max_terms=30, max_exp=4):
    terms = []
    num_terms = int(rng.integers(1, max_terms + 1))
    for _ in range(num_terms):
        size = int(rng.integers(0, min(n, 5) + 1))
        variables = sorted(rng.choice(n, size=size, replace=False).tolist())
        powers = tuple(
            (int(v), int(rng.integers(1, max_exp + 1))) for v in variables
        )
        coeff = float(rng.normal())
        terms.append((coeff, powers))
    return GeneralPolynomial(n, terms)


# -- tiny instance factories (shared across test modules) --------------


def small_sm(rng, n=6, partitions=2, realizations=3):
    splits = np.array_split(np.arange(n), partitions)
    values = rng.random((realizations, n))
    values /= values.sum(axis=1, keepdims=True)
    return SummarizationObjective(
        [tuple(int(i) for i in s) for s in splits], values
    )


def small_im(rng, n=6, edge_prob=0.35, realizations=3):
    from submax.dataio import GraphData, gen_ic_cascades

    edges = [
        (u, v)
        for u in range(n)
        for v in range(n)
        if u != v and rng.random() < edge_prob
    ]
    graph = GraphData(num_nodes=n, edges=tuple(edges), directed=True)
    traces = gen_ic_cascades(
        graph, 0.5, realizations, seed=int(rng.integers(2**31))
    )
    return InfluenceObjective(n, traces)


def small_fl(rng, n=6, realizations=3):
    return FacilityLocationObjective(rng.random((realizations, n)))


def small_cn(rng, nodes=4, catalogue=2, requests=5, load=0.7):
    from submax.dataio import gen_cn_objective

    return gen_cn_objective(nodes, catalogue, requests, load, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
