import itertools

import numpy as np
import pytest

from vertexlab.errors import SizeError
from vertexlab.kernels import MAX_FREE_VARS, FactorGraph, backend, eliminate_sum, enumerate_configurations, enumerate_sum


def chain_graph(n, seed=0):
    """Heights on a path with +-1 steps and random pair weights."""
    rng = np.random.default_rng(seed)
    g = FactorGraph(lo=-n, hi=n)
    prev = g.fixed(0)
    tables = []
    for _ in range(n):
        v = g.relative(prev)
        t = rng.normal(size=(g.domain, g.domain)) + 1j * rng.normal(size=(g.domain, g.domain))
        g.add_factor((prev, v), t)
        tables.append(t)
        prev = v
    return g, tables


def brute_chain(n, tables):
    total = 0j
    for steps in itertools.product((-1, 1), repeat=n):
        h, w = 0, 1.0 + 0j
        for s, t in zip(steps, tables):
            w *= t[h + n, h + s + n]
            h += s
        total += w
    return total


@pytest.mark.parametrize("n", [1, 4, 7])
def test_enumeration_and_elimination_match_brute_force(n):
    g, tables = chain_graph(n, seed=n)
    want = brute_chain(n, tables)
    assert abs(enumerate_sum(g) - want) < 1e-12 * (1 + abs(want))
    assert abs(eliminate_sum(g) - want) < 1e-12 * (1 + abs(want))
    assert abs(eliminate_sum(g, order=range(g.n_vars)) - want) < 1e-12 * (1 + abs(want))


def test_numpy_backend_agrees(monkeypatch):
    g, _ = chain_graph(6, seed=3)
    fast = enumerate_sum(g)
    monkeypatch.setenv("VERTEXLAB_BACKEND", "numpy")
    assert backend() == "numpy"
    assert abs(enumerate_sum(g) - fast) < 1e-12 * (1 + abs(fast))


def test_binary_spins_and_configuration_listing():
    g = FactorGraph()
    a, b = g.binary(), g.binary()
    g.add_factor((a, b), [[1, 2], [3, 4]])
    vals, w = enumerate_configurations(g)
    assert sorted(map(tuple, vals.tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert w.sum() == 10
    assert enumerate_sum(g) == 10


def test_out_of_domain_values_are_dropped():
    g = FactorGraph(lo=0, hi=1)
    root = g.fixed(1)
    g.relative(root)  # 0 or 2; only 0 is inside the domain
    assert enumerate_sum(g) == 1
    assert eliminate_sum(g) == 1


def test_modular_heights_wrap():
    g = FactorGraph(lo=0, hi=2, modulus=3)
    root = g.fixed(0)
    v = g.relative(root)
    g.add_factor((v,), [1.0, 10.0, 100.0])
    assert enumerate_sum(g) == 110
    assert eliminate_sum(g) == 110


def test_limits():
    g = FactorGraph()
    for _ in range(MAX_FREE_VARS + 1):
        g.binary()
    with pytest.raises(SizeError):
        enumerate_sum(g)
    with pytest.raises(ValueError):
        FactorGraph().add_factor((0,), np.ones(3))
