import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ergkit.graph import (
    AdjacencyState,
    Clique,
    SubgraphKind,
    hamiltonian_et,
    hamiltonian_mf,
    hom_density,
    new_state,
)


def random_adj(n, p, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    return (upper | upper.T).astype(np.uint8)


def test_complete_four():
    s = new_state(4, "complete")
    assert (s.edge_count, s.triangle_count) == (6, 4)
    assert s.common_neighbor_count(0, 1) == 2


def test_flip_deltas():
    s = AdjacencyState.from_edges(4, [(0, 2), (1, 2), (0, 3), (1, 3)])
    assert s.flip_edge(0, 1) == (1, 2)
    assert s.flip_edge(0, 1) == (-1, -2)
    assert s.set_edge(0, 2, True) == (0, 0)


@pytest.mark.parametrize("n", [5, 9, 70, 130])
def test_counts_match_naive(n):
    adj = random_adj(n, 0.4, n)
    s = AdjacencyState.from_dense(adj)
    assert s.edge_count == oracles.edges_naive(adj.tolist())
    if n <= 70:
        assert s.triangle_count == oracles.triangles_naive(adj.tolist())


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 80), st.lists(st.tuples(st.integers(0, 79), st.integers(0, 79)), max_size=200))
def test_flips_keep_counts(n, pairs):
    s = new_state(n, "bernoulli", 0.3, seed=n)
    for a, b in pairs:
        a, b = a % n, b % n
        if a != b:
            s.flip_edge(a, b)
    assert s.is_consistent()
    assert np.array_equal(s.to_dense(), s.to_dense().T)


def test_many_flips_n32():
    rng = np.random.default_rng(5)
    s = new_state(32)
    for _ in range(20000):
        a, b = rng.choice(32, 2, replace=False)
        s.flip_edge(int(a), int(b))
    assert s.is_consistent()


@pytest.mark.parametrize("seed", range(4))
def test_hom_density_naive(seed):
    adj = random_adj(6, 0.5, seed)
    s = AdjacencyState.from_dense(adj)
    a = adj.tolist()
    assert hom_density(SubgraphKind.EDGE, s) == pytest.approx(oracles.hom_count_naive(2, [(0, 1)], a) / 36)
    assert hom_density(SubgraphKind.WEDGE, s) == pytest.approx(oracles.hom_count_naive(*oracles.WEDGE, a) / 216)
    assert hom_density(SubgraphKind.TRIANGLE, s) == pytest.approx(oracles.hom_count_naive(*oracles.TRIANGLE, a) / 216)
    for ell in (3, 4, 5):
        ref = oracles.hom_count_naive(*oracles.clique_graph(ell), a) / 6**ell
        assert hom_density(Clique(ell), s) == pytest.approx(ref)


def test_clique_validation():
    with pytest.raises(ValueError):
        Clique(6)


def test_from_dense_validation():
    with pytest.raises(ValueError):
        AdjacencyState.from_dense(np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]]))
    with pytest.raises(ValueError):
        AdjacencyState.from_dense(np.eye(3, dtype=int))
    with pytest.raises(ValueError):
        AdjacencyState.from_edges(3, [(1, 1)])
    s = new_state(4)
    with pytest.raises(ValueError):
        s.has_edge(2, 2)
    with pytest.raises(IndexError):
        s.has_edge(0, 4)


def test_edgelist_round_trip():
    s = new_state(67, "bernoulli", 0.2, seed=3)
    t = AdjacencyState.from_edgelist(s.to_edgelist())
    assert s == t
    assert s.copy() == s


def test_bernoulli_seeded():
    assert new_state(20, "bernoulli", 0.5, seed=1) == new_state(20, "bernoulli", 0.5, seed=1)
    with pytest.raises(ValueError):
        new_state(5, "star")


def test_hamiltonians():
    s = new_state(5, "complete")
    assert hamiltonian_et((2.0, -1.0), s) == pytest.approx(2.0 / 5 * 10 - 10)
    assert hamiltonian_mf((2.0, 0.0), s) == pytest.approx(4 * 2.0 * 1000 / (3 * 625))
