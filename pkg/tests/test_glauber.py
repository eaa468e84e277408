import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergkit.glauber import (
    ChainConfig,
    SampleBatch,
    advance,
    chain_rngs,
    default_burn_in,
    detailed_balance_check,
    glauber_step,
    run_chain,
    run_chains,
    update_probability,
)
from ergkit.graph import new_state


def logistic(z):
    return 1.0 / (1.0 + math.exp(-z))


def test_empty_graph_probability():
    s = new_state(10)
    assert update_probability(s, (3.0, -0.4), 2, 7) == pytest.approx(logistic(-0.4))
    assert detailed_balance_check(s, (3.0, -0.4), (2, 7)) < 1e-12


def test_complete_graph_probability():
    n = 9
    s = new_state(n, "complete")
    assert update_probability(s, (2.0, 0.5), 0, 1) == pytest.approx(logistic(2.0 / n * (n - 2) + 0.5))
    lit = update_probability(s, (2.0, 0.5), 0, 1, "literal")
    assert lit == pytest.approx(logistic(2.0 * (n - 2) + 0.5))
    assert detailed_balance_check(s, (2.0, 0.5), (0, 1)) < 1e-9


def test_random_states_detailed_balance():
    rng = np.random.default_rng(11)
    for i in range(100):
        s = new_state(10, "bernoulli", rng.random(), seed=i)
        a, b = rng.choice(10, 2, replace=False)
        assert detailed_balance_check(s, (2.0, -1.0), (int(a), int(b))) < 1e-9


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 20), st.floats(0.0, 1.0), st.floats(-1.9, 4.0), st.floats(-2.0, 2.0), st.integers(0, 2**32))
def test_detailed_balance_property(n, dens, alpha, h, seed):
    rng = np.random.default_rng(seed)
    s = new_state(n, "bernoulli", dens, seed=seed)
    a, b = rng.choice(n, 2, replace=False)
    assert detailed_balance_check(s, (alpha, h), (int(a), int(b))) < 1e-9


def test_literal_normalization_breaks_balance():
    s = new_state(10, "complete")
    assert detailed_balance_check(s, (2.0, 0.0), (0, 1), "literal") > 1.0


def test_step_keeps_counts():
    s = new_state(40, "bernoulli", 0.5, seed=1)
    rng = chain_rngs(1, 1)[0]
    flips = sum(glauber_step(s, (1.0, 0.0), rng) for _ in range(500))
    assert 0 < flips < 500
    advance(s, (1.0, 0.0), rng, 100000)
    assert s.is_consistent()


def test_same_seed_identical():
    cfg = ChainConfig(20, 1.0, 0.5, seed=42, num_samples=50)
    assert run_chain(cfg).same_records(run_chain(cfg))
    other = run_chain(ChainConfig(20, 1.0, 0.5, seed=43, num_samples=50))
    assert not run_chain(cfg).same_records(other)


def test_thread_count_independent():
    cfg = ChainConfig(16, -1.0, 1.0, seed=9, num_samples=40)
    one = run_chains(cfg, 3, threads=1)
    many = run_chains(cfg, 3, threads=3)
    assert all(a.same_records(b) for a, b in zip(one, many))
    assert one[0].same_records(run_chain(cfg))
    assert not one[0].same_records(one[1])


def test_step_indices():
    cfg = ChainConfig(10, 0.0, 0.0, burn_in_steps=100, thin_steps=7, num_samples=20)
    b = run_chain(cfg)
    assert len(b) == 20
    assert np.all(np.diff(b.step) == 7)
    assert b.step[0] == 107


def test_default_policy():
    cfg = ChainConfig(150, 1.0, 1.0)
    assert cfg.burn_in_steps == math.ceil(10 * 150**2 * math.log(150)) == default_burn_in(150)
    assert cfg.thin_steps == 150**2
    with pytest.raises(ValueError):
        ChainConfig(10, 0.0, 0.0, num_samples=0)
    with pytest.raises(ValueError):
        ChainConfig(10, 0.0, 0.0, normalization="metropolis")


def test_alpha_zero_edge_mean():
    n, h = 12, 0.4
    cfg = ChainConfig(n, 0.0, h, seed=5, thin_steps=200, num_samples=10000)
    b = run_chain(cfg)
    slots = n * (n - 1) // 2
    p = logistic(h)
    se = math.sqrt(slots * p * (1 - p) / len(b))
    assert abs(b.edge_count.mean() - slots * p) < 3 * se


def test_csv_round_trip(tmp_path):
    b = run_chain(ChainConfig(12, 1.0, 0.0, seed=3, num_samples=30, init="bernoulli"))
    path = tmp_path / "b.csv"
    b.to_csv(path)
    assert path.read_text().splitlines()[0] == "step,edge_count,triangle_count"
    back = SampleBatch.from_csv(path)
    assert back.same_records(b)
    assert back.config == b.config
    merged = SampleBatch.concatenate([b, back])
    assert len(merged) == 60
