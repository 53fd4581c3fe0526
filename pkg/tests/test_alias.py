import numpy as np
import pytest
from scipy import stats

import synth
from nerd.alias import AliasTable, alias_sample, build_alias_table, csr_alias_arrays
from nerd.errors import GraphError
from nerd.graph import degree_distribution


def test_singleton_distribution():
    table = AliasTable.from_probs([1.0])
    rng = np.random.default_rng(0)
    assert all(table.sample(rng) == 0 for _ in range(100))


def test_two_point_frequencies():
    table = AliasTable.from_probs([0.5, 0.5])
    rng = np.random.default_rng(1)
    draws = table.sample_many(rng, 1_000_000)
    freq = np.bincount(draws, minlength=2) / draws.size
    # 3-sigma binomial bounds
    assert 0.497 <= freq[0] <= 0.503
    assert 0.497 <= freq[1] <= 0.503


def test_zero_mass_never_drawn(g1):
    table = build_alias_table(degree_distribution(g1, "source"))
    rng = np.random.default_rng(2)
    draws = table.sample_many(rng, 1_000_000)
    assert not np.any(draws == 1)
    freq = np.bincount(draws, minlength=3) / draws.size
    assert np.allclose(freq, [2 / 3, 0.0, 1 / 3], atol=3e-3)


def test_all_zero_distribution_rejected():
    with pytest.raises(GraphError):
        AliasTable.from_probs([0.0, 0.0])
    with pytest.raises(GraphError):
        AliasTable.from_probs([])


def test_scalar_and_vector_draws_agree_in_distribution():
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    table = build_alias_table(probs)
    rng = np.random.default_rng(3)
    scalar = np.array([alias_sample(table, rng) for _ in range(200_000)])
    vector = table.sample_many(np.random.default_rng(4), 200_000)
    for draws in (scalar, vector):
        freq = np.bincount(draws, minlength=4) / draws.size
        assert np.allclose(freq, probs, atol=5e-3)


def test_chi_square_goodness_of_fit():
    # support of 1000 ids with bounded mass ratios so every expected count is large
    rng = np.random.default_rng(5)
    raw = rng.uniform(0.5, 1.5, size=1000)
    probs = raw / raw.sum()
    table = build_alias_table(probs)
    draws = table.sample_many(np.random.default_rng(6), 1_000_000)
    observed = np.bincount(draws, minlength=1000)
    _, p_value = stats.chisquare(observed, f_exp=probs * 1_000_000)
    assert p_value > 0.001


def test_csr_alias_matches_per_node_transitions():
    g = synth.weighted_loop_graph()
    prob, alias = csr_alias_arrays(g.out_indptr, g.out_wts)
    rng = np.random.default_rng(7)
    for v in range(g.n_nodes):
        base, hi = g.out_indptr[v], g.out_indptr[v + 1]
        deg = hi - base
        if deg == 0:
            continue
        counts = np.zeros(deg)
        n_draws = 100_000
        u1 = rng.random(n_draws)
        u2 = rng.random(n_draws)
        slot = np.minimum((u1 * deg).astype(np.int64), deg - 1)
        slot = np.where(u2 >= prob[base + slot], alias[base + slot], slot)
        counts = np.bincount(slot, minlength=deg)
        expected = g.out_wts[base:hi] / g.d_out[v]
        assert np.allclose(counts / n_draws, expected, atol=5e-3)
