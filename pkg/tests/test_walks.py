import io

import numpy as np
import pytest

import synth
from oracles import enumerate_walks
from nerd.errors import GraphError
from nerd.graph import load_edge_list
from nerd.walks import (
    WalkSample,
    count_opposite_role_pairs,
    sample_alternating_walk,
    sample_directed_walk,
    sample_walk_batch,
    walk_transition,
)


def assert_valid_walk(graph, kind, nodes):
    """Check the alternation invariant against the raw edge set."""
    edges = graph.edge_set()
    forward_first = kind == "source"
    for i in range(len(nodes) - 1):
        step_is_forward = (i % 2 == 0) == forward_first
        pair = (nodes[i], nodes[i + 1]) if step_is_forward else (nodes[i + 1], nodes[i])
        assert pair in edges, f"step {i} of {kind} walk {nodes} violates edge existence"


def test_walk_sample_roles():
    w = WalkSample("source", np.array([0, 1, 0]))
    assert w.roles == ["source", "target", "source"]
    assert w.n_pairs == 1
    w = WalkSample("target", np.array([1, 0, 1, 0, 1]))
    assert w.roles == ["target", "source", "target", "source", "target"]
    assert w.n_pairs == 2


def test_walk_sample_validation():
    with pytest.raises(ValueError):
        WalkSample("source", np.array([0, 1]))
    with pytest.raises(ValueError):
        WalkSample("sideways", np.array([0, 1, 0]))


def test_transition_distributions(g1):
    rng = np.random.default_rng(11)
    n_draws = 100_000
    cases = [
        (0, "forward", {1: 0.5, 2: 0.5}),
        (1, "backward", {0: 0.5, 2: 0.5}),
        (2, "backward", {0: 1.0}),
        (2, "forward", {1: 1.0}),
    ]
    for v, direction, expected in cases:
        draws = np.array([walk_transition(g1, v, direction, rng) for _ in range(n_draws)])
        for node, p in expected.items():
            freq = float(np.mean(draws == node))
            sigma = max(np.sqrt(p * (1 - p) / n_draws), 1e-12)
            assert abs(freq - p) <= max(3 * sigma, 1e-9)
        assert set(np.unique(draws)) == set(expected)


def test_transition_dead_end_raises(g1):
    rng = np.random.default_rng(0)
    with pytest.raises(GraphError):
        walk_transition(g1, 1, "forward", rng)  # node 1 has no out-edges
    with pytest.raises(GraphError):
        walk_transition(g1, 0, "backward", rng)  # node 0 has no in-edges


def test_source_walks_enumerate_g1(g1):
    allowed = {(0, 1, 0), (0, 1, 2), (0, 2, 0), (2, 1, 0), (2, 1, 2)}
    # cross-check the hand enumeration against the recursive oracle
    assert {nodes for _, nodes in enumerate_walks(g1, "source", 1)} == allowed
    rng = np.random.default_rng(12)
    for _ in range(500):
        w = sample_alternating_walk(g1, "source", 1, rng)
        assert tuple(w.nodes.tolist()) in allowed
        assert w.nodes[0] != 1


def test_target_walk_starts(g1):
    rng = np.random.default_rng(13)
    starts = {sample_alternating_walk(g1, "target", 1, rng).nodes[0] for _ in range(300)}
    assert starts <= {1, 2}


def test_single_edge_forced_walk():
    g = load_edge_list(io.StringIO("0 1"))
    rng = np.random.default_rng(14)
    w = sample_alternating_walk(g, "source", 2, rng)
    assert w.nodes.tolist() == [0, 1, 0, 1, 0]


def test_batch_walks_valid_and_complete(sink_source):
    for force_backend in (None,):
        kinds, nodes = sample_walk_batch(sink_source, 3, 2000, seed=9)
        assert nodes.shape == (2000, 7)
        for row in range(0, 2000, 37):
            kind = "source" if kinds[row] else "target"
            assert_valid_walk(sink_source, kind, nodes[row].tolist())


def test_batch_fixed_kind(sink_source):
    kinds, nodes = sample_walk_batch(sink_source, 1, 500, seed=3, kind="source")
    assert (kinds == 1).all()
    assert not np.any(nodes[:, 0] == 3)  # the sink cannot start a source walk
    kinds, nodes = sample_walk_batch(sink_source, 1, 500, seed=3, kind="target")
    assert (kinds == 0).all()
    assert not np.any(nodes[:, 0] == 0)  # the source node cannot start a target walk


def test_first_step_edge_distribution(g1):
    # for n=1, (W0, W1) over source walks follows w(i,j)/vol
    kinds, nodes = sample_walk_batch(g1, 1, 200_000, seed=21, kind="source")
    counts = np.zeros((3, 3))
    np.add.at(counts, (nodes[:, 0], nodes[:, 1]), 1.0)
    freq = counts / nodes.shape[0]
    expected = np.zeros((3, 3))
    srcs, dsts, wts = g1.edge_arrays()
    expected[srcs, dsts] = wts / g1.vol
    assert np.abs(freq - expected).max() <= 0.005


def test_backend_fallback_matches_statistics(g1, monkeypatch):
    kinds_nb, nodes_nb = sample_walk_batch(g1, 2, 100_000, seed=5)
    monkeypatch.setenv("NERD_BACKEND", "numpy")
    kinds_np, nodes_np = sample_walk_batch(g1, 2, 100_000, seed=5)
    f_nb = count_opposite_role_pairs(kinds_nb, nodes_nb, 3) / 100_000
    f_np = count_opposite_role_pairs(kinds_np, nodes_np, 3) / 100_000
    assert np.abs(f_nb - f_np).max() <= 0.01
    for row in range(0, 100_000, 9973):
        kind = "source" if kinds_np[row] else "target"
        assert_valid_walk(g1, kind, nodes_np[row].tolist())


def test_never_stuck_on_heavy_sink_graph():
    g = synth.hub_authority_graph(10, 990, 120, seed=31)
    assert float(np.mean(g.d_out == 0)) >= 0.99
    kinds, nodes = sample_walk_batch(g, 10, 10_000, seed=8)
    assert nodes.shape == (10_000, 21)
    for row in range(0, 10_000, 199):
        kind = "source" if kinds[row] else "target"
        assert_valid_walk(g, kind, nodes[row].tolist())


def test_directed_walker_stalls_where_alternating_does_not():
    g = synth.hub_authority_graph(10, 990, 120, seed=31)
    rng = np.random.default_rng(77)
    stalled = 0
    for _ in range(2000):
        walk = sample_directed_walk(g, 20, rng)
        if walk.shape[0] < 21:
            stalled += 1
    assert stalled / 2000 > 0.9
