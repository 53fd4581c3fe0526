import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import synth
from nerd.errors import EdgeListError, GraphError
from nerd.graph import (
    DirectedGraph,
    degree_distribution,
    load_edge_list,
    load_id_map,
    noise_distribution,
    save_id_map,
    write_edge_list,
)


def test_load_unit_weights():
    g = load_edge_list(io.StringIO("0 1\n0 2\n2 1"))
    assert g.n_nodes == 3
    assert g.n_edges == 3
    assert g.vol == 3.0
    assert g.d_out.tolist() == [2.0, 0.0, 1.0]
    assert g.d_in.tolist() == [0.0, 2.0, 1.0]


def test_load_labels_and_weight():
    g = load_edge_list(io.StringIO("a b 2.5"))
    assert g.n_nodes == 2
    assert g.n_edges == 1
    assert g.vol == 2.5
    assert g.label_ids == {"a": 0, "b": 1}


def test_duplicate_edges_merge():
    g = load_edge_list(io.StringIO("0 1\n0 1"))
    assert g.n_edges == 1
    assert g.vol == 2.0
    nbrs, wts = g.out_neighbors(0)
    assert nbrs.tolist() == [1] and wts.tolist() == [2.0]


def test_comments_and_blank_lines():
    g = load_edge_list(io.StringIO("# header\n\n0 1\n  # indented comment\n1 0\n"))
    assert g.n_edges == 2


def test_self_loop_kept():
    g = load_edge_list(io.StringIO("0 0 2\n0 1"))
    assert g.n_edges == 2
    assert g.d_out[0] == 3.0
    assert g.d_in[0] == 2.0
    assert g.vol == 3.0


def test_default_weight():
    g = load_edge_list(io.StringIO("0 1"), default_weight=0.5)
    assert g.vol == 0.5


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("0 1\n0", "line 2"),
        ("0 1 2 3", "line 1"),
        ("0 1 zero", "line 1"),
        ("0 1 0", "line 1"),
        ("0 1 -2", "line 1"),
        ("0 1 inf", "line 1"),
    ],
)
def test_parse_errors_carry_line_numbers(text, fragment):
    with pytest.raises(EdgeListError) as err:
        load_edge_list(io.StringIO(text))
    assert fragment in str(err.value)


def test_empty_input_rejected():
    with pytest.raises(EdgeListError):
        load_edge_list(io.StringIO("# nothing\n"))


def test_from_edges_rejects_bad_input():
    with pytest.raises(GraphError):
        DirectedGraph.from_edges(2, [(0, 5, 1.0)])
    with pytest.raises(GraphError):
        DirectedGraph.from_edges(2, [(0, 1, 0.0)])
    with pytest.raises(GraphError):
        # node 2 has no incident edge
        DirectedGraph.from_edges(3, [(0, 1, 1.0)])


def test_degree_distribution_g1(g1):
    src = degree_distribution(g1, "source")
    assert src.kind == "P_out"
    assert np.allclose(src.probs, [2 / 3, 0.0, 1 / 3])
    tgt = degree_distribution(g1, "target")
    assert tgt.kind == "P_in"
    assert np.allclose(tgt.probs, [0.0, 2 / 3, 1 / 3])


def test_degree_distribution_single_edge():
    g = load_edge_list(io.StringIO("0 1"))
    assert degree_distribution(g, "source").probs.tolist() == [1.0, 0.0]


def test_noise_distribution_g1(g1):
    z = 2**0.75 + 1.0
    tgt = noise_distribution(g1, "target")
    assert tgt.kind == "noise_in"
    assert np.allclose(tgt.probs, [0.0, 2**0.75 / z, 1.0 / z])
    assert np.allclose(tgt.probs, [0.0, 0.6271, 0.3729], atol=5e-5)
    src = noise_distribution(g1, "source")
    assert np.allclose(src.probs, [2**0.75 / z, 0.0, 1.0 / z])


def test_noise_distribution_regular_graph():
    # directed 4-cycle: all degrees equal, so noise is uniform
    g = DirectedGraph.from_edges(4, [(i, (i + 1) % 4, 1.0) for i in range(4)])
    for role in ("source", "target"):
        assert np.allclose(noise_distribution(g, role).probs, 0.25)


def test_bad_role_rejected(g1):
    with pytest.raises(ValueError):
        degree_distribution(g1, "src")


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_random_graph_invariants(seed):
    g = synth.random_weighted_graph(seed)
    g.validate()
    assert abs(g.d_out.sum() - g.vol) <= 1e-9 * g.vol
    assert abs(g.d_in.sum() - g.vol) <= 1e-9 * g.vol
    for role in ("source", "target"):
        for dist in (degree_distribution(g, role), noise_distribution(g, role)):
            assert abs(dist.probs.sum() - 1.0) <= 1e-9
            assert (dist.probs >= 0).all()
    deg = {"source": g.d_out, "target": g.d_in}
    for role in ("source", "target"):
        zero_probs = noise_distribution(g, role).probs == 0
        assert (zero_probs == (deg[role] == 0)).all()


def test_adjacency_sides_consistent(weighted_loop):
    weighted_loop.validate()
    srcs, dsts, wts = weighted_loop.edge_arrays()
    seen = set(zip(srcs.tolist(), dsts.tolist()))
    for v in range(weighted_loop.n_nodes):
        nbrs, ws = weighted_loop.in_neighbors(v)
        for u, w in zip(nbrs.tolist(), ws.tolist()):
            assert (u, v) in seen


def test_id_map_round_trip(tmp_path):
    g = load_edge_list(io.StringIO("alpha beta\nbeta gamma"))
    path = tmp_path / "graph.ids"
    save_id_map(g, path)
    assert load_id_map(path) == {"alpha": 0, "beta": 1, "gamma": 2}


def test_write_edge_list_round_trip(tmp_path, weighted_loop):
    path = tmp_path / "graph.tsv"
    write_edge_list(weighted_loop, path)
    g2 = load_edge_list(path)
    assert g2.n_nodes == weighted_loop.n_nodes
    assert g2.n_edges == weighted_loop.n_edges
    # reload assigns dense ids in first-seen order, so compare by label
    for label, old_id in weighted_loop.label_ids.items():
        new_id = g2.label_ids[label]
        assert g2.d_out[new_id] == pytest.approx(weighted_loop.d_out[old_id])
        assert g2.d_in[new_id] == pytest.approx(weighted_loop.d_in[old_id])
