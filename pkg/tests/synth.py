"""Synthetic graph builders shared by the unit and acceptance tests."""

import numpy as np

from nerd.graph import DirectedGraph


def g1() -> DirectedGraph:
    """The running 3-node example: 0->1, 0->2, 2->1, unit weights."""
    return DirectedGraph.from_edges(3, [(0, 1, 1.0), (0, 2, 1.0), (2, 1, 1.0)])


def sink_source_graph() -> DirectedGraph:
    """4 nodes where 0 has no in-edges and 3 has no out-edges."""
    edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 2.0), (2, 3, 1.0), (1, 3, 1.0)]
    return DirectedGraph.from_edges(4, edges)


def weighted_loop_graph() -> DirectedGraph:
    """5 nodes, mixed weights, one self-loop."""
    edges = [
        (0, 0, 2.0),
        (0, 1, 0.5),
        (1, 2, 3.0),
        (2, 0, 1.0),
        (2, 1, 1.0),
        (3, 2, 0.25),
        (2, 4, 1.5),
        (4, 3, 1.0),
    ]
    return DirectedGraph.from_edges(5, edges)


def random_weighted_graph(seed: int, n_min: int = 2, n_max: int = 12, weighted: bool = True) -> DirectedGraph:
    """Random digraph with no isolated nodes (a permutation cycle underlies it)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    merged = {}
    perm = rng.permutation(n)
    for i in range(n):
        u, v = int(perm[i]), int(perm[(i + 1) % n])
        w = float(rng.uniform(0.1, 5.0)) if weighted else 1.0
        merged[(u, v)] = merged.get((u, v), 0.0) + w
    for _ in range(int(rng.integers(0, 3 * n + 1))):
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        w = float(rng.uniform(0.1, 5.0)) if weighted else 1.0
        merged[(u, v)] = merged.get((u, v), 0.0) + w
    return DirectedGraph.from_edges(n, [(u, v, w) for (u, v), w in merged.items()])


def er_digraph(n_nodes: int, avg_out_degree: float, seed: int) -> DirectedGraph:
    """Sparse random digraph where every node keeps an out- and an in-edge."""
    rng = np.random.default_rng(seed)
    merged = {}
    perm = rng.permutation(n_nodes)
    for i in range(n_nodes):
        merged[(int(perm[i]), int(perm[(i + 1) % n_nodes]))] = 1.0
    n_extra = int(n_nodes * max(avg_out_degree - 1.0, 0.0))
    pairs = rng.integers(0, n_nodes, size=(n_extra, 2))
    for u, v in pairs.tolist():
        if u != v:
            merged[(u, v)] = 1.0
    return DirectedGraph.from_edges(n_nodes, [(u, v, w) for (u, v), w in merged.items()])


def hub_authority_graph(n_hubs: int, n_auth: int, out_per_hub: int, seed: int) -> DirectedGraph:
    """Hubs point only at authorities; authorities have zero out-degree.

    No reciprocal edge can exist. Authorities that no hub picked get one
    patch edge so nothing is isolated.
    """
    rng = np.random.default_rng(seed)
    merged = {}
    covered = np.zeros(n_auth, dtype=bool)
    for hub in range(n_hubs):
        targets = rng.choice(n_auth, size=out_per_hub, replace=False)
        covered[targets] = True
        for t in targets.tolist():
            merged[(hub, n_hubs + t)] = 1.0
    for t in np.flatnonzero(~covered).tolist():
        merged[(int(rng.integers(0, n_hubs)), n_hubs + t)] = 1.0
    return DirectedGraph.from_edges(n_hubs + n_auth, [(u, v, w) for (u, v), w in merged.items()])


def two_block_sbm(n_nodes: int, p_within: float, p_cross: float, seed: int):
    """Directed two-block stochastic block model; returns (graph, block labels)."""
    rng = np.random.default_rng(seed)
    half = n_nodes // 2
    blocks = np.zeros(n_nodes, dtype=np.int64)
    blocks[half:] = 1
    probs = np.where(blocks[:, None] == blocks[None, :], p_within, p_cross)
    adj = rng.random((n_nodes, n_nodes)) < probs
    np.fill_diagonal(adj, False)
    merged = {(int(u), int(v)): 1.0 for u, v in np.argwhere(adj).tolist()}
    # patch nodes the coin flips left without any incident edge
    incident = np.zeros(n_nodes, dtype=np.int64)
    for u, v in merged:
        incident[u] += 1
        incident[v] += 1
    for v in np.flatnonzero(incident == 0).tolist():
        lo, hi = (0, half) if blocks[v] == 0 else (half, n_nodes)
        other = int(rng.integers(lo, hi))
        while other == v:
            other = int(rng.integers(lo, hi))
        merged[(v, other)] = 1.0
    graph = DirectedGraph.from_edges(n_nodes, [(u, v, w) for (u, v), w in merged.items()])
    labels = {v: {int(blocks[v])} for v in range(n_nodes)}
    return graph, labels
