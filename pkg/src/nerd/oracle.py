"""Dense analytic references for small graphs.

These computations mirror what the sampling/training pipeline converges to:
the symmetric bipartite lift of the digraph, the exact distribution of
opposite-role pairs emitted per walk, and the closed-form matrix whose
entries the trained source/target inner products approximate in non-joint
mode. They exist for correctness checking, not production embedding.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import SizeLimitError
from .graph import DirectedGraph

DEFAULT_DENSE_LIMIT = 2000
_ENV_VAR = "NERD_DENSE_LIMIT"


def dense_limit() -> int:
    """Node cap for dense computations; NERD_DENSE_LIMIT overrides the default."""
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return DEFAULT_DENSE_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{_ENV_VAR} must be >= 1, got {value}")
    return value


def _check_limit(graph: DirectedGraph, limit: int | None) -> None:
    cap = dense_limit() if limit is None else limit
    if graph.n_nodes > cap:
        raise SizeLimitError(f"graph has {graph.n_nodes} nodes, dense limit is {cap}")


def _dense_adjacency(graph: DirectedGraph) -> np.ndarray:
    n = graph.n_nodes
    a = np.zeros((n, n), dtype=np.float64)
    srcs, dsts, wts = graph.edge_arrays()
    a[srcs, dsts] = wts
    return a


def bipartite_adjacency(graph: DirectedGraph, limit: int | None = None) -> np.ndarray:
    """Symmetric 2N x 2N adjacency of the bipartite lift.

    Rows/columns [0, N) are the source copies, [N, 2N) the target copies; a
    directed edge (u, v, w) becomes the undirected edge between source copy u
    and target copy v with weight w.
    """
    _check_limit(graph, limit)
    n = graph.n_nodes
    a = _dense_adjacency(graph)
    lifted = np.zeros((2 * n, 2 * n), dtype=np.float64)
    lifted[:n, n:] = a
    lifted[n:, :n] = a.T
    return lifted


def _lift_transition(graph: DirectedGraph) -> np.ndarray:
    """Row-stochastic D^-1 * lift, with zero-degree rows set to zero."""
    lifted = bipartite_adjacency(graph, limit=graph.n_nodes)
    deg = np.concatenate([graph.d_out, graph.d_in])
    inv = np.zeros_like(deg)
    nz = deg > 0
    inv[nz] = 1.0 / deg[nz]
    return inv[:, None] * lifted


def pair_distribution(graph: DirectedGraph, n: int, limit: int | None = None) -> np.ndarray:
    """Expected per-walk count of each opposite-role pair (source i, target j).

    Sums, over the odd powers r = 1, 3, ..., 2n-1 of the lift's transition
    matrix, the chance that a fair-coin source or target walk emits (i, j) at
    offset r from its start. Total mass equals n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_limit(graph, limit)
    size = graph.n_nodes
    p = _lift_transition(graph)
    p2 = p @ p
    start_out = graph.d_out / graph.vol
    start_in = graph.d_in / graph.vol

    result = np.zeros((size, size), dtype=np.float64)
    power = p.copy()
    for _ in range(n):
        out_block = power[:size, size:]
        in_block = power[size:, :size]
        result += 0.5 * start_out[:, None] * out_block
        result += 0.5 * start_in[None, :] * in_block.T
        power = power @ p2
    return result


def factorization_target(graph: DirectedGraph, n: int, kappa: int, limit: int | None = None) -> np.ndarray:
    """Closed-form matrix approximated by phi_s(i) . phi_t(j) in non-joint training.

    Entry (i, j) is log of vol(G) times the (source i, target j) block of
    sum_r P^r D^-1 over odd r <= 2n-1, minus log kappa; entries whose inner
    value is zero come out as -inf.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if kappa < 1:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    _check_limit(graph, limit)
    size = graph.n_nodes
    p = _lift_transition(graph)
    p2 = p @ p
    deg = np.concatenate([graph.d_out, graph.d_in])
    inv = np.zeros_like(deg)
    nz = deg > 0
    inv[nz] = 1.0 / deg[nz]

    acc = np.zeros((2 * size, 2 * size), dtype=np.float64)
    power = p.copy()
    for _ in range(n):
        acc += power
        power = power @ p2
    inner = graph.vol * (acc * inv[None, :])[:size, size:]
    with np.errstate(divide="ignore"):
        return np.log(inner) - np.log(kappa)
