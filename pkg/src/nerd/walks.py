"""Alternating random walks over a directed graph.

A source walk starts at a node drawn from the out-degree distribution and
alternates forward/backward edge traversals; a target walk starts from the
in-degree distribution and alternates backward/forward. Because a node
entered forward has the traversed edge as an in-edge (and vice versa), an
alternating walk can never hit a dead end, unlike a purely directed walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import GraphError
from .graph import DirectedGraph

WALK_KINDS = ("source", "target")


@dataclass(frozen=True)
class WalkSample:
    """A role-annotated node sequence of odd length 2n+1."""

    kind: str
    nodes: np.ndarray

    def __post_init__(self):
        if self.kind not in WALK_KINDS:
            raise ValueError(f"kind must be one of {WALK_KINDS}, got {self.kind!r}")
        if self.nodes.shape[0] % 2 == 0 or self.nodes.shape[0] < 3:
            raise ValueError("walk must have odd length 2n+1 with n >= 1")

    @property
    def n_pairs(self) -> int:
        return (self.nodes.shape[0] - 1) // 2

    @property
    def roles(self) -> list[str]:
        first, second = ("source", "target") if self.kind == "source" else ("target", "source")
        return [first if i % 2 == 0 else second for i in range(self.nodes.shape[0])]


def walk_transition(graph: DirectedGraph, v: int, direction: str, rng: np.random.Generator) -> int:
    """One weighted step from `v`: forward along an out-edge or backward along an in-edge.

    Raises GraphError on a dead end; the alternation invariant makes that
    unreachable mid-walk, so hitting it means the caller broke the protocol.
    """
    if direction == "forward":
        indptr, nbrs = graph.out_indptr, graph.out_nbrs
    elif direction == "backward":
        indptr, nbrs = graph.in_indptr, graph.in_nbrs
    else:
        raise ValueError(f"direction must be forward or backward, got {direction!r}")
    base = indptr[v]
    deg = indptr[v + 1] - base
    if deg == 0:
        raise GraphError(f"dead end: node {v} has no {direction} step")
    aprob, aalias = graph.transition_alias(direction)
    slot = min(int(rng.random() * deg), deg - 1)
    if rng.random() >= aprob[base + slot]:
        slot = aalias[base + slot]
    return int(nbrs[base + slot])


def sample_alternating_walk(graph: DirectedGraph, kind: str, n: int, rng: np.random.Generator) -> WalkSample:
    """Sample one alternating walk of 2n+1 nodes of the given kind."""
    if kind not in WALK_KINDS:
        raise ValueError(f"kind must be one of {WALK_KINDS}, got {kind!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    nodes = np.empty(2 * n + 1, dtype=np.int64)
    nodes[0] = graph.start_table(kind).sample(rng)
    forward = kind == "source"
    for step in range(2 * n):
        nodes[step + 1] = walk_transition(graph, int(nodes[step]), "forward" if forward else "backward", rng)
        forward = not forward
    return WalkSample(kind, nodes)


def sample_walk_batch(
    graph: DirectedGraph, n: int, count: int, seed: int, kind: str | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Sample `count` walks at once; the hot path behind the statistics tests.

    kind=None flips a fair coin per walk. Returns (kinds, nodes) where
    kinds[w] is 1 for a source walk and nodes has shape (count, 2n+1).
    Dispatches to the numba kernel or the vectorized numpy fallback depending
    on the active backend.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if kind not in (None, *WALK_KINDS):
        raise ValueError(f"kind must be None or one of {WALK_KINDS}, got {kind!r}")
    if backend.use_numba():
        from . import _kernels

        oap, oaa = graph.transition_alias("forward")
        iap, iaa = graph.transition_alias("backward")
        ps, pt = graph.start_table("source"), graph.start_table("target")
        kind_mode = 0 if kind is None else (1 if kind == "source" else 2)
        kinds, nodes, _ = _kernels.sample_walks(
            graph.out_indptr, graph.out_nbrs, oap, oaa,
            graph.in_indptr, graph.in_nbrs, iap, iaa,
            ps.prob, ps.alias, pt.prob, pt.alias,
            n, count, kind_mode, _kernels.stream_seed(seed, 0), np.uint64(0),
        )
        return kinds, nodes
    return _sample_walk_batch_numpy(graph, n, count, seed, kind)


def _sample_walk_batch_numpy(graph, n, count, seed, kind):
    rng = np.random.default_rng([seed, 0x57A1C])
    if kind is None:
        kinds = (rng.random(count) > 0.5).astype(np.uint8)
    else:
        kinds = np.full(count, 1 if kind == "source" else 0, dtype=np.uint8)
    nodes = np.empty((count, 2 * n + 1), dtype=np.int64)

    is_source = kinds == 1
    cur = np.empty(count, dtype=np.int64)
    cur[is_source] = graph.start_table("source").sample_many(rng, int(is_source.sum()))
    cur[~is_source] = graph.start_table("target").sample_many(rng, int((~is_source).sum()))
    nodes[:, 0] = cur

    oap, oaa = graph.transition_alias("forward")
    iap, iaa = graph.transition_alias("backward")
    forward = is_source.copy()
    for step in range(2 * n):
        u1 = rng.random(count)
        u2 = rng.random(count)
        for go_fwd, (indptr, nbrs, aprob, aalias) in (
            (True, (graph.out_indptr, graph.out_nbrs, oap, oaa)),
            (False, (graph.in_indptr, graph.in_nbrs, iap, iaa)),
        ):
            mask = forward == go_fwd
            if not mask.any():
                continue
            base = indptr[cur[mask]]
            deg = indptr[cur[mask] + 1] - base
            slot = np.minimum((u1[mask] * deg).astype(np.int64), deg - 1)
            take_alias = u2[mask] >= aprob[base + slot]
            slot = np.where(take_alias, aalias[base + slot], slot)
            cur[mask] = nbrs[base + slot]
        nodes[:, step + 1] = cur
        forward = ~forward
    return kinds, nodes


def sample_directed_walk(graph: DirectedGraph, max_steps: int, rng: np.random.Generator) -> np.ndarray:
    """Reference non-alternating walker: follow out-edges until a dead end.

    Starts from the out-degree distribution like a source walk but keeps
    stepping forward only, so it stalls on any node without out-edges. Used
    as the baseline that alternating walks are compared against.
    """
    nodes = [graph.start_table("source").sample(rng)]
    for _ in range(max_steps):
        v = nodes[-1]
        if graph.out_indptr[v + 1] == graph.out_indptr[v]:
            break
        nodes.append(walk_transition(graph, v, "forward", rng))
    return np.array(nodes, dtype=np.int64)


def count_opposite_role_pairs(kinds: np.ndarray, nodes: np.ndarray, n_nodes: int) -> np.ndarray:
    """Tally (source, target) co-occurrence counts from sampled walks.

    For a source walk the pairs are (W[0], W[i]) at odd offsets i; for a
    target walk they are (W[i], W[0]). Returns an n_nodes x n_nodes count
    matrix whose total is count * n.
    """
    n = (nodes.shape[1] - 1) // 2
    counts = np.zeros((n_nodes, n_nodes), dtype=np.float64)
    src_mask = kinds == 1
    for i in range(1, 2 * n, 2):
        np.add.at(counts, (nodes[src_mask, 0], nodes[src_mask, i]), 1.0)
        np.add.at(counts, (nodes[~src_mask, i], nodes[~src_mask, 0]), 1.0)
    return counts
