"""Directed weighted graphs: loading, dual adjacency, degrees, distributions.

Graphs are immutable after construction. Nodes exist only through edges, so an
isolated node (zero in-degree and zero out-degree) can never be represented;
external labels are mapped to dense ids in first-seen order.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alias import AliasTable, csr_alias_arrays
from .errors import EdgeListError, GraphError

ROLES = ("source", "target")

DISTRIBUTION_KINDS = ("P_out", "P_in", "noise_out", "noise_in")


@dataclass(frozen=True)
class Distribution:
    """A probability vector over all nodes, tagged with what it describes."""

    probs: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValueError(f"kind must be one of {DISTRIBUTION_KINDS}, got {self.kind!r}")


def _require_role(role: str) -> None:
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")


class DirectedGraph:
    """Weighted digraph with CSR adjacency stored in both directions.

    The same edge set backs ``out_*`` (grouped by source) and ``in_*``
    (grouped by destination); ``d_out``/``d_in`` are weighted degrees and
    ``vol`` their common total. Alias tables for transitions, walk starts and
    noise sampling are built lazily and cached; everything is safe to share
    across threads once constructed.
    """

    def __init__(self, n_nodes, out_csr, in_csr, labels):
        self.n_nodes = n_nodes
        self.out_indptr, self.out_nbrs, self.out_wts = out_csr
        self.in_indptr, self.in_nbrs, self.in_wts = in_csr
        self.labels = labels
        self.label_ids = {lab: i for i, lab in enumerate(labels)}
        self.n_edges = int(self.out_nbrs.shape[0])

        self.d_out = np.zeros(n_nodes, dtype=np.float64)
        np.add.at(self.d_out, np.repeat(np.arange(n_nodes), np.diff(self.out_indptr)), self.out_wts)
        self.d_in = np.zeros(n_nodes, dtype=np.float64)
        np.add.at(self.d_in, np.repeat(np.arange(n_nodes), np.diff(self.in_indptr)), self.in_wts)
        self.vol = float(self.out_wts.sum())

        self._alias_cache: dict = {}
        self._edge_set: frozenset | None = None

        if n_nodes == 0:
            raise GraphError("graph has no edges")
        isolated = np.flatnonzero((self.d_out == 0) & (self.d_in == 0))
        if isolated.size:
            raise GraphError(f"isolated node(s): {isolated[:5].tolist()}")
        for total in (self.d_out.sum(), self.d_in.sum()):
            if not math.isclose(total, self.vol, rel_tol=1e-9):
                raise GraphError(f"degree totals {total} inconsistent with volume {self.vol}")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(cls, n_nodes, edges, labels=None) -> "DirectedGraph":
        """Build from (src, dst, weight) triples over dense ids [0, n_nodes).

        Duplicate (src, dst) pairs are merged by summing weights; self-loops
        are kept. Raises GraphError on bad ids, nonpositive weights, or nodes
        left without any incident edge.
        """
        merged: dict = {}
        for u, v, w in edges:
            if not (0 <= u < n_nodes and 0 <= v < n_nodes):
                raise GraphError(f"edge ({u}, {v}) outside [0, {n_nodes})")
            if not (w > 0 and math.isfinite(w)):
                raise GraphError(f"edge ({u}, {v}) has nonpositive weight {w}")
            merged[(u, v)] = merged.get((u, v), 0.0) + float(w)
        if labels is None:
            labels = [str(i) for i in range(n_nodes)]
        if len(labels) != n_nodes:
            raise GraphError("label list length does not match node count")
        return cls(
            n_nodes,
            _build_csr(n_nodes, merged, by_source=True),
            _build_csr(n_nodes, merged, by_source=False),
            list(labels),
        )

    # -- adjacency ---------------------------------------------------------

    def out_neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.out_indptr[v], self.out_indptr[v + 1]
        return self.out_nbrs[lo:hi], self.out_wts[lo:hi]

    def in_neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.in_indptr[v], self.in_indptr[v + 1]
        return self.in_nbrs[lo:hi], self.in_wts[lo:hi]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edges as (srcs, dsts, weights) in deterministic CSR order."""
        srcs = np.repeat(np.arange(self.n_nodes), np.diff(self.out_indptr))
        return srcs, self.out_nbrs.copy(), self.out_wts.copy()

    def edge_set(self) -> frozenset:
        if self._edge_set is None:
            srcs, dsts, _ = self.edge_arrays()
            self._edge_set = frozenset(zip(srcs.tolist(), dsts.tolist()))
        return self._edge_set

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edge_set()

    # -- cached samplers ---------------------------------------------------

    def transition_alias(self, direction: str) -> tuple[np.ndarray, np.ndarray]:
        """Flattened per-node alias arrays for forward/backward steps."""
        if direction not in ("forward", "backward"):
            raise ValueError(f"direction must be forward or backward, got {direction!r}")
        key = ("transition", direction)
        if key not in self._alias_cache:
            if direction == "forward":
                self._alias_cache[key] = csr_alias_arrays(self.out_indptr, self.out_wts)
            else:
                self._alias_cache[key] = csr_alias_arrays(self.in_indptr, self.in_wts)
        return self._alias_cache[key]

    def start_table(self, role: str) -> AliasTable:
        """Alias table over the role's degree distribution (walk starts)."""
        key = ("start", role)
        if key not in self._alias_cache:
            self._alias_cache[key] = AliasTable.from_probs(degree_distribution(self, role).probs)
        return self._alias_cache[key]

    def noise_table(self, role: str) -> AliasTable:
        """Alias table over the role's negative-sampling noise distribution."""
        key = ("noise", role)
        if key not in self._alias_cache:
            self._alias_cache[key] = AliasTable.from_probs(noise_distribution(self, role).probs)
        return self._alias_cache[key]

    # -- checks ------------------------------------------------------------

    def validate(self) -> None:
        """Recheck the structural invariants (used by property tests)."""
        if not math.isclose(self.d_out.sum(), self.vol, rel_tol=1e-9):
            raise GraphError("sum of out-degrees differs from volume")
        if not math.isclose(self.d_in.sum(), self.vol, rel_tol=1e-9):
            raise GraphError("sum of in-degrees differs from volume")
        if not np.all(self.out_wts > 0) or not np.all(self.in_wts > 0):
            raise GraphError("nonpositive edge weight")
        srcs, dsts, wts = self.edge_arrays()
        fwd = sorted(zip(srcs.tolist(), dsts.tolist(), wts.tolist()))
        dsts_b = np.repeat(np.arange(self.n_nodes), np.diff(self.in_indptr))
        bwd = sorted(zip(self.in_nbrs.tolist(), dsts_b.tolist(), self.in_wts.tolist()))
        if fwd != bwd:
            raise GraphError("out/in adjacency encode different edge multisets")


def _build_csr(n_nodes: int, merged: dict, by_source: bool):
    if by_source:
        items = sorted(merged.items())
        keys = [u for (u, _), _ in items]
        vals = np.array([v for (_, v), _ in items], dtype=np.int64)
    else:
        items = sorted(merged.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        keys = [v for (_, v), _ in items]
        vals = np.array([u for (u, _), _ in items], dtype=np.int64)
    wts = np.array([w for _, w in items], dtype=np.float64)
    counts = np.bincount(np.array(keys, dtype=np.int64), minlength=n_nodes) if items else np.zeros(n_nodes, dtype=np.int64)
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, vals, wts


def load_edge_list(source, default_weight: float = 1.0) -> DirectedGraph:
    """Parse a whitespace-separated edge list into a DirectedGraph.

    Each non-comment line is ``src dst [weight]``; '#' starts a comment and
    blank lines are skipped. Duplicate (src, dst) lines have their weights
    summed; self-loops are kept. ``source`` may be a path, an open text file,
    or any iterable of lines.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_edge_list(fh, default_weight)
    if not (default_weight > 0 and math.isfinite(default_weight)):
        raise ValueError(f"default weight must be positive and finite, got {default_weight}")

    labels: list[str] = []
    ids: dict[str, int] = {}
    merged: dict[tuple[int, int], float] = {}

    def node_id(label: str) -> int:
        if label not in ids:
            ids[label] = len(labels)
            labels.append(label)
        return ids[label]

    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListError(f"expected 'src dst [weight]', got {line!r}", line_no)
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise EdgeListError(f"bad weight {parts[2]!r}", line_no) from None
            if not (w > 0 and math.isfinite(w)):
                raise EdgeListError(f"weight must be positive and finite, got {parts[2]}", line_no)
        else:
            w = default_weight
        key = (node_id(parts[0]), node_id(parts[1]))
        merged[key] = merged.get(key, 0.0) + w

    if not merged:
        raise EdgeListError("edge list contains no edges")
    n = len(labels)
    return DirectedGraph(
        n,
        _build_csr(n, merged, by_source=True),
        _build_csr(n, merged, by_source=False),
        labels,
    )


def write_edge_list(graph: DirectedGraph, path) -> None:
    """Write the graph back out in the edge-list format (CSR order)."""
    srcs, dsts, wts = graph.edge_arrays()
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, w in zip(srcs.tolist(), dsts.tolist(), wts.tolist()):
            fh.write(f"{graph.labels[u]} {graph.labels[v]} {w:.17g}\n")


def degree_distribution(graph: DirectedGraph, role: str) -> Distribution:
    """Degree distribution d(v)/vol for the given role (source uses d_out)."""
    _require_role(role)
    if role == "source":
        return Distribution(graph.d_out / graph.vol, "P_out")
    return Distribution(graph.d_in / graph.vol, "P_in")


def noise_distribution(graph: DirectedGraph, role: str) -> Distribution:
    """Negative-sampling distribution proportional to degree^(3/4)."""
    _require_role(role)
    deg = graph.d_out if role == "source" else graph.d_in
    powered = deg ** 0.75
    return Distribution(powered / powered.sum(), "noise_out" if role == "source" else "noise_in")


def save_id_map(graph: DirectedGraph, path) -> None:
    """Persist the label -> dense-id mapping, one 'label<TAB>id' per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, lab in enumerate(graph.labels):
            fh.write(f"{lab}\t{i}\n")


def load_id_map(path) -> dict[str, int]:
    mapping: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            try:
                lab, idx = line.split("\t")
                mapping[lab] = int(idx)
            except ValueError:
                raise EdgeListError(f"bad id-map line {line!r}", line_no) from None
    return mapping
