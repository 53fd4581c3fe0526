"""Directed evaluation protocols: link prediction, reconstruction, classification.

Link prediction scores sigma(phi_s(i) . phi_t(j)) on held-out edges against
negatives that are either random non-edges or reversals of the positives (the
directed setting, which forces the model to predict edge direction).
Reconstruction retrieves each test node's nearest predicted out- and
in-neighbors and combines the two precisions by harmonic mean. Classification
runs 5-fold one-vs-rest logistic regression on normalized, concatenated
source/target features.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmbeddingFormatError, SplitError
from .graph import DirectedGraph
from .trainer import EmbeddingPair, exact_sigmoid

logger = logging.getLogger(__name__)

_MAX_REJECTS_PER_NEGATIVE = 100


def edge_score(emb: EmbeddingPair, i: int, j: int) -> float:
    """Predicted probability of edge (i, j): sigma of the role inner product."""
    return float(exact_sigmoid(float(emb.phi_s[i] @ emb.phi_t[j])))


def align_embeddings(emb: EmbeddingPair, emb_labels: list[str], graph: DirectedGraph) -> EmbeddingPair:
    """Reorder embedding rows to a graph's dense ids, matching by label.

    Loaders assign dense ids in first-seen order, so a graph written back out
    and reloaded may permute ids relative to the embeddings trained on it.
    """
    if sorted(emb_labels) != sorted(graph.labels):
        raise EmbeddingFormatError("embedding and graph node labels differ")
    rows = {lab: i for i, lab in enumerate(emb_labels)}
    perm = np.array([rows[lab] for lab in graph.labels], dtype=np.int64)
    return EmbeddingPair(emb.phi_s[perm], emb.phi_t[perm])


def score_pairs(emb: EmbeddingPair, pairs: np.ndarray) -> np.ndarray:
    """Vectorized edge_score over an (m, 2) array of (src, dst) pairs."""
    pairs = np.asarray(pairs, dtype=np.int64)
    dots = np.einsum("ij,ij->i", emb.phi_s[pairs[:, 0]], emb.phi_t[pairs[:, 1]])
    return exact_sigmoid(dots)


def auc(pos_scores, neg_scores) -> float:
    """Rank-based (Mann-Whitney) AUC with ties counted as half wins."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("auc needs non-empty positive and negative score lists")
    combined = np.concatenate([pos, neg])
    _, inverse, counts = np.unique(combined, return_inverse=True, return_counts=True)
    upper = np.cumsum(counts)
    mean_ranks = (upper - counts + 1 + upper) / 2.0
    pos_rank_sum = mean_ranks[inverse[: pos.size]].sum()
    wins = pos_rank_sum - pos.size * (pos.size + 1) / 2.0
    return float(wins / (pos.size * neg.size))


# -- link-prediction splits --------------------------------------------------


@dataclass
class EvalSplit:
    """Residual training graph plus balanced positive/negative test edges."""

    train_graph: DirectedGraph
    pos_edges: np.ndarray
    neg_edges: np.ndarray
    invert_fraction: float
    seed: int


def _sample_negatives(
    n_nodes: int,
    edge_set: frozenset,
    pos_edges: list[tuple[int, int]],
    invert_fraction: float,
    rng: np.random.Generator,
) -> list[tuple[int, int]]:
    """Balanced negatives: reversals of the leading invert_fraction of the
    positives where the reversal is a genuine non-edge, random non-edge pairs
    otherwise."""
    n_pos = len(pos_edges)
    n_invert = int(round(invert_fraction * n_pos))
    negatives: list[tuple[int, int]] = []
    taken: set[tuple[int, int]] = set()
    pending = 0
    for u, v in pos_edges[:n_invert]:
        rev = (v, u)
        if rev not in edge_set and rev not in taken and u != v:
            negatives.append(rev)
            taken.add(rev)
        else:
            pending += 1  # reversal exists (or collides): substitute randomly
    pending += n_pos - n_invert

    attempts_left = _MAX_REJECTS_PER_NEGATIVE * n_pos
    while pending > 0:
        if attempts_left <= 0:
            raise SplitError("could not find enough non-edge pairs for negatives")
        a, b = rng.integers(0, n_nodes, size=2)
        attempts_left -= 1
        cand = (int(a), int(b))
        if cand[0] == cand[1] or cand in edge_set or cand in taken:
            continue
        negatives.append(cand)
        taken.add(cand)
        pending -= 1
    return negatives


def make_lp_split(
    graph: DirectedGraph, test_fraction: float, invert_fraction: float, seed: int
) -> EvalSplit:
    """Hold out a fraction of edges for directed link prediction.

    Removals that would isolate a node are rejected, so every node keeps at
    least one incident edge in the training graph and the dense ids stay
    aligned with the original graph.
    """
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if not 0 <= invert_fraction <= 1:
        raise ValueError(f"invert_fraction must be in [0, 1], got {invert_fraction}")
    rng = np.random.default_rng([seed, 0x51D])
    srcs, dsts, wts = graph.edge_arrays()
    n_test = int(round(test_fraction * graph.n_edges))
    if n_test < 1:
        raise SplitError(f"test fraction {test_fraction} selects no edges")

    # incident-edge counts; a self-loop contributes twice to its node
    incident = np.zeros(graph.n_nodes, dtype=np.int64)
    np.add.at(incident, srcs, 1)
    np.add.at(incident, dsts, 1)

    order = rng.permutation(graph.n_edges)
    removed = np.zeros(graph.n_edges, dtype=bool)
    positives: list[tuple[int, int]] = []
    for e in order:
        if len(positives) == n_test:
            break
        u, v = int(srcs[e]), int(dsts[e])
        if u == v:
            if incident[u] <= 2:
                continue
            incident[u] -= 2
        else:
            if incident[u] <= 1 or incident[v] <= 1:
                continue
            incident[u] -= 1
            incident[v] -= 1
        removed[e] = True
        positives.append((u, v))
    if len(positives) < n_test:
        raise SplitError(f"only {len(positives)} of {n_test} edges removable without isolating a node")

    keep = ~removed
    train_graph = DirectedGraph.from_edges(
        graph.n_nodes,
        zip(srcs[keep].tolist(), dsts[keep].tolist(), wts[keep].tolist()),
        labels=graph.labels,
    )
    negatives = _sample_negatives(graph.n_nodes, graph.edge_set(), positives, invert_fraction, rng)
    return EvalSplit(
        train_graph,
        np.array(positives, dtype=np.int64),
        np.array(negatives, dtype=np.int64),
        invert_fraction,
        seed,
    )


def regenerate_negatives(split_graph: DirectedGraph, pos_edges: np.ndarray, invert_fraction: float, seed: int) -> np.ndarray:
    """Rebuild the negative edges of a loaded split at a new inversion fraction.

    The original edge set is the training edges plus the positives, so one
    saved split can be scored at any inversion level.
    """
    edge_set = frozenset(split_graph.edge_set() | {(int(u), int(v)) for u, v in pos_edges})
    rng = np.random.default_rng([seed, 0x51D, 1])
    negs = _sample_negatives(
        split_graph.n_nodes, edge_set, [(int(u), int(v)) for u, v in pos_edges], invert_fraction, rng
    )
    return np.array(negs, dtype=np.int64)


def save_split(split: EvalSplit, prefix) -> None:
    """Write <prefix>.train (edge list) and <prefix>.test.pos/.test.neg."""
    from .graph import write_edge_list

    write_edge_list(split.train_graph, f"{prefix}.train")
    labels = split.train_graph.labels
    for suffix, edges in ((".test.pos", split.pos_edges), (".test.neg", split.neg_edges)):
        with open(f"{prefix}{suffix}", "w", encoding="utf-8") as fh:
            for u, v in edges.tolist():
                fh.write(f"{labels[u]} {labels[v]}\n")


def load_split(prefix) -> tuple[DirectedGraph, np.ndarray, np.ndarray]:
    """Load split files; test pairs come back as dense ids of the train graph."""
    from .graph import load_edge_list

    train_graph = load_edge_list(f"{prefix}.train")

    def read_pairs(path):
        pairs = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                pairs.append((train_graph.label_ids[parts[0]], train_graph.label_ids[parts[1]]))
        return np.array(pairs, dtype=np.int64).reshape(-1, 2)

    return train_graph, read_pairs(f"{prefix}.test.pos"), read_pairs(f"{prefix}.test.neg")


# -- graph reconstruction -----------------------------------------------------


@dataclass
class ReconstructionConfig:
    k_values: tuple[int, ...] = (1, 2, 5, 10, 100, 200)
    sample_fraction: float = 1.0
    epsilon: float = 1e-5
    zero_degree_sigmoid_threshold: float = 0.51

    def __post_init__(self):
        if any(k < 1 for k in self.k_values):
            raise ValueError(f"k values must be >= 1, got {self.k_values}")
        if not 0 < self.sample_fraction <= 1:
            raise ValueError(f"sample_fraction must be in (0, 1], got {self.sample_fraction}")


def top_k_by_score(dots: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties broken by ascending id."""
    order = np.lexsort((np.arange(dots.shape[0]), -dots))
    return order[:k]


def reconstruct(
    emb: EmbeddingPair, graph: DirectedGraph, test_nodes, cfg: ReconstructionConfig
) -> dict[int, float]:
    """Mean harmonic neighborhood precision per k over the test nodes.

    For each node the k nearest predicted out- and in-neighbors (query node
    excluded) are intersected with the true neighbor sets; a node with no
    edges in a direction scores 1 there exactly when its best candidate stays
    below the indifference threshold.
    """
    test_nodes = np.asarray(test_nodes, dtype=np.int64)
    if test_nodes.size == 0:
        raise ValueError("test_nodes is empty")
    for k in cfg.k_values:
        if k >= graph.n_nodes:
            raise ValueError(f"k={k} must be < node count {graph.n_nodes}")

    totals = {k: 0.0 for k in cfg.k_values}
    for v in test_nodes.tolist():
        out_dots = emb.phi_s[v] @ emb.phi_t.T
        in_dots = emb.phi_s @ emb.phi_t[v]
        out_dots[v] = -np.inf
        in_dots[v] = -np.inf
        out_true = graph.out_neighbors(v)[0]
        in_true = graph.in_neighbors(v)[0]
        out_order = top_k_by_score(out_dots, max(cfg.k_values))
        in_order = top_k_by_score(in_dots, max(cfg.k_values))

        for k in cfg.k_values:
            if out_true.size == 0:
                top_score = exact_sigmoid(float(out_dots[out_order[0]]))
                p_out = 1.0 if top_score < cfg.zero_degree_sigmoid_threshold else 0.0
            else:
                p_out = float(np.isin(out_order[:k], out_true).sum()) / k
            if in_true.size == 0:
                top_score = exact_sigmoid(float(in_dots[in_order[0]]))
                p_in = 1.0 if top_score < cfg.zero_degree_sigmoid_threshold else 0.0
            else:
                p_in = float(np.isin(in_order[:k], in_true).sum()) / k
            a, b = p_in + cfg.epsilon, p_out + cfg.epsilon
            totals[k] += 2.0 * a * b / (a + b)
    return {k: totals[k] / test_nodes.size for k in cfg.k_values}


# -- node classification -------------------------------------------------------


@dataclass
class LabelSet:
    """Per-node label-id sets over dense node ids."""

    labels: dict[int, set[int]]
    num_labels: int

    label_names: list[str] = field(default_factory=list)


def read_labels(path, node_ids: dict[str, int], n_nodes: int) -> LabelSet:
    """Parse 'node<ws>label' lines (node repeated for multi-label)."""
    per_node: dict[int, set[int]] = {}
    name_ids: dict[str, int] = {}
    names: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"labels file line {line_no}: expected 'node label', got {line!r}")
            node_label, lab = parts
            if node_label not in node_ids:
                raise ValueError(f"labels file line {line_no}: unknown node {node_label!r}")
            node = node_ids[node_label]
            if node >= n_nodes:
                raise ValueError(f"labels file line {line_no}: node id {node} out of range")
            if lab not in name_ids:
                name_ids[lab] = len(names)
                names.append(lab)
            per_node.setdefault(node, set()).add(name_ids[lab])
    if not per_node:
        raise ValueError("labels file assigns no labels")
    return LabelSet(per_node, len(names), names)


def _normalized_features(emb: EmbeddingPair, concat_dim: int) -> np.ndarray:
    if emb.d < concat_dim:
        raise ValueError(f"embeddings have d={emb.d} < concat_dim={concat_dim}")
    parts = []
    for mat in (emb.phi_s, emb.phi_t):
        block = mat[:, :concat_dim]
        norms = np.linalg.norm(block, axis=1, keepdims=True)
        parts.append(block / np.maximum(norms, 1e-12))
    return np.hstack(parts)


def _fit_logreg(x: np.ndarray, y: np.ndarray, l2: float = 1e-4, epochs: int = 200, step: float = 0.1):
    """Full-batch gradient descent on L2-regularized logistic loss."""
    m, dim = x.shape
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    for _ in range(epochs):
        p = exact_sigmoid(x @ w + b)
        residual = p - y
        w -= step * (x.T @ residual / m + l2 * w)
        b -= step * float(residual.mean())
    return w, b


def classify_cv(
    emb: EmbeddingPair,
    labels: LabelSet,
    folds: int = 5,
    concat_dim: int = 64,
    seed: int = 0,
) -> tuple[float, float]:
    """Cross-validated one-vs-rest classification; returns (micro-F1, macro-F1).

    Features are the L2-normalized first concat_dim coordinates of each role,
    concatenated. A node with m true labels is predicted its top-m scoring
    labels. Labels that appear in a test fold without any training positives
    score 0 for that fold.
    """
    features = _normalized_features(emb, concat_dim)
    nodes = np.array(sorted(labels.labels.keys()), dtype=np.int64)
    if nodes.size < folds:
        raise ValueError(f"{nodes.size} labeled nodes cannot fill {folds} folds")
    rng = np.random.default_rng([seed, 0xC1A55])
    nodes = nodes[rng.permutation(nodes.size)]
    fold_slices = np.array_split(nodes, folds)

    y_all = np.zeros((features.shape[0], labels.num_labels), dtype=np.float64)
    for node, labs in labels.labels.items():
        for lab in labs:
            y_all[node, lab] = 1.0

    micro_scores, macro_scores = [], []
    for fold in range(folds):
        test_nodes = fold_slices[fold]
        train_nodes = np.concatenate([fold_slices[i] for i in range(folds) if i != fold])
        x_train, x_test = features[train_nodes], features[test_nodes]

        scores = np.full((test_nodes.size, labels.num_labels), -np.inf)
        for lab in range(labels.num_labels):
            y = y_all[train_nodes, lab]
            if not np.any(y > 0):
                if np.any(y_all[test_nodes, lab] > 0):
                    logger.info("fold %d: label %d has no training positives; scored 0", fold, lab)
                continue
            w, b = _fit_logreg(x_train, y)
            scores[:, lab] = x_test @ w + b

        tp = np.zeros(labels.num_labels)
        fp = np.zeros(labels.num_labels)
        fn = np.zeros(labels.num_labels)
        for row, node in enumerate(test_nodes.tolist()):
            true = labels.labels[node]
            m = len(true)
            predicted = set(np.lexsort((np.arange(labels.num_labels), -scores[row]))[:m].tolist())
            for lab in predicted & true:
                tp[lab] += 1
            for lab in predicted - true:
                fp[lab] += 1
            for lab in true - predicted:
                fn[lab] += 1

        micro_den = 2 * tp.sum() + fp.sum() + fn.sum()
        micro_scores.append(2 * tp.sum() / micro_den if micro_den > 0 else 0.0)
        present = [lab for lab in range(labels.num_labels) if tp[lab] + fn[lab] > 0]
        f1 = []
        for lab in present:
            den = 2 * tp[lab] + fp[lab] + fn[lab]
            f1.append(2 * tp[lab] / den if den > 0 else 0.0)
        macro_scores.append(float(np.mean(f1)) if f1 else 0.0)

    return float(np.mean(micro_scores)), float(np.mean(macro_scores))
