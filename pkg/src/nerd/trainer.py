"""SGNS training of paired source/target embeddings over alternating walks.

Each walk trains its input node W[0] against the opposite-role nodes at odd
offsets (and, in joint mode, the same-role nodes one step further), with
negative samples drawn from the role-matched degree^(3/4) noise
distribution. The input node's row accumulates its updates into an error
vector applied once per walk; neighbor and noise rows update eagerly.

Multi-threaded training is lock-free over the shared matrices: races may
drop coordinate updates and the result is only statistically reproducible.
Single-threaded training with a fixed seed is bit-reproducible per backend.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, replace

import numpy as np

from . import backend
from .alias import AliasTable
from .errors import EmbeddingFormatError
from .graph import DirectedGraph
from .walks import WalkSample, sample_alternating_walk

SIGMOID_BOUND = 6.0
SIGMOID_TABLE_SIZE = 1024
LR_FLOOR_FACTOR = 1e-4

_CHUNK_WALKS = 16384


def exact_sigmoid(x):
    """Numerically stable logistic function, no clamping."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def clamped_sigmoid(x: float) -> float:
    """Logistic of x clamped into [-6, 6], the trainer's saturation rule."""
    x = min(max(x, -SIGMOID_BOUND), SIGMOID_BOUND)
    return float(exact_sigmoid(x))


_SIGMOID_TABLE: np.ndarray | None = None


def sigmoid_table() -> np.ndarray:
    """Lookup table over [-6, 6]: table[i] = sigmoid((2i/size - 1) * 6)."""
    global _SIGMOID_TABLE
    if _SIGMOID_TABLE is None:
        grid = (2.0 * np.arange(SIGMOID_TABLE_SIZE) / SIGMOID_TABLE_SIZE - 1.0) * SIGMOID_BOUND
        _SIGMOID_TABLE = exact_sigmoid(grid)
    return _SIGMOID_TABLE


def table_sigmoid(x: float) -> float:
    table = sigmoid_table()
    idx = int((x + SIGMOID_BOUND) * (SIGMOID_TABLE_SIZE / (2.0 * SIGMOID_BOUND)))
    return float(table[min(max(idx, 0), SIGMOID_TABLE_SIZE - 1)])


@dataclass
class EmbeddingPair:
    """The two learned matrices: one row per node in each role."""

    phi_s: np.ndarray
    phi_t: np.ndarray

    def __post_init__(self):
        if self.phi_s.shape != self.phi_t.shape:
            raise ValueError(f"matrix shapes differ: {self.phi_s.shape} vs {self.phi_t.shape}")

    @property
    def n_nodes(self) -> int:
        return self.phi_s.shape[0]

    @property
    def d(self) -> int:
        return self.phi_s.shape[1]


@dataclass
class TrainConfig:
    """Hyperparameters for a training run.

    gamma is the total walk count; None resolves to 800 walks per node at
    train time. kappa=0 and gamma=0 are permitted so degenerate runs
    (pure-positive updates, init-only baselines) stay expressible.
    """

    d: int = 128
    n: int = 1
    kappa: int = 3
    gamma: int | None = None
    rho0: float = 0.025
    joint: bool = False
    threads: int = 1
    seed: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.gamma is not None and self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not self.rho0 > 0:
            raise ValueError(f"rho0 must be > 0, got {self.rho0}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


WALKS_PER_NODE_DEFAULT = 800


def learning_rate(t: int, total: int, rho0: float) -> float:
    """Linear decay rho0 * (1 - t/total), floored at rho0 * 1e-4."""
    if not 0 <= t <= total:
        raise ValueError(f"walk counter {t} outside [0, {total}]")
    return max(rho0 * (1.0 - t / total), rho0 * LR_FLOOR_FACTOR)


def sgns_update(u_vec: np.ndarray, v_vec: np.ndarray, label: int, lr: float, use_table: bool = True) -> np.ndarray:
    """One gradient step on a (u, v) pair; mutates v_vec, returns u's delta.

    g = (label - sigmoid(u.v)) * lr with the dot product clamped to [-6, 6];
    v_vec gains g * u_vec in place and the returned g * v_vec (pre-update
    values) is meant to be accumulated into u's error vector. use_table=False
    evaluates the exact sigmoid, which gradient checks need.
    """
    x = float(u_vec @ v_vec)
    sig = table_sigmoid(x) if use_table else clamped_sigmoid(x)
    g = (label - sig) * lr
    delta = g * v_vec
    v_vec += g * u_vec
    return delta


def init_embeddings(n_nodes: int, d: int, seed: int) -> EmbeddingPair:
    """Both matrices i.i.d. uniform in [-0.5/d, 0.5/d]."""
    rng = np.random.default_rng(seed)
    phi_s = (rng.random((n_nodes, d)) - 0.5) / d
    phi_t = (rng.random((n_nodes, d)) - 0.5) / d
    return EmbeddingPair(phi_s, phi_t)


def train_walk(
    walk: WalkSample,
    emb: EmbeddingPair,
    cfg: TrainConfig,
    lr: float,
    noise_tables: tuple[AliasTable, AliasTable],
    rng: np.random.Generator,
) -> None:
    """Train one walk (reference implementation mirrored by the numba kernel).

    noise_tables is (source-role table, target-role table). Negative draws
    that collide with the update's positive context are skipped, which keeps
    the positive signal intact on degenerate noise supports.
    """
    nodes = walk.nodes
    noise_s, noise_t = noise_tables
    if walk.kind == "source":
        phi_u, phi_opp, phi_same = emb.phi_s, emb.phi_t, emb.phi_s
        noise_opp, noise_same = noise_t, noise_s
    else:
        phi_u, phi_opp, phi_same = emb.phi_t, emb.phi_s, emb.phi_t
        noise_opp, noise_same = noise_s, noise_t

    u = int(nodes[0])
    u_row = phi_u[u]
    err = np.zeros(emb.d, dtype=np.float64)
    for i in range(1, 2 * walk.n_pairs, 2):
        pos1 = int(nodes[i])
        pos2 = int(nodes[i + 1])
        for j in range(cfg.kappa + 1):
            if j == 0:
                v1, label = pos1, 1
            else:
                v1, label = noise_opp.sample(rng), 0
            if j == 0 or v1 != pos1:
                err += sgns_update(u_row, phi_opp[v1], label, lr)
            if cfg.joint:
                v2 = pos2 if j == 0 else noise_same.sample(rng)
                if j == 0 or v2 != pos2:
                    err += sgns_update(u_row, phi_same[v2], label, lr)
    u_row += err


def train(graph: DirectedGraph, cfg: TrainConfig, progress: bool = False) -> EmbeddingPair:
    """Run the full training loop and return the learned embedding pair.

    Walks alternate kinds by a fair coin; walk t trains at learning rate
    learning_rate(t, gamma, rho0). With threads > 1 under the numba backend,
    workers share the matrices lock-free and worker w takes the walks
    congruent to w modulo the thread count (so the decay schedule is
    preserved without synchronization).
    """
    gamma = cfg.gamma if cfg.gamma is not None else WALKS_PER_NODE_DEFAULT * graph.n_nodes
    cfg = replace(cfg, gamma=gamma)
    emb = init_embeddings(graph.n_nodes, cfg.d, cfg.seed)
    if gamma == 0:
        return emb
    if backend.use_numba():
        _train_numba(graph, cfg, emb, progress)
    else:
        _train_numpy(graph, cfg, emb, progress)
    return emb


class _ProgressMeter:
    """Walk-completion percentage printed to stderr in 10% steps."""

    def __init__(self, total: int, enabled: bool):
        self.total = total
        self.enabled = enabled
        self.done = 0
        self.last_pct = -1
        self.lock = threading.Lock()

    def advance(self, k: int) -> None:
        if not self.enabled:
            return
        with self.lock:
            self.done += k
            pct = (100 * self.done) // self.total
            if pct >= self.last_pct + 10 or pct == 100:
                self.last_pct = pct - pct % 10 if pct < 100 else 100
                print(f"walks completed: {pct}%", file=sys.stderr)


def _train_numpy(graph, cfg, emb, progress):
    rng = np.random.default_rng([cfg.seed, 0x7EA1])
    noise_tables = (graph.noise_table("source"), graph.noise_table("target"))
    meter = _ProgressMeter(cfg.gamma, progress)
    for t in range(cfg.gamma):
        lr = learning_rate(t, cfg.gamma, cfg.rho0)
        kind = "source" if rng.random() > 0.5 else "target"
        walk = sample_alternating_walk(graph, kind, cfg.n, rng)
        train_walk(walk, emb, cfg, lr, noise_tables, rng)
        meter.advance(1)


def _train_numba(graph, cfg, emb, progress):
    from . import _kernels

    oap, oaa = graph.transition_alias("forward")
    iap, iaa = graph.transition_alias("backward")
    ps, pt = graph.start_table("source"), graph.start_table("target")
    ns, nt = graph.noise_table("source"), graph.noise_table("target")
    sig = sigmoid_table()
    meter = _ProgressMeter(cfg.gamma, progress)

    def worker(w: int) -> None:
        seed_w = _kernels.stream_seed(cfg.seed, w)
        counter = np.uint64(0)
        # worker w owns global walk indices w, w+T, w+2T, ...
        total_w = (cfg.gamma - w + cfg.threads - 1) // cfg.threads
        done = 0
        while done < total_w:
            k = min(_CHUNK_WALKS, total_w - done)
            counter = _kernels.train_walks(
                graph.out_indptr, graph.out_nbrs, oap, oaa,
                graph.in_indptr, graph.in_nbrs, iap, iaa,
                ps.prob, ps.alias, pt.prob, pt.alias,
                ns.prob, ns.alias, nt.prob, nt.alias,
                emb.phi_s, emb.phi_t, sig,
                cfg.n, cfg.kappa, cfg.joint,
                cfg.rho0, cfg.rho0 * LR_FLOOR_FACTOR, cfg.gamma,
                k, w + done * cfg.threads, cfg.threads,
                seed_w, counter,
            )
            done += k
            meter.advance(k)

    if cfg.threads == 1:
        worker(0)
        return
    threads = [threading.Thread(target=worker, args=(w,)) for w in range(cfg.threads)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()


def save_embeddings(emb: EmbeddingPair, labels: list[str], prefix) -> None:
    """Write <prefix>.src and <prefix>.tgt in word2vec text format.

    Header line 'N d', then one 'label v1 ... vd' row per node with six
    significant digits.
    """
    if len(labels) != emb.n_nodes:
        raise ValueError(f"{len(labels)} labels for {emb.n_nodes} embedding rows")
    for suffix, mat in ((".src", emb.phi_s), (".tgt", emb.phi_t)):
        with open(f"{prefix}{suffix}", "w", encoding="utf-8") as fh:
            fh.write(f"{emb.n_nodes} {emb.d}\n")
            for label, row in zip(labels, mat):
                fh.write(label + " " + " ".join(f"{x:.6g}" for x in row) + "\n")


def _read_embedding_file(path) -> tuple[list[str], np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError(f"{path}: header must be 'N d'")
        try:
            n, d = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError(f"{path}: non-integer header {header}") from None
        labels: list[str] = []
        mat = np.empty((n, d), dtype=np.float64)
        for row in range(n):
            parts = fh.readline().split()
            if len(parts) != d + 1:
                raise EmbeddingFormatError(f"{path}: row {row} has {len(parts)} fields, expected {d + 1}")
            labels.append(parts[0])
            try:
                mat[row] = [float(x) for x in parts[1:]]
            except ValueError:
                raise EmbeddingFormatError(f"{path}: row {row} has a non-numeric value") from None
        if fh.readline().strip():
            raise EmbeddingFormatError(f"{path}: trailing data after {n} rows")
    return labels, mat


def load_embeddings(prefix) -> tuple[EmbeddingPair, list[str]]:
    """Load a .src/.tgt pair written by save_embeddings."""
    labels_s, phi_s = _read_embedding_file(f"{prefix}.src")
    labels_t, phi_t = _read_embedding_file(f"{prefix}.tgt")
    if phi_s.shape != phi_t.shape:
        raise EmbeddingFormatError(
            f"dimension mismatch between {prefix}.src {phi_s.shape} and {prefix}.tgt {phi_t.shape}"
        )
    if labels_s != labels_t:
        raise EmbeddingFormatError(f"{prefix}.src and {prefix}.tgt list different node labels")
    return EmbeddingPair(phi_s, phi_t), labels_s
