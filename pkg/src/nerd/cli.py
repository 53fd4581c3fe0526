"""Command-line front end wiring the library into reproducible batch runs."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .errors import EdgeListError, EmbeddingFormatError, GraphError, SizeLimitError, SplitError
from .evaluation import (
    LabelSet,
    ReconstructionConfig,
    align_embeddings,
    auc,
    classify_cv,
    load_split,
    make_lp_split,
    read_labels,
    reconstruct,
    regenerate_negatives,
    save_split,
    score_pairs,
)
from .graph import load_edge_list, save_id_map
from .oracle import bipartite_adjacency, factorization_target, pair_distribution
from .trainer import TrainConfig, load_embeddings, save_embeddings, train
from .walks import sample_alternating_walk

PRESETS = {
    "lp": {"n": 1, "kappa": 3, "joint": False},
    "gr-nc": {"n": 10, "kappa": 5, "joint": True},
}

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_INVARIANT = 5
EXIT_SIZE = 6
EXIT_SPLIT = 7


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nerd",
        description="Directed-graph node embeddings with separate source/target roles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="learn embeddings from an edge list")
    p_train.add_argument("--input", required=True, help="edge-list file (src dst [weight])")
    p_train.add_argument("--out", required=True, help="output prefix for .src/.tgt/.ids files")
    p_train.add_argument("--dim", type=int, default=128, help="embedding dimension")
    p_train.add_argument("--walks-per-node", type=int, default=800, help="total walks = this * N")
    p_train.add_argument("--pairs", type=int, default=None, help="pairs sampled per walk (n)")
    p_train.add_argument("--negatives", type=int, default=None, help="negative samples per pair")
    p_train.add_argument("--joint", action=argparse.BooleanOptionalAction, default=None,
                         help="also train same-role co-occurrences")
    p_train.add_argument("--lr", type=float, default=0.025, help="initial learning rate")
    p_train.add_argument("--threads", type=int, default=1, help="lock-free worker threads")
    p_train.add_argument("--seed", type=int, default=1, help="RNG seed")
    p_train.add_argument("--preset", choices=sorted(PRESETS), default=None,
                         help="task preset: lp (n=1,k=3) or gr-nc (n=10,k=5,joint)")

    p_split = sub.add_parser("split", help="make a train/test edge split for link prediction")
    p_split.add_argument("--input", required=True)
    p_split.add_argument("--out", required=True, help="prefix for .train/.test.pos/.test.neg")
    p_split.add_argument("--test-frac", type=float, default=0.3, help="fraction of edges held out")
    p_split.add_argument("--invert", type=float, default=0.0,
                         help="fraction of positives whose reversal becomes a negative")
    p_split.add_argument("--seed", type=int, default=1)

    p_lp = sub.add_parser("eval-lp", help="score a split with trained embeddings (ROC-AUC)")
    p_lp.add_argument("--emb", required=True, help="embedding prefix (.src/.tgt)")
    p_lp.add_argument("--split", required=True, help="split prefix from the split subcommand")
    p_lp.add_argument("--invert", type=float, default=None,
                      help="regenerate negatives at this inversion fraction instead of using .test.neg")
    p_lp.add_argument("--seed", type=int, default=1, help="seed for regenerated negatives")

    p_gr = sub.add_parser("eval-gr", help="graph reconstruction: harmonic neighborhood precision")
    p_gr.add_argument("--emb", required=True)
    p_gr.add_argument("--input", required=True, help="edge list the embeddings were trained on")
    p_gr.add_argument("--ks", default="1,2,5,10,100,200", help="comma-separated k values")
    p_gr.add_argument("--sample-frac", type=float, default=1.0, help="fraction of nodes to test")
    p_gr.add_argument("--seed", type=int, default=1)

    p_nc = sub.add_parser("eval-nc", help="node classification via one-vs-rest logistic regression")
    p_nc.add_argument("--emb", required=True)
    p_nc.add_argument("--labels", required=True, help="labels file: 'node label' per line")
    p_nc.add_argument("--folds", type=int, default=5)
    p_nc.add_argument("--concat-dim", type=int, default=64, help="coordinates used per role")
    p_nc.add_argument("--seed", type=int, default=1)

    p_or = sub.add_parser("oracle", help="print a dense analytic reference matrix as TSV")
    p_or.add_argument("--input", required=True)
    mode = p_or.add_mutually_exclusive_group(required=True)
    mode.add_argument("--bipartite", action="store_true", help="2N x 2N bipartite lift adjacency")
    mode.add_argument("--pair-dist", action="store_true", help="expected pair counts per walk")
    mode.add_argument("--target", action="store_true", help="log factorization target")
    p_or.add_argument("--n", type=int, default=1, help="pairs per walk")
    p_or.add_argument("--kappa", type=int, default=1, help="negative samples (target matrix only)")

    p_wd = sub.add_parser("walks-dump", help="dump sampled walks as text (debug aid)")
    p_wd.add_argument("--input", required=True)
    p_wd.add_argument("--count", type=int, default=10)
    p_wd.add_argument("--pairs", type=int, default=1)
    p_wd.add_argument("--kind", choices=["mixed", "source", "target"], default="mixed")
    p_wd.add_argument("--seed", type=int, default=1)

    return parser


def _cmd_train(args) -> int:
    graph = load_edge_list(args.input)
    preset = PRESETS.get(args.preset, {})
    cfg = TrainConfig(
        d=args.dim,
        n=args.pairs if args.pairs is not None else preset.get("n", 1),
        kappa=args.negatives if args.negatives is not None else preset.get("kappa", 3),
        gamma=args.walks_per_node * graph.n_nodes,
        rho0=args.lr,
        joint=args.joint if args.joint is not None else preset.get("joint", False),
        threads=args.threads,
        seed=args.seed,
    )
    emb = train(graph, cfg, progress=True)
    save_embeddings(emb, graph.labels, args.out)
    save_id_map(graph, f"{args.out}.ids")
    return EXIT_OK


def _cmd_split(args) -> int:
    graph = load_edge_list(args.input)
    split = make_lp_split(graph, args.test_frac, args.invert, args.seed)
    save_split(split, args.out)
    return EXIT_OK


def _cmd_eval_lp(args) -> int:
    emb, labels = load_embeddings(args.emb)
    train_graph, pos, neg = load_split(args.split)
    emb = align_embeddings(emb, labels, train_graph)
    if args.invert is not None:
        neg = regenerate_negatives(train_graph, pos, args.invert, args.seed)
    value = auc(score_pairs(emb, pos), score_pairs(emb, neg))
    print(f"auc\t{value:.6f}")
    return EXIT_OK


def _cmd_eval_gr(args) -> int:
    emb, labels = load_embeddings(args.emb)
    graph = load_edge_list(args.input)
    emb = align_embeddings(emb, labels, graph)
    ks = tuple(int(k) for k in args.ks.split(","))
    cfg = ReconstructionConfig(k_values=ks, sample_fraction=args.sample_frac)
    rng = np.random.default_rng([args.seed, 0x46])
    n_test = max(1, math.ceil(cfg.sample_fraction * graph.n_nodes))
    test_nodes = np.sort(rng.choice(graph.n_nodes, size=n_test, replace=False))
    scores = reconstruct(emb, graph, test_nodes, cfg)
    for k in ks:
        print(f"hm@{k}\t{scores[k]:.6f}")
    return EXIT_OK


def _cmd_eval_nc(args) -> int:
    emb, labels = load_embeddings(args.emb)
    node_ids = {lab: i for i, lab in enumerate(labels)}
    label_set: LabelSet = read_labels(args.labels, node_ids, emb.n_nodes)
    micro, macro = classify_cv(emb, label_set, folds=args.folds, concat_dim=args.concat_dim, seed=args.seed)
    print(f"micro_f1\t{micro:.6f}")
    print(f"macro_f1\t{macro:.6f}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    graph = load_edge_list(args.input)
    if args.bipartite:
        matrix = bipartite_adjacency(graph)
    elif args.pair_dist:
        matrix = pair_distribution(graph, args.n)
    else:
        matrix = factorization_target(graph, args.n, args.kappa)
    for row in matrix:
        print("\t".join(f"{x:.10g}" for x in row))
    return EXIT_OK


def _cmd_walks_dump(args) -> int:
    graph = load_edge_list(args.input)
    rng = np.random.default_rng(args.seed)
    for _ in range(args.count):
        if args.kind == "mixed":
            kind = "source" if rng.random() > 0.5 else "target"
        else:
            kind = args.kind
        walk = sample_alternating_walk(graph, kind, args.pairs, rng)
        names = " ".join(graph.labels[v] for v in walk.nodes.tolist())
        print(f"{walk.kind}: {names}")
    return EXIT_OK


_COMMANDS = {
    "train": _cmd_train,
    "split": _cmd_split,
    "eval-lp": _cmd_eval_lp,
    "eval-gr": _cmd_eval_gr,
    "eval-nc": _cmd_eval_nc,
    "oracle": _cmd_oracle,
    "walks-dump": _cmd_walks_dump,
}


def run(argv=None) -> int:
    """Parse argv, dispatch, and map module errors to distinct exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on usage errors and --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (EdgeListError, EmbeddingFormatError) as exc:
        print(f"nerd: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except SizeLimitError as exc:
        print(f"nerd: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except SplitError as exc:
        print(f"nerd: {exc}", file=sys.stderr)
        return EXIT_SPLIT
    except (GraphError, ValueError) as exc:
        print(f"nerd: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"nerd: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
