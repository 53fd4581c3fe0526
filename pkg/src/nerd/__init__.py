"""Directed-graph node embeddings with separate source and target roles.

Nodes in a digraph act in two capacities: as origins of out-edges and as
destinations of in-edges. This package learns one vector per node per role by
running skip-gram negative sampling over alternating random walks, which hop
forward and backward along edges and therefore never get stuck on nodes
without out-edges. Dense analytic oracles and directed evaluation protocols
(link prediction with inverted negatives, bidirectional neighborhood
reconstruction, node classification) round out the toolkit.
"""

from .alias import AliasTable, alias_sample, build_alias_table
from .errors import (
    EdgeListError,
    EmbeddingFormatError,
    GraphError,
    NerdError,
    SizeLimitError,
    SplitError,
)
from .evaluation import (
    EvalSplit,
    LabelSet,
    ReconstructionConfig,
    align_embeddings,
    auc,
    classify_cv,
    edge_score,
    load_split,
    make_lp_split,
    read_labels,
    reconstruct,
    regenerate_negatives,
    save_split,
    score_pairs,
)
from .graph import (
    DirectedGraph,
    Distribution,
    degree_distribution,
    load_edge_list,
    load_id_map,
    noise_distribution,
    save_id_map,
    write_edge_list,
)
from .oracle import bipartite_adjacency, dense_limit, factorization_target, pair_distribution
from .trainer import (
    EmbeddingPair,
    TrainConfig,
    init_embeddings,
    learning_rate,
    load_embeddings,
    save_embeddings,
    sgns_update,
    train,
    train_walk,
)
from .walks import (
    WalkSample,
    count_opposite_role_pairs,
    sample_alternating_walk,
    sample_directed_walk,
    sample_walk_batch,
    walk_transition,
)

__version__ = "0.1.0"
