"""Query ambiguity prediction from the coherency of retrieved passages.

Retrieve passages for a query, predict which passages read as successors of
which, build a directed coherency network, and score the query's clarity by
the network's vertex connectivity. Ships unsupervised QPP baselines and a
ROC-AUC evaluation harness with bootstrap significance testing.
"""

__version__ = "0.1.0"

from .corpus import (
    Index,
    Passage,
    RankedList,
    bm25_score,
    build_index,
    corpus_score,
    load_index,
    load_passages,
    read_corpus_tsv,
    retrieve_top_k,
    save_index,
    tokenize,
)
from .datasets import LabeledQuery, binarize_clariq, load_ambignq, load_clariq
from .edges import (
    EdgeMatrix,
    ExternalScorerSession,
    HeuristicScorer,
    PairFileScorer,
    PairScoreCache,
    PairScoreSet,
    binarize_edges,
    export_pair_requests,
    heuristic_successor_score,
    pair_hash,
    score_pairs,
)
from .errors import DataError, ScorerError
from .evaluation import (
    EvalReport,
    bucket_report,
    paired_significance,
    roc_and_auc,
    roc_points,
    select_threshold,
    trapezoid_auc,
)
from .graph import (
    CoherencyNetwork,
    ConnectivityReport,
    average_node_connectivity,
    build_network,
    connectivity_report,
    export_dot,
    local_node_connectivity,
    node_connectivity,
)
from .pipeline import RetrievalCache, RunConfig, make_scorer, predict, sweep_k
from .qpp import QppInput, n_sigma_percent, nqc, smv, wig
from .runs import PredictionRun, load_run, save_run

__all__ = [
    "__version__",
    "Index",
    "Passage",
    "RankedList",
    "bm25_score",
    "build_index",
    "corpus_score",
    "load_index",
    "load_passages",
    "read_corpus_tsv",
    "retrieve_top_k",
    "save_index",
    "tokenize",
    "LabeledQuery",
    "binarize_clariq",
    "load_ambignq",
    "load_clariq",
    "EdgeMatrix",
    "ExternalScorerSession",
    "HeuristicScorer",
    "PairFileScorer",
    "PairScoreCache",
    "PairScoreSet",
    "binarize_edges",
    "export_pair_requests",
    "heuristic_successor_score",
    "pair_hash",
    "score_pairs",
    "DataError",
    "ScorerError",
    "EvalReport",
    "bucket_report",
    "paired_significance",
    "roc_and_auc",
    "roc_points",
    "select_threshold",
    "trapezoid_auc",
    "CoherencyNetwork",
    "ConnectivityReport",
    "average_node_connectivity",
    "build_network",
    "connectivity_report",
    "export_dot",
    "local_node_connectivity",
    "node_connectivity",
    "RetrievalCache",
    "RunConfig",
    "make_scorer",
    "predict",
    "sweep_k",
    "QppInput",
    "n_sigma_percent",
    "nqc",
    "smv",
    "wig",
    "PredictionRun",
    "load_run",
    "save_run",
]
