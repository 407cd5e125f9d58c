"""Per-query prediction pipeline: retrieval, edge scoring, graph metrics, QPP.

Ambiguity scores follow one convention: higher = more ambiguous. NC, ANC and
the QPP predictors are clarity/performance-positive signals, so all are
negated at the run boundary. Queries whose retrieval is too small to score
(fewer than 2 passages for graph methods, none for QPP) get +inf, the
maximum-ambiguity score; they are logged and recorded in provenance, never
dropped.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import qpp
from .corpus import Index, Passage, RankedList, corpus_score, retrieve_top_k, tokenize
from .datasets import LabeledQuery
from .edges import (
    DEFAULT_BATCH_TIMEOUT,
    DEFAULT_EDGE_THRESHOLD,
    ExternalScorerSession,
    HeuristicScorer,
    PairFileScorer,
    PairScoreCache,
    binarize_edges,
    score_pairs,
)
from .errors import DataError
from .graph import average_node_connectivity, build_network, node_connectivity
from .runs import PredictionRun

logger = logging.getLogger(__name__)

GRAPH_METHODS = ("nc", "anc")
QPP_METHODS = ("wig", "nqc", "smv", "nsigma")
METHODS = GRAPH_METHODS + QPP_METHODS

DEGENERATE_SCORE = math.inf
DEFAULT_K = 20


@dataclass
class RunConfig:
    """Validated pipeline configuration (the CLI merges file + flag values)."""

    index_dir: Path | None = None
    corpus: Path | None = None
    dataset: Path | None = None
    dataset_format: str = "clariq"
    split: str = "test"
    scorer: str = "heuristic"
    k: int = DEFAULT_K
    threshold: float = DEFAULT_EDGE_THRESHOLD
    x_percent: float = qpp.DEFAULT_SIGMA_PERCENT
    cache_dir: Path | None = None
    seed: int = 0
    out_dir: Path = Path("runs")
    workers: int = 1
    scorer_timeout: float = DEFAULT_BATCH_TIMEOUT
    k1: float = 0.9
    b: float = 0.4

    def validate(self) -> None:
        if self.k < 1:
            raise DataError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.threshold <= 1.0:
            raise DataError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.workers < 1:
            raise DataError(f"workers must be >= 1, got {self.workers}")
        for name in ("index_dir", "corpus", "dataset"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise DataError(f"{name} path does not exist: {path}")

    def snapshot(self) -> dict:
        """JSON-ready view of the config for manifests and provenance."""
        snap = {}
        for key, value in vars(self).items():
            snap[key] = str(value) if isinstance(value, Path) else value
        return snap


def make_scorer(spec: str, timeout: float = DEFAULT_BATCH_TIMEOUT):
    """Build a pair scorer from its config string.

    `heuristic`, `pairfile:<path>`, or `external:<command line>`.
    """
    if spec == "heuristic":
        return HeuristicScorer()
    if spec.startswith("pairfile:"):
        return PairFileScorer(spec[len("pairfile:"):])
    if spec.startswith("external:"):
        return ExternalScorerSession(spec[len("external:"):], timeout=timeout)
    raise DataError(
        f"unknown scorer spec {spec!r}; expected heuristic, pairfile:<path>, "
        f"or external:<command>"
    )


class RetrievalCache:
    """Ranked-list cache keyed by (index checksum + BM25 params, query, k)."""

    def __init__(self, cache_dir: str | Path):
        self.dir = Path(cache_dir) / "retrieval"
        self.dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, index: Index, query_text: str, k: int) -> Path:
        key = f"{index.corpus_checksum}|{index.k1!r}|{index.b!r}|{k}|{query_text}"
        return self.dir / (hashlib.sha256(key.encode("utf-8")).hexdigest() + ".json")

    def get(self, index: Index, query_text: str, k: int) -> RankedList | None:
        path = self._path(index, query_text, k)
        with self._lock:
            if not path.exists():
                return None
            entries = json.loads(path.read_text(encoding="utf-8"))
        return RankedList("", [(str(pid), float(s)) for pid, s in entries])

    def put(self, index: Index, query_text: str, k: int, ranked: RankedList) -> None:
        path = self._path(index, query_text, k)
        with self._lock:
            path.write_text(json.dumps(ranked.entries), encoding="utf-8")


def _retrieve(
    index: Index,
    query: LabeledQuery,
    k: int,
    retrieval_cache: RetrievalCache | None,
) -> RankedList:
    if retrieval_cache is not None:
        cached = retrieval_cache.get(index, query.text, k)
        if cached is not None:
            return RankedList(query.query_id, cached.entries)
    ranked = retrieve_top_k(index, query.text, k, query_id=query.query_id)
    if retrieval_cache is not None:
        retrieval_cache.put(index, query.text, k, ranked)
    return ranked


def _graph_score(
    method: str,
    ranked: RankedList,
    passages: dict[str, str],
    scorer,
    pair_cache: PairScoreCache | None,
    threshold: float,
) -> float | None:
    """Negated NC/ANC for one query, or None when retrieval is degenerate."""
    if len(ranked) < 2:
        return None
    retrieved = [Passage(pid, passages[pid]) for pid in ranked.pids()]
    pairs = score_pairs(retrieved, scorer, cache=pair_cache, query_id=ranked.query_id)
    network = build_network(binarize_edges(pairs, threshold))
    if method == "nc":
        return -float(node_connectivity(network))
    return -average_node_connectivity(network)


def _qpp_score(method: str, ranked: RankedList, index: Index, query: LabeledQuery,
               x_percent: float) -> float | None:
    if len(ranked) == 0:
        return None
    q_len = len(tokenize(query.text))
    inp = qpp.QppInput.from_ranked(ranked, corpus_score(index, query.text), q_len)
    if method == "wig":
        return -qpp.wig(inp)
    if method == "nqc":
        return -qpp.nqc(inp)
    if method == "smv":
        return -qpp.smv(inp)
    return -qpp.n_sigma_percent(inp, x_percent)


def predict(
    method: str,
    queries: Sequence[LabeledQuery],
    index: Index,
    passages: dict[str, str] | None,
    config: RunConfig,
    scorer=None,
    pair_cache: PairScoreCache | None = None,
    retrieval_cache: RetrievalCache | None = None,
) -> PredictionRun:
    """Score every query with one method; returns the run in input order."""
    if method not in METHODS:
        raise DataError(f"unknown method {method!r}; expected one of {METHODS}")
    if method in GRAPH_METHODS:
        if scorer is None:
            raise DataError(f"method {method!r} needs a successor scorer")
        if passages is None:
            raise DataError(f"method {method!r} needs passage texts")

    def one(query: LabeledQuery) -> float | None:
        ranked = _retrieve(index, query, config.k, retrieval_cache)
        if method in GRAPH_METHODS:
            return _graph_score(method, ranked, passages, scorer, pair_cache, config.threshold)
        return _qpp_score(method, ranked, index, query, config.x_percent)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            raw_scores = list(pool.map(one, queries))
    else:
        raw_scores = [one(q) for q in queries]

    scores: dict[str, float] = {}
    degenerate: list[str] = []
    for query, value in zip(queries, raw_scores):
        if value is None:
            degenerate.append(query.query_id)
            scores[query.query_id] = DEGENERATE_SCORE
        else:
            scores[query.query_id] = value
    if degenerate:
        logger.warning(
            "%d query(ies) had retrieval too small to score; assigned max ambiguity: %s",
            len(degenerate),
            degenerate,
        )

    provenance = {
        "method_id": method,
        "k_used": config.k,
        "config": config.snapshot(),
        "scorer_id": getattr(scorer, "scorer_id", None),
        "index_checksum": index.corpus_checksum,
        "degenerate_queries": degenerate,
    }
    return PredictionRun(method_id=method, scores=scores, k_used=config.k, provenance=provenance)


def sweep_k(
    method: str,
    queries: Sequence[LabeledQuery],
    labels: dict[str, bool],
    index: Index,
    passages: dict[str, str] | None,
    config: RunConfig,
    k_values: Sequence[int] = tuple(range(10, 101, 10)),
    scorer=None,
    pair_cache: PairScoreCache | None = None,
    retrieval_cache: RetrievalCache | None = None,
) -> tuple[dict[int, float], int]:
    """Dev AUC per retrieval depth k; returns (table, selected k).

    Retrieval happens once per query at max(k); smaller depths reuse its
    prefix, which is exact because top-k lists are prefixes of top-k' lists.
    Selection is argmax AUC with ties broken toward the smaller k.
    """
    from .evaluation import roc_and_auc  # local import to avoid a cycle

    if not k_values:
        raise DataError("k_values must be non-empty")
    k_values = sorted(set(k_values))
    k_max = k_values[-1]
    full: dict[str, RankedList] = {
        query.query_id: _retrieve(index, query, k_max, retrieval_cache) for query in queries
    }

    per_k: dict[int, float] = {}
    for k in k_values:
        scores: dict[str, float] = {}
        for query in queries:
            ranked = full[query.query_id].top(k)
            if method in GRAPH_METHODS:
                value = _graph_score(
                    method, ranked, passages, scorer, pair_cache, config.threshold
                )
            else:
                value = _qpp_score(method, ranked, index, query, config.x_percent)
            scores[query.query_id] = DEGENERATE_SCORE if value is None else value
        per_k[k] = roc_and_auc(scores, labels, method_id=f"{method}@k={k}").auc

    selected = min(per_k, key=lambda k: (-per_k[k], k))
    return per_k, selected
