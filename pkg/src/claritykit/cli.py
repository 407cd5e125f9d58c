"""Command-line entry point.

Subcommands: index, predict, evaluate, sweep, export-graph. A JSON config
file supplies defaults; flags override it. Every output directory gets a
manifest.json (config snapshot, input checksums, tool version) sufficient
to re-run identically. Exit codes: 0 success, 1 usage, 2 data error,
3 scorer/subprocess error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    Passage,
    build_index,
    load_index,
    load_passages,
    read_corpus_tsv,
    save_index,
)
from .datasets import LabeledQuery, binarize_clariq, load_ambignq, load_clariq
from .edges import PairScoreCache, binarize_edges, score_pairs
from .errors import DataError, ScorerError
from .evaluation import (
    bucket_label,
    bucket_report,
    paired_significance,
    roc_and_auc,
    save_report,
    select_threshold,
)
from .graph import CoherencyNetwork, build_network, export_dot
from .pipeline import (
    GRAPH_METHODS,
    METHODS,
    RetrievalCache,
    RunConfig,
    _retrieve,
    make_scorer,
    predict,
    sweep_k,
)
from .runs import load_run, save_run

ENV_CACHE_DIR = "CLARITY_CACHE_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, command: str, config: RunConfig, inputs: list[Path]) -> None:
    checksums = {}
    for path in inputs:
        path = Path(path)
        if path.is_dir():
            meta = path / "meta.json"
            if meta.exists():
                checksums[str(path)] = _sha256_file(meta)
        elif path.exists():
            checksums[str(path)] = _sha256_file(path)
    manifest = {
        "tool": "claritykit",
        "version": __version__,
        "command": command,
        "config": config.snapshot(),
        "inputs": checksums,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _load_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then flag overrides, then env-var cache default."""
    values: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise DataError(f"config file does not exist: {path}")
        try:
            values = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise DataError(f"{path}: invalid JSON config: {exc}") from exc
        if not isinstance(values, dict):
            raise DataError(f"{path}: config must be a JSON object")

    cfg = RunConfig()
    path_fields = {"index_dir", "corpus", "dataset", "cache_dir", "out_dir"}
    for name in vars(cfg):
        if name in values:
            value = values[name]
            setattr(cfg, name, Path(value) if name in path_fields and value else value)
    for name in vars(cfg):
        flag = getattr(args, name, None)
        if flag is not None:
            setattr(cfg, name, Path(flag) if name in path_fields else flag)
    if cfg.cache_dir is None and os.environ.get(ENV_CACHE_DIR):
        cfg.cache_dir = Path(os.environ[ENV_CACHE_DIR])
    if getattr(args, "out", None) is not None:
        cfg.out_dir = Path(args.out)
    cfg.validate()
    return cfg


def _load_queries(cfg: RunConfig) -> list[LabeledQuery]:
    if cfg.dataset is None:
        raise DataError("no dataset configured (set dataset in config or pass --dataset)")
    if cfg.dataset_format == "clariq":
        return load_clariq(cfg.dataset, split=cfg.split)
    if cfg.dataset_format == "ambignq":
        return load_ambignq(cfg.dataset, split=cfg.split)
    raise DataError(f"unknown dataset format {cfg.dataset_format!r}")


def _clariq_labels(queries: list[LabeledQuery]) -> dict[str, bool]:
    labels = {}
    for q in queries:
        if q.clarity_level is None:
            raise DataError(f"query {q.query_id!r} has no clarity level; need ClariQ-format data")
        labels[q.query_id] = binarize_clariq(q.clarity_level)
    return labels


def _open_caches(cfg: RunConfig) -> tuple[PairScoreCache | None, RetrievalCache | None]:
    if cfg.cache_dir is None:
        return None, None
    return PairScoreCache(cfg.cache_dir / "pairs"), RetrievalCache(cfg.cache_dir)


def cmd_index(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.corpus is None:
        raise DataError("no corpus configured (set corpus in config or pass --corpus)")
    passages = list(read_corpus_tsv(cfg.corpus))
    index = build_index(passages, k1=cfg.k1, b=cfg.b)
    save_index(index, cfg.out_dir, passages=passages)
    _write_manifest(cfg.out_dir, "index", cfg, [Path(cfg.corpus)])
    print(f"indexed {index.doc_count} passages into {cfg.out_dir}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.index_dir is None:
        raise DataError("no index_dir configured")
    index = load_index(cfg.index_dir)
    queries = _load_queries(cfg)
    method = args.method
    pair_cache, retrieval_cache = _open_caches(cfg)

    passages = None
    scorer = None
    try:
        if method in GRAPH_METHODS:
            passages = load_passages(cfg.index_dir)
            scorer = make_scorer(cfg.scorer, timeout=cfg.scorer_timeout)
        run = predict(
            method,
            queries,
            index,
            passages,
            cfg,
            scorer=scorer,
            pair_cache=pair_cache,
            retrieval_cache=retrieval_cache,
        )
    finally:
        if scorer is not None and hasattr(scorer, "close"):
            scorer.close()

    out_path = Path(cfg.out_dir) / f"{method}.tsv"
    save_run(run, out_path)
    _write_manifest(Path(cfg.out_dir), "predict", cfg, [Path(cfg.index_dir), Path(cfg.dataset)])
    print(f"wrote {out_path} ({len(run.scores)} queries)")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    queries = _load_queries(cfg)
    runs = [load_run(p) for p in args.runs]
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.bucket:
        if cfg.dataset_format != "ambignq":
            raise DataError("--bucket needs an ambignq-format dataset")
        buckets = {q.query_id: q.bucket for q in queries if q.bucket is not None}
        if args.threshold_value is not None:
            threshold = args.threshold_value
        elif args.dev_run and args.dev_dataset:
            dev_queries = load_clariq(args.dev_dataset, split="dev")
            dev_labels = _clariq_labels(dev_queries)
            dev_scores = load_run(args.dev_run).scores
            threshold = select_threshold(dev_scores, dev_labels)
        else:
            raise DataError("--bucket needs --threshold-value or --dev-run + --dev-dataset")
        payload = {}
        for run in runs:
            report = bucket_report(run.scores, buckets, threshold)
            payload[run.method_id] = {bucket_label(b): pct for b, pct in report.items()}
        result = {"threshold": threshold, "percent_ambiguous": payload}
        (out_dir / "buckets.json").write_text(
            json.dumps(result, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        _write_manifest(out_dir, "evaluate", cfg, [Path(cfg.dataset), *map(Path, args.runs)])
        print(f"wrote {out_dir / 'buckets.json'}")
        return 0

    if cfg.dataset_format != "clariq":
        raise DataError("ROC evaluation needs clariq-format labels (or use --bucket)")
    labels = _clariq_labels(queries)
    reports = {run.method_id: roc_and_auc(run.scores, labels, run.method_id) for run in runs}

    if args.significance and len(runs) > 1:
        for i, run_a in enumerate(runs):
            for run_b in runs[i + 1:]:
                p = paired_significance(
                    run_a.scores,
                    run_b.scores,
                    labels,
                    resamples=args.resamples,
                    seed=cfg.seed,
                )
                reports[run_a.method_id].p_values[run_b.method_id] = p
                reports[run_b.method_id].p_values[run_a.method_id] = p

    for report in reports.values():
        save_report(report, out_dir)
        print(f"{report.method_id}: AUC = {report.auc:.4f}")
    _write_manifest(out_dir, "evaluate", cfg, [Path(cfg.dataset), *map(Path, args.runs)])
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.index_dir is None:
        raise DataError("no index_dir configured")
    index = load_index(cfg.index_dir)
    queries = _load_queries(cfg)
    labels = _clariq_labels(queries)
    method = args.method
    k_values = [int(k) for k in args.ks.split(",")] if args.ks else list(range(10, 101, 10))
    pair_cache, retrieval_cache = _open_caches(cfg)

    passages = None
    scorer = None
    try:
        if method in GRAPH_METHODS:
            passages = load_passages(cfg.index_dir)
            scorer = make_scorer(cfg.scorer, timeout=cfg.scorer_timeout)
        per_k, selected = sweep_k(
            method,
            queries,
            labels,
            index,
            passages,
            cfg,
            k_values=k_values,
            scorer=scorer,
            pair_cache=pair_cache,
            retrieval_cache=retrieval_cache,
        )
    finally:
        if scorer is not None and hasattr(scorer, "close"):
            scorer.close()

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{method}.sweep.csv"
    lines = ["k,auc"] + [f"{k},{per_k[k]!r}" for k in sorted(per_k)]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out_dir / f"{method}.sweep.json").write_text(
        json.dumps(
            {"method": method, "selected_k": selected,
             "per_k": {str(k): v for k, v in sorted(per_k.items())}},
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    _write_manifest(out_dir, "sweep", cfg, [Path(cfg.index_dir), Path(cfg.dataset)])
    print(f"wrote {csv_path}; selected k = {selected}")
    return 0


def cmd_export_graph(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.index_dir is None:
        raise DataError("no index_dir configured")
    index = load_index(cfg.index_dir)
    queries = _load_queries(cfg)
    matches = [q for q in queries if q.query_id == args.query_id]
    if not matches:
        raise DataError(f"unknown query id {args.query_id!r}")
    query = matches[0]
    pair_cache, retrieval_cache = _open_caches(cfg)

    ranked = _retrieve(index, query, cfg.k, retrieval_cache)
    if len(ranked) < 2:
        network = CoherencyNetwork(nodes=ranked.pids(), edges=set())
    else:
        texts = load_passages(cfg.index_dir)
        retrieved = [Passage(pid, texts[pid]) for pid in ranked.pids()]
        scorer = make_scorer(cfg.scorer, timeout=cfg.scorer_timeout)
        try:
            pairs = score_pairs(retrieved, scorer, cache=pair_cache, query_id=query.query_id)
        finally:
            if hasattr(scorer, "close"):
                scorer.close()
        network = build_network(binarize_edges(pairs, cfg.threshold))

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dot_path = out_dir / f"{args.query_id}.dot"
    dot_path.write_text(export_dot(network), encoding="utf-8")
    _write_manifest(out_dir, "export-graph", cfg, [Path(cfg.index_dir), Path(cfg.dataset)])
    print(f"wrote {dot_path}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--corpus", help="corpus TSV (<pid>\\t<text>)")
    parser.add_argument("--index-dir", dest="index_dir", help="index directory")
    parser.add_argument("--dataset", help="dataset file (ClariQ TSV or AmbigNQ JSON)")
    parser.add_argument(
        "--dataset-format", dest="dataset_format", choices=["clariq", "ambignq"], default=None
    )
    parser.add_argument("--split", default=None, help="dataset split label (train|dev|test)")
    parser.add_argument("--k", type=int, default=None, help="retrieval depth")
    parser.add_argument("--threshold", type=float, default=None, help="edge threshold in [0,1]")
    parser.add_argument(
        "--scorer", default=None,
        help="successor scorer: heuristic | pairfile:<path> | external:<command>",
    )
    parser.add_argument("--cache-dir", dest="cache_dir", default=None,
                        help=f"cache directory (default ${ENV_CACHE_DIR})")
    parser.add_argument("--seed", type=int, default=None, help="random seed")
    parser.add_argument("--workers", type=int, default=None, help="per-query worker pool size")
    parser.add_argument("--out", default=None, help="output directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="claritykit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"claritykit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build and persist a BM25 index")
    _add_common(p_index)

    p_predict = sub.add_parser("predict", help="score queries with one method")
    _add_common(p_predict)
    p_predict.add_argument("--method", required=True, choices=list(METHODS))

    p_eval = sub.add_parser("evaluate", help="ROC/AUC, significance, bucket reports")
    _add_common(p_eval)
    p_eval.add_argument("--runs", nargs="+", required=True, help="run TSV files")
    p_eval.add_argument("--significance", action="store_true",
                        help="paired bootstrap p-values between runs")
    p_eval.add_argument("--resamples", type=int, default=10000)
    p_eval.add_argument("--bucket", action="store_true",
                        help="AmbigNQ bucket percentages instead of ROC")
    p_eval.add_argument("--threshold-value", dest="threshold_value", type=float, default=None,
                        help="fixed decision threshold for --bucket")
    p_eval.add_argument("--dev-run", dest="dev_run", help="dev run TSV for threshold selection")
    p_eval.add_argument("--dev-dataset", dest="dev_dataset",
                        help="ClariQ dev TSV for threshold selection")

    p_sweep = sub.add_parser("sweep", help="dev AUC per retrieval depth k")
    _add_common(p_sweep)
    p_sweep.add_argument("--method", required=True, choices=list(METHODS))
    p_sweep.add_argument("--ks", default=None, help="comma-separated k values (default 10..100)")

    p_export = sub.add_parser("export-graph", help="export one query's network as DOT")
    _add_common(p_export)
    p_export.add_argument("--query-id", dest="query_id", required=True)

    return parser


_COMMANDS = {
    "index": cmd_index,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "export-graph": cmd_export_graph,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ScorerError as exc:
        print(f"scorer error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
