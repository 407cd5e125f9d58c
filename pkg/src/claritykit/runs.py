"""Prediction run files: TSV scores plus a JSON provenance sidecar.

Run files are `query_id\\tscore` lines in dataset order; scores serialize
via repr() so reruns are byte-identical and values round-trip exactly
(including inf for degenerate queries). The sidecar `<stem>.provenance.json`
records the config snapshot that produced the run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError


@dataclass
class PredictionRun:
    """Per-query ambiguity scores for one method; higher = more ambiguous."""

    method_id: str
    scores: dict[str, float]
    k_used: int = 0
    provenance: dict = field(default_factory=dict)


def provenance_path(run_path: str | Path) -> Path:
    run_path = Path(run_path)
    return run_path.with_name(run_path.stem + ".provenance.json")


def save_run(run: PredictionRun, path: str | Path) -> Path:
    """Write the run TSV and its provenance sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for query_id, score in run.scores.items():
            fh.write(f"{query_id}\t{score!r}\n")
    sidecar = dict(run.provenance)
    sidecar.setdefault("method_id", run.method_id)
    sidecar.setdefault("k_used", run.k_used)
    provenance_path(path).write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return path


def load_run(path: str | Path) -> PredictionRun:
    """Read a run TSV; the provenance sidecar is optional (imported runs)."""
    path = Path(path)
    scores: dict[str, float] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected query_id\\tscore")
            query_id, raw = parts
            if query_id in scores:
                raise DataError(f"{path}:{lineno}: duplicate query id {query_id!r}")
            try:
                scores[query_id] = float(raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad score {raw!r}") from None
    if not scores:
        raise DataError(f"{path}: empty run file")

    method_id = path.stem
    k_used = 0
    provenance: dict = {}
    sidecar = provenance_path(path)
    if sidecar.exists():
        provenance = json.loads(sidecar.read_text(encoding="utf-8"))
        method_id = str(provenance.get("method_id", method_id))
        k_used = int(provenance.get("k_used", 0))
    return PredictionRun(method_id=method_id, scores=scores, k_used=k_used, provenance=provenance)
