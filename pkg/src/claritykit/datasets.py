"""Loaders for clarification-need datasets.

ClariQ-style TSVs carry a 1..4 clarification-need level per query; levels
1 and 2 mean no clarification, 3 and 4 mean a clarifying question is
warranted. AmbigNQ-style JSON carries question-answer-pair annotations
whose count serves as an ambiguity bucket (grouped 1, 2, 3, 4+).
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError

logger = logging.getLogger(__name__)

CLARIQ_COLUMNS = ("topic_id", "initial_request", "clarification_need")


@dataclass(frozen=True)
class LabeledQuery:
    """A query with exactly one of clarity_level (ClariQ) or bucket (AmbigNQ)."""

    query_id: str
    text: str
    clarity_level: int | None = None
    bucket: int | None = None
    split: str = "test"


def load_clariq(path: str | Path, split: str = "test") -> list[LabeledQuery]:
    """Load a ClariQ-format TSV: header with topic_id, initial_request,
    clarification_need; one query per row, level in 1..4."""
    path = Path(path)
    queries = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        missing = [c for c in CLARIQ_COLUMNS if c not in header]
        if missing:
            raise DataError(f"{path}: missing column(s) {missing}")
        cols = {c: header.index(c) for c in CLARIQ_COLUMNS}
        for rowno, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) <= max(cols.values()):
                raise DataError(f"{path}: row {rowno}: expected {len(header)} columns")
            raw_level = row[cols["clarification_need"]].strip()
            try:
                level = int(raw_level)
            except ValueError:
                raise DataError(
                    f"{path}: row {rowno}: clarification_need {raw_level!r} is not an integer"
                ) from None
            if level not in (1, 2, 3, 4):
                raise DataError(f"{path}: row {rowno}: clarification_need {level} outside 1..4")
            queries.append(
                LabeledQuery(
                    query_id=row[cols["topic_id"]].strip(),
                    text=row[cols["initial_request"]].strip(),
                    clarity_level=level,
                    split=split,
                )
            )
    return queries


def binarize_clariq(level: int) -> bool:
    """True iff the query needs clarification: levels 3 and 4.

    Levels 1 and 2 are the clearest queries and need none.
    """
    if level not in (1, 2, 3, 4):
        raise DataError(f"clarity level {level} outside 1..4")
    return level >= 3


def _annotation_qa_pairs(annotation: dict, where: str) -> int:
    kind = annotation.get("type")
    if kind == "singleAnswer":
        return 1
    if kind == "multipleQAs":
        pairs = annotation.get("qaPairs")
        if not isinstance(pairs, list) or not pairs:
            raise DataError(f"{where}: multipleQAs annotation without qaPairs")
        return len(pairs)
    raise DataError(f"{where}: unknown annotation type {kind!r}")


def load_ambignq(path: str | Path, split: str = "dev") -> list[LabeledQuery]:
    """Load an AmbigNQ-format JSON array of {id, question, annotations}.

    bucket = question-answer-pair count: 1 for a single-answer annotation,
    the qaPairs count for a multiple-QA one; multiple annotations aggregate
    by maximum. Records with zero annotations are skipped (warning with a
    count), not errors.
    """
    path = Path(path)
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(records, list):
        raise DataError(f"{path}: expected a JSON array of records")

    queries = []
    skipped = 0
    for i, rec in enumerate(records):
        where = f"{path}: record {i}"
        if not isinstance(rec, dict) or "question" not in rec:
            raise DataError(f"{where}: expected an object with a question")
        annotations = rec.get("annotations") or []
        if not annotations:
            skipped += 1
            continue
        bucket = max(_annotation_qa_pairs(a, where) for a in annotations)
        queries.append(
            LabeledQuery(
                query_id=str(rec.get("id", i)),
                text=str(rec["question"]),
                bucket=bucket,
                split=split,
            )
        )
    if skipped:
        logger.warning("%s: skipped %d record(s) with zero annotations", path, skipped)
    return queries
