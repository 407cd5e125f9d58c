"""The line-delimited JSON pair-scoring protocol.

Request:  {"pair_id": str, "text_a": str, "text_b": str}
Response: {"pair_id": str, "p_isnext": float}

One JSON object per line. A blank line flushes the pending batch; EOF
flushes whatever remains. Every request is answered exactly once, in
request order. A malformed request line produces
{"pair_id": null, "error": "..."} and serving continues.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO

from .bridge import NspScorer


def _parse_request(line: str) -> tuple[str, str, str]:
    rec = json.loads(line)
    pair_id = rec["pair_id"]
    text_a = rec["text_a"]
    text_b = rec["text_b"]
    if not isinstance(pair_id, str) or not isinstance(text_a, str) or not isinstance(text_b, str):
        raise ValueError("pair_id, text_a, text_b must all be strings")
    return pair_id, text_a, text_b


def _emit(stream: IO[str], payload: dict) -> None:
    stream.write(json.dumps(payload, ensure_ascii=False) + "\n")


def _flush(scorer: NspScorer, batch: list[tuple[str, str, str]], stream: IO[str]) -> None:
    if not batch:
        stream.flush()
        return
    probs = scorer.score([(a, b) for _, a, b in batch])
    for (pair_id, _, _), p in zip(batch, probs):
        _emit(stream, {"pair_id": pair_id, "p_isnext": p})
    stream.flush()


def serve(scorer: NspScorer, stdin: IO[str], stdout: IO[str]) -> None:
    """Serve the protocol until EOF."""
    batch: list[tuple[str, str, str]] = []
    for line in stdin:
        if not line.strip():
            _flush(scorer, batch, stdout)
            batch = []
            continue
        try:
            batch.append(_parse_request(line))
        except (ValueError, KeyError, TypeError) as exc:
            _emit(stdout, {"pair_id": None, "error": f"bad request line: {exc}"})
            stdout.flush()
    _flush(scorer, batch, stdout)


def score_file(scorer: NspScorer, pairs_path: str | Path, out_path: str | Path) -> int:
    """Score a request file offline; one response line per request, in order.

    Produces the same values as serve() on the same inputs (same batching).
    Returns the number of pairs scored.
    """
    requests: list[tuple[str, str, str]] = []
    with Path(pairs_path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                requests.append(_parse_request(line))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{pairs_path}:{lineno}: bad request line: {exc}") from exc
    with Path(out_path).open("w", encoding="utf-8") as out:
        _flush(scorer, requests, out)
    return len(requests)
