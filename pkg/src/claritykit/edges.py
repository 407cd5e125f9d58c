"""Successor prediction over ordered passage pairs and its binarization.

Scorers produce the probability that passage B reads as a continuation of
passage A. All n*(n-1) ordered pairs of a retrieved set are scored, cached
by content hash, and thresholded into a directed adjacency matrix.

External scorers speak a line-delimited JSON protocol over stdin/stdout:
request  {"pair_id": str, "text_a": str, "text_b": str}
response {"pair_id": str, "p_isnext": float in [0, 1]}
A blank request line flushes a batch; the child must answer every request
exactly once, in any order.
"""

from __future__ import annotations

import hashlib
import json
import math
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .corpus import Passage, tokenize
from .errors import ScorerError

DEFAULT_EDGE_THRESHOLD = 0.5
DEFAULT_BATCH_TIMEOUT = 120.0

HEURISTIC_SCORER_ID = "jaccard-logistic-v1"
# Logistic squash parameters for the heuristic scorer: slope 8, midpoint
# J = 0.25, fixed so fixtures stay stable.
_HEURISTIC_SLOPE = 8.0
_HEURISTIC_MIDPOINT = 0.25


def pair_hash(text_a: str, text_b: str) -> str:
    """Content hash of an ordered text pair; cache key and pair_id."""
    a = text_a.encode("utf-8")
    b = text_b.encode("utf-8")
    h = hashlib.sha256()
    h.update(len(a).to_bytes(8, "big"))
    h.update(a)
    h.update(b)
    return h.hexdigest()


@dataclass
class PairScoreSet:
    """Successor probabilities over the ordered pairs of a passage list.

    probs[i, j] is the probability that passages[j] succeeds passages[i];
    the diagonal is unused and kept at 0.
    """

    query_id: str
    passages: list[str]
    probs: np.ndarray
    scorer_id: str


@dataclass
class EdgeMatrix:
    """Boolean directed adjacency over a passage list; adj[i, j] is d_i -> d_j."""

    passages: list[str]
    adj: np.ndarray


class PairScorer(Protocol):
    scorer_id: str

    def score_batch(self, pairs: Sequence[tuple[str, str, str]]) -> dict[str, float]:
        """Score (pair_id, text_a, text_b) triples; return pair_id -> p_isnext."""
        ...


def heuristic_successor_score(text_a: str, text_b: str) -> float:
    """Deterministic successor probability standing in for a neural scorer.

    Jaccard similarity of the token sets squashed through
    sigma(8 * (J - 0.25)); symmetric in its arguments.
    """
    set_a = set(tokenize(text_a))
    set_b = set(tokenize(text_b))
    union = set_a | set_b
    jaccard = 1.0 if not union else len(set_a & set_b) / len(union)
    return 1.0 / (1.0 + math.exp(-_HEURISTIC_SLOPE * (jaccard - _HEURISTIC_MIDPOINT)))


class HeuristicScorer:
    """In-process scorer wrapping heuristic_successor_score.

    Counts invocations so cache-transparency tests can assert "served fully
    from cache".
    """

    scorer_id = HEURISTIC_SCORER_ID

    def __init__(self) -> None:
        self.calls = 0

    def score_batch(self, pairs: Sequence[tuple[str, str, str]]) -> dict[str, float]:
        out = {}
        for pid, text_a, text_b in pairs:
            self.calls += 1
            out[pid] = heuristic_successor_score(text_a, text_b)
        return out


class PairFileScorer:
    """Scorer backed by a file of wire-protocol response lines.

    pair_id in the file must be the pair_hash of the ordered text pair (the
    same key the cache uses), so files produced offline by any compatible
    scorer can be joined without a live subprocess.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.scores: dict[str, float] = {}
        raw = self.path.read_bytes()
        self.scorer_id = "pairfile-" + hashlib.sha256(raw).hexdigest()[:12]
        for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                self.scores[str(rec["pair_id"])] = float(rec["p_isnext"])
            except (ValueError, KeyError, TypeError) as exc:
                raise ScorerError(f"{self.path}:{lineno}: bad response line: {exc}") from exc

    def score_batch(self, pairs: Sequence[tuple[str, str, str]]) -> dict[str, float]:
        missing = [pid for pid, _, _ in pairs if pid not in self.scores]
        if missing:
            raise ScorerError(
                f"pair file {self.path} is missing {len(missing)} pair(s)", pair_ids=missing
            )
        return {pid: self.scores[pid] for pid, _, _ in pairs}


class PairScoreCache:
    """Append-only pair-score cache: one file per scorer_id, records (hash, p).

    Thread safe; lines are `<hash>\\t<p>` so files can be inspected or merged
    with standard tools.
    """

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._maps: dict[str, dict[str, float]] = {}

    def _file(self, scorer_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in scorer_id)
        return self.cache_dir / f"{safe}.tsv"

    def _load(self, scorer_id: str) -> dict[str, float]:
        if scorer_id not in self._maps:
            scores: dict[str, float] = {}
            path = self._file(scorer_id)
            if path.exists():
                with path.open("r", encoding="utf-8") as fh:
                    for line in fh:
                        line = line.rstrip("\n")
                        if not line:
                            continue
                        key, _, value = line.partition("\t")
                        scores[key] = float(value)
            self._maps[scorer_id] = scores
        return self._maps[scorer_id]

    def get_many(self, scorer_id: str, hashes: Sequence[str]) -> dict[str, float]:
        with self._lock:
            scores = self._load(scorer_id)
            return {h: scores[h] for h in hashes if h in scores}

    def put_many(self, scorer_id: str, items: dict[str, float]) -> None:
        with self._lock:
            scores = self._load(scorer_id)
            fresh = {h: p for h, p in items.items() if h not in scores}
            if not fresh:
                return
            with self._file(scorer_id).open("a", encoding="utf-8") as fh:
                for h, p in fresh.items():
                    fh.write(f"{h}\t{p!r}\n")
            scores.update(fresh)


def score_pairs(
    passages: Sequence[Passage],
    scorer: PairScorer,
    cache: PairScoreCache | None = None,
    query_id: str = "",
) -> PairScoreSet:
    """Score all ordered pairs of `passages`, consulting the cache first.

    All-or-nothing: a scorer failure propagates and no partial matrix is
    returned. Raises ScorerError if any probability falls outside [0, 1].
    """
    n = len(passages)
    if n < 2:
        raise ValueError(f"need at least 2 passages, got {n}")

    hashes = np.empty((n, n), dtype=object)
    wanted: dict[str, tuple[str, str]] = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            h = pair_hash(passages[i].text, passages[j].text)
            hashes[i, j] = h
            wanted.setdefault(h, (passages[i].text, passages[j].text))

    found: dict[str, float] = {}
    if cache is not None:
        found = cache.get_many(scorer.scorer_id, list(wanted))
    missing = [(h, a, b) for h, (a, b) in wanted.items() if h not in found]
    if missing:
        scored = scorer.score_batch(missing)
        bad = [h for h, _, _ in missing if h not in scored]
        if bad:
            raise ScorerError(f"scorer returned no result for {len(bad)} pair(s)", pair_ids=bad)
        for h, p in scored.items():
            if not (isinstance(p, (int, float)) and math.isfinite(p) and 0.0 <= p <= 1.0):
                raise ScorerError(f"probability out of range for pair {h}: {p!r}", pair_ids=[h])
        if cache is not None:
            cache.put_many(scorer.scorer_id, scored)
        found.update(scored)

    probs = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            if i != j:
                probs[i, j] = found[hashes[i, j]]
    return PairScoreSet(
        query_id=query_id,
        passages=[p.pid for p in passages],
        probs=probs,
        scorer_id=scorer.scorer_id,
    )


def binarize_edges(scores: PairScoreSet, threshold: float = DEFAULT_EDGE_THRESHOLD) -> EdgeMatrix:
    """Directed adjacency: edge i -> j iff probs[i, j] > threshold (strict)."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    adj = scores.probs > threshold
    np.fill_diagonal(adj, False)
    return EdgeMatrix(passages=list(scores.passages), adj=adj)


class ExternalScorerSession:
    """Pair scorer served by a child process over the wire protocol.

    Requests are written as JSON lines followed by a blank flush line; the
    child may answer in any order, matched back by pair_id. Process exit,
    a malformed or unexpected response line, an error response, or a batch
    timeout all raise ScorerError.
    """

    def __init__(
        self,
        command: str | Sequence[str],
        timeout: float = DEFAULT_BATCH_TIMEOUT,
        scorer_id: str | None = None,
    ):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        joined = " ".join(self.command)
        self.scorer_id = scorer_id or ("ext-" + hashlib.sha256(joined.encode()).hexdigest()[:12])
        self.requests_sent = 0
        self._lock = threading.Lock()
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise ScorerError(f"cannot launch scorer {joined!r}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._read_stdout, daemon=True)
        self._reader.start()

    def _read_stdout(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def score_batch(self, pairs: Sequence[tuple[str, str, str]]) -> dict[str, float]:
        with self._lock:
            return self._score_batch_locked(pairs)

    def _score_batch_locked(self, pairs: Sequence[tuple[str, str, str]]) -> dict[str, float]:
        if self._proc.poll() is not None:
            raise ScorerError(
                f"scorer process exited with code {self._proc.returncode}",
                pair_ids=[p[0] for p in pairs],
            )
        expected = {p[0] for p in pairs}
        try:
            assert self._proc.stdin is not None
            for pid, text_a, text_b in pairs:
                req = {"pair_id": pid, "text_a": text_a, "text_b": text_b}
                self._proc.stdin.write(json.dumps(req, ensure_ascii=False) + "\n")
                self.requests_sent += 1
            self._proc.stdin.write("\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerError(f"scorer stdin closed: {exc}", pair_ids=sorted(expected)) from exc

        results: dict[str, float] = {}
        lineno = 0
        while len(results) < len(expected):
            try:
                line = self._lines.get(timeout=self.timeout)
            except queue.Empty:
                missing = sorted(expected - set(results))
                raise ScorerError(
                    f"scorer timed out after {self.timeout}s with {len(missing)} pair(s) pending",
                    pair_ids=missing,
                ) from None
            if line is None:
                missing = sorted(expected - set(results))
                raise ScorerError(
                    f"scorer process exited mid-batch (code {self._proc.poll()})",
                    pair_ids=missing,
                )
            lineno += 1
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except ValueError as exc:
                raise ScorerError(
                    f"malformed response line {lineno}: {line.rstrip()!r}",
                    pair_ids=sorted(expected - set(results)),
                ) from exc
            if rec.get("error") is not None or rec.get("pair_id") is None:
                raise ScorerError(
                    f"scorer error on response line {lineno}: {rec!r}",
                    pair_ids=sorted(expected - set(results)),
                )
            pid = str(rec["pair_id"])
            if pid not in expected or pid in results:
                raise ScorerError(
                    f"unexpected pair_id {pid!r} on response line {lineno}",
                    pair_ids=sorted(expected - set(results)),
                )
            try:
                p = float(rec["p_isnext"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ScorerError(
                    f"bad p_isnext on response line {lineno}: {rec!r}",
                    pair_ids=[pid],
                ) from exc
            results[pid] = p
        return results

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
                self._proc.wait(timeout=5.0)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()

    def __enter__(self) -> "ExternalScorerSession":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def export_pair_requests(passages: Sequence[Passage], out_path: str | Path) -> int:
    """Write wire-protocol request lines for all ordered pairs of `passages`.

    pair_id is the content hash, so responses scored offline line up with
    PairFileScorer and the cache. Returns the number of requests written.
    """
    count = 0
    with Path(out_path).open("w", encoding="utf-8") as fh:
        for i, a in enumerate(passages):
            for j, b in enumerate(passages):
                if i == j:
                    continue
                req = {"pair_id": pair_hash(a.text, b.text), "text_a": a.text, "text_b": b.text}
                fh.write(json.dumps(req, ensure_ascii=False) + "\n")
                count += 1
    return count
