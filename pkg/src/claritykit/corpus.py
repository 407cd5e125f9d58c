"""Passage corpus ingestion, inverted index, and BM25 top-k retrieval.

The index is a plain in-memory inverted index persisted to a directory as a
columnar .npz file plus a JSON metadata sidecar. Retrieval from a reloaded
index is bitwise identical to the in-memory one: scoring walks the same
postings in the same order with the same float arithmetic.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import DataError

TOKENIZER_ID = "unicode-alnum-lower-v1"
INDEX_FORMAT = "claritykit-index-v1"

DEFAULT_K1 = 0.9
DEFAULT_B = 0.4

# Floor returned by corpus_score when no query term occurs in the corpus;
# keeps QPP normalizers away from division by zero.
SCORE_FLOOR = 1e-6

# Runs of Unicode alphanumerics; underscore and everything else separate.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase `text` and split it into runs of Unicode alphanumerics.

    Deterministic, no stemming, no stopword removal. Empty input gives [].
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Passage:
    """One identified text unit of the corpus."""

    pid: str
    text: str


@dataclass
class RankedList:
    """Per-query retrieval result: (pid, score) pairs, descending by score."""

    query_id: str
    entries: list[tuple[str, float]] = field(default_factory=list)

    def pids(self) -> list[str]:
        return [pid for pid, _ in self.entries]

    def scores(self) -> list[float]:
        return [score for _, score in self.entries]

    def top(self, k: int) -> "RankedList":
        """Prefix of the first k entries (valid because ordering is total)."""
        return RankedList(self.query_id, self.entries[:k])

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class Index:
    """Inverted index plus the collection statistics BM25 and QPP need.

    postings maps term -> [(pid, tf)] sorted by pid ascending; collection_tf
    maps term -> total occurrences; avg_doc_len == total_tokens / doc_count.
    """

    postings: dict[str, list[tuple[str, int]]]
    doc_lengths: dict[str, int]
    doc_count: int
    avg_doc_len: float
    collection_tf: dict[str, int]
    total_tokens: int
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    corpus_checksum: str = ""


def read_corpus_tsv(path: str | Path) -> Iterator[Passage]:
    """Yield passages from a `<pid>\\t<text>` TSV file (MS MARCO style)."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise DataError(f"{path}:{lineno}: expected <pid>\\t<text>")
            pid, text = line.split("\t", 1)
            yield Passage(pid, text)


def corpus_checksum(passages: Iterable[Passage]) -> str:
    """sha256 over the ordered (pid, text) stream, NUL-delimited."""
    h = hashlib.sha256()
    for p in passages:
        h.update(p.pid.encode("utf-8"))
        h.update(b"\x00")
        h.update(p.text.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def build_index(
    corpus: Iterable[Passage],
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> Index:
    """Build an Index from a passage stream.

    Rejects duplicate pids (naming the offender), empty corpora, and
    passages whose text is empty after trimming.
    """
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    collection_tf: dict[str, int] = {}
    total_tokens = 0
    checksum = hashlib.sha256()

    for passage in corpus:
        if passage.pid in doc_lengths:
            raise DataError(f"duplicate passage id: {passage.pid!r}")
        if not passage.text.strip():
            raise DataError(f"passage {passage.pid!r} has empty text")
        checksum.update(passage.pid.encode("utf-8"))
        checksum.update(b"\x00")
        checksum.update(passage.text.encode("utf-8"))
        checksum.update(b"\x00")
        terms = tokenize(passage.text)
        doc_lengths[passage.pid] = len(terms)
        total_tokens += len(terms)
        tf: dict[str, int] = {}
        for term in terms:
            tf[term] = tf.get(term, 0) + 1
        for term, count in tf.items():
            postings.setdefault(term, []).append((passage.pid, count))
            collection_tf[term] = collection_tf.get(term, 0) + count

    if not doc_lengths:
        raise DataError("empty corpus")
    for plist in postings.values():
        plist.sort(key=lambda entry: entry[0])

    doc_count = len(doc_lengths)
    return Index(
        postings=postings,
        doc_lengths=doc_lengths,
        doc_count=doc_count,
        avg_doc_len=total_tokens / doc_count,
        collection_tf=collection_tf,
        total_tokens=total_tokens,
        k1=k1,
        b=b,
        corpus_checksum=checksum.hexdigest(),
    )


def _idf(index: Index, term: str) -> float:
    df = len(index.postings.get(term, ()))
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def _tf_component(index: Index, tf: float, dl: float) -> float:
    norm = index.k1 * (1.0 - index.b + index.b * dl / index.avg_doc_len)
    return tf * (index.k1 + 1.0) / (tf + norm)


def bm25_score(index: Index, query_terms: list[str], pid: str) -> float:
    """BM25 score of one passage for the given query terms.

    sum over query terms t of idf(t) * tf*(k1+1) / (tf + k1*(1-b+b*dl/avgdl))
    with idf(t) = ln(1 + (N-df+0.5)/(df+0.5)). Query terms contribute once
    per occurrence. Unknown pid raises KeyError.
    """
    if pid not in index.doc_lengths:
        raise KeyError(pid)
    dl = index.doc_lengths[pid]
    score = 0.0
    for term in query_terms:
        tf = 0
        for entry_pid, entry_tf in index.postings.get(term, ()):
            if entry_pid == pid:
                tf = entry_tf
                break
        if tf == 0:
            continue
        score += _idf(index, term) * _tf_component(index, tf, dl)
    return score


def retrieve_top_k(index: Index, query_text: str, k: int, query_id: str = "") -> RankedList:
    """Top-k passages with score > 0, descending; ties broken by pid ascending.

    Fewer than k entries come back when fewer passages match. Candidate
    scores are computed with the exact bm25_score loop so that ranking,
    scores, and tie-breaks are reproducible bitwise.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query_terms = tokenize(query_text)
    # One (idf, pid->tf) lookup per query term occurrence, so the per-doc
    # summation below adds the exact same floats in the exact same order as
    # bm25_score would.
    term_maps: list[tuple[float, dict[str, int]]] = []
    candidates: set[str] = set()
    for term in query_terms:
        plist = index.postings.get(term, ())
        tf_map = dict(plist)
        term_maps.append((_idf(index, term), tf_map))
        candidates.update(tf_map)
    scored = []
    for pid in candidates:
        dl = index.doc_lengths[pid]
        score = 0.0
        for idf, tf_map in term_maps:
            tf = tf_map.get(pid, 0)
            if tf == 0:
                continue
            score += idf * _tf_component(index, tf, dl)
        if score > 0.0:
            scored.append((pid, score))
    scored.sort(key=lambda entry: (-entry[1], entry[0]))
    return RankedList(query_id, scored[:k])


def corpus_score(index: Index, query_text: str, floor: float = SCORE_FLOOR) -> float:
    """BM25-style score of the query against the whole-collection pseudo-document.

    The pseudo-document has term frequencies collection_tf and length
    total_tokens; its idf uses df = N/2 smoothing, which reduces to ln 2 for
    every term. Returns `floor` when no query term occurs in the corpus.
    """
    score = 0.0
    dl = float(index.total_tokens)
    for term in tokenize(query_text):
        ctf = index.collection_tf.get(term, 0)
        if ctf == 0:
            continue
        score += math.log(2.0) * _tf_component(index, float(ctf), dl)
    return score if score > 0.0 else floor


def save_index(index: Index, out_dir: str | Path, passages: Iterable[Passage] | None = None) -> Path:
    """Persist the index to a directory: postings.npz + meta.json sidecar.

    When `passages` is given, a passages.tsv copy is written alongside so the
    directory is self-contained for graph pipelines that need passage texts.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    doc_ids = list(index.doc_lengths)
    doc_pos = {pid: i for i, pid in enumerate(doc_ids)}
    terms = list(index.postings)
    offsets = np.zeros(len(terms) + 1, dtype=np.int64)
    flat_doc: list[int] = []
    flat_tf: list[int] = []
    ctf = np.zeros(len(terms), dtype=np.int64)
    for t, term in enumerate(terms):
        plist = index.postings[term]
        offsets[t + 1] = offsets[t] + len(plist)
        for pid, tf in plist:
            flat_doc.append(doc_pos[pid])
            flat_tf.append(tf)
        ctf[t] = index.collection_tf[term]

    np.savez(
        out_dir / "postings.npz",
        terms=np.array(terms, dtype=np.str_),
        offsets=offsets,
        posting_doc=np.array(flat_doc, dtype=np.int64),
        posting_tf=np.array(flat_tf, dtype=np.int64),
        doc_ids=np.array(doc_ids, dtype=np.str_),
        doc_lengths=np.array([index.doc_lengths[pid] for pid in doc_ids], dtype=np.int64),
        collection_tf=ctf,
    )

    meta = {
        "format": INDEX_FORMAT,
        "tokenizer": TOKENIZER_ID,
        "k1": index.k1,
        "b": index.b,
        "doc_count": index.doc_count,
        "total_tokens": index.total_tokens,
        "avg_doc_len": index.avg_doc_len,
        "corpus_sha256": index.corpus_checksum,
        "n_terms": len(terms),
    }
    (out_dir / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )

    if passages is not None:
        with (out_dir / "passages.tsv").open("w", encoding="utf-8") as fh:
            for p in passages:
                fh.write(f"{p.pid}\t{p.text}\n")
    return out_dir


def load_index(index_dir: str | Path) -> Index:
    """Reload an index persisted by save_index."""
    index_dir = Path(index_dir)
    meta_path = index_dir / "meta.json"
    if not meta_path.exists():
        raise DataError(f"not an index directory (missing meta.json): {index_dir}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("format") != INDEX_FORMAT:
        raise DataError(f"unsupported index format: {meta.get('format')!r}")

    with np.load(index_dir / "postings.npz") as data:
        terms = [str(t) for t in data["terms"]]
        offsets = data["offsets"]
        posting_doc = data["posting_doc"]
        posting_tf = data["posting_tf"]
        doc_ids = [str(d) for d in data["doc_ids"]]
        doc_lengths_arr = data["doc_lengths"]
        ctf = data["collection_tf"]

    postings: dict[str, list[tuple[str, int]]] = {}
    collection_tf: dict[str, int] = {}
    for t, term in enumerate(terms):
        lo, hi = int(offsets[t]), int(offsets[t + 1])
        postings[term] = [
            (doc_ids[int(posting_doc[i])], int(posting_tf[i])) for i in range(lo, hi)
        ]
        collection_tf[term] = int(ctf[t])

    return Index(
        postings=postings,
        doc_lengths={pid: int(doc_lengths_arr[i]) for i, pid in enumerate(doc_ids)},
        doc_count=int(meta["doc_count"]),
        avg_doc_len=float(meta["avg_doc_len"]),
        collection_tf=collection_tf,
        total_tokens=int(meta["total_tokens"]),
        k1=float(meta["k1"]),
        b=float(meta["b"]),
        corpus_checksum=str(meta["corpus_sha256"]),
    )


def load_passages(index_dir: str | Path) -> dict[str, str]:
    """Load pid -> text from an index directory's passages.tsv."""
    path = Path(index_dir) / "passages.tsv"
    if not path.exists():
        raise DataError(f"index directory has no passages.tsv: {index_dir}")
    return {p.pid: p.text for p in read_corpus_tsv(path)}
