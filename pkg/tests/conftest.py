"""Shared fixtures: tiny corpora, dataset files, and the synthetic
ambiguity benchmark used by pipeline and acceptance tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

import pytest

from claritykit import LabeledQuery, Passage, heuristic_successor_score


@dataclass
class SyntheticFixture:
    """Disjoint-vocabulary topic corpus plus clear and ambiguous queries."""

    passages: list[Passage]
    queries: list[LabeledQuery]  # clarity_level 1 = clear, 4 = ambiguous
    clear_ids: list[str]
    ambiguous_ids: list[str]


TOPIC_NAMES = ("alpha", "bravo", "carol", "delta", "echo")


def make_synthetic_fixture(
    n_topics: int = 5,
    passages_per_topic: int = 20,
    clear_per_topic: int = 4,
    n_ambiguous: int = 20,
    edge_threshold: float = 0.5,
) -> SyntheticFixture:
    """Build the synthetic ambiguity benchmark.

    Each topic has a disjoint vocabulary: 8 core words shared by all of its
    passages plus 2 filler words unique to each passage. Clear queries draw
    3 core words from one topic; ambiguous queries mix one core word from
    each of 3 topics. Before returning, verifies the separation the graph
    pipeline relies on: same-topic pairs score above the edge threshold,
    cross-topic pairs below.
    """
    names = TOPIC_NAMES[:n_topics]
    cores = {t: [f"{names[t]}core{i}" for i in range(8)] for t in range(n_topics)}
    passages = []
    for p in range(passages_per_topic):
        for t in range(n_topics):
            fillers = [f"{names[t]}p{p}x{j}" for j in range(2)]
            # pid interleaves topics so equal-score ties split across topics
            passages.append(Passage(f"p{p:02d}t{t}", " ".join(cores[t] + fillers)))

    queries: list[LabeledQuery] = []
    clear_ids, ambiguous_ids = [], []
    for t in range(n_topics):
        for i in range(clear_per_topic):
            terms = [cores[t][(i + j) % 8] for j in range(3)]
            qid = f"clear-{names[t]}-{i}"
            queries.append(LabeledQuery(qid, " ".join(terms), clarity_level=1))
            clear_ids.append(qid)
    combos = [
        (a, b, c)
        for a in range(n_topics)
        for b in range(a + 1, n_topics)
        for c in range(b + 1, n_topics)
    ]
    for i in range(n_ambiguous):
        a, b, c = combos[i % len(combos)]
        pick = (i // len(combos)) % 8
        terms = [cores[a][pick], cores[b][pick], cores[c][pick]]
        qid = f"ambig-{i:02d}"
        queries.append(LabeledQuery(qid, " ".join(terms), clarity_level=4))
        ambiguous_ids.append(qid)

    # Separation oracle: the fixture must make same-topic pairs edges and
    # cross-topic pairs non-edges before any pipeline sees it.
    same = heuristic_successor_score(passages[0].text, passages[n_topics].text)
    cross = heuristic_successor_score(passages[0].text, passages[1].text)
    assert same > edge_threshold, f"same-topic pair scored {same}, need > {edge_threshold}"
    assert cross < edge_threshold, f"cross-topic pair scored {cross}, need < {edge_threshold}"
    for p in random.Random(7).sample(range(passages_per_topic), 5):
        for t in range(n_topics):
            a = passages[p * n_topics + t]
            b = passages[((p + 1) % passages_per_topic) * n_topics + t]
            assert heuristic_successor_score(a.text, b.text) > edge_threshold
            other = passages[p * n_topics + (t + 1) % n_topics]
            assert heuristic_successor_score(a.text, other.text) < edge_threshold

    return SyntheticFixture(passages, queries, clear_ids, ambiguous_ids)


@pytest.fixture(scope="session")
def synthetic_fixture() -> SyntheticFixture:
    return make_synthetic_fixture()


def write_corpus_tsv(path, passages) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in passages:
            fh.write(f"{p.pid}\t{p.text}\n")


def write_clariq_tsv(path, queries) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("topic_id\tinitial_request\tclarification_need\n")
        for q in queries:
            fh.write(f"{q.query_id}\t{q.text}\t{q.clarity_level}\n")
