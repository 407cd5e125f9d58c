"""End to end: synthetic topic corpus, clear vs ambiguous queries, ANC scores.

Five topics with disjoint vocabularies, twenty passages each. Clear queries
draw all their terms from one topic and retrieve one dense clique; ambiguous
queries mix three topics and retrieve islands. The negated ANC score
(higher = more ambiguous) separates the two groups completely, and a depth
sweep shows the retrieval depth k interacting with the signal.

Run: python demos/05_full_pipeline.py
"""

from claritykit import (
    HeuristicScorer,
    LabeledQuery,
    Passage,
    RunConfig,
    binarize_clariq,
    build_index,
    predict,
    roc_and_auc,
    sweep_k,
)

TOPICS = ("alpha", "bravo", "carol", "delta", "echo")

passages = []
for p in range(20):
    for t, name in enumerate(TOPICS):
        core = [f"{name}core{i}" for i in range(8)]
        fillers = [f"{name}p{p}x{j}" for j in range(2)]
        passages.append(Passage(f"p{p:02d}t{t}", " ".join(core + fillers)))

queries = []
for t, name in enumerate(TOPICS):
    for i in range(4):
        terms = " ".join(f"{name}core{(i + j) % 8}" for j in range(3))
        queries.append(LabeledQuery(f"clear-{name}-{i}", terms, clarity_level=1))
combos = [(a, b, c) for a in range(5) for b in range(a + 1, 5) for c in range(b + 1, 5)]
for i in range(20):
    a, b, c = combos[i % len(combos)]
    pick = (i // len(combos)) % 8
    terms = f"{TOPICS[a]}core{pick} {TOPICS[b]}core{pick} {TOPICS[c]}core{pick}"
    queries.append(LabeledQuery(f"ambig-{i:02d}", terms, clarity_level=4))

index = build_index(passages)
texts = {p.pid: p.text for p in passages}
labels = {q.query_id: binarize_clariq(q.clarity_level) for q in queries}

run = predict("anc", queries, index, texts, RunConfig(k=10), scorer=HeuristicScorer())

clear = sorted(v for q, v in run.scores.items() if q.startswith("clear"))
ambiguous = sorted(v for q, v in run.scores.items() if q.startswith("ambig"))
print(f"negated-ANC score range, clear queries:     [{clear[0]:.2f}, {clear[-1]:.2f}]")
print(f"negated-ANC score range, ambiguous queries: [{ambiguous[0]:.2f}, {ambiguous[-1]:.2f}]")
print(f"AUC for the ask/don't-ask decision: {roc_and_auc(run.scores, labels).auc:.3f}")

per_k, selected = sweep_k("anc", queries, labels, index, texts, RunConfig(),
                          k_values=[5, 10, 20], scorer=HeuristicScorer())
print("\ndepth sweep (dev AUC per k):")
for k, auc in sorted(per_k.items()):
    marker = "  <- selected" if k == selected else ""
    print(f"  k = {k:3d}: AUC {auc:.3f}{marker}")
