"""Build a BM25 index over a small passage corpus and retrieve for queries.

Run: python demos/01_index_and_retrieve.py
"""

from claritykit import Passage, build_index, corpus_score, retrieve_top_k, tokenize

corpus = [
    Passage("d1", "The Land Rover Defender is an off road vehicle built for rough terrain"),
    Passage("d2", "Defender is a 1981 arcade game about protecting astronauts"),
    Passage("d3", "Microsoft Defender protects Windows computers from malware"),
    Passage("d4", "Folk remedies for a sore throat include honey tea and salt water gargles"),
    Passage("d5", "A sore throat usually comes from a viral infection and passes in days"),
]

print("tokenizer output for 'Sore-throat 2x!':", tokenize("Sore-throat 2x!"))

index = build_index(corpus)
print(f"\nindexed {index.doc_count} passages, "
      f"{len(index.postings)} unique terms, avg length {index.avg_doc_len:.1f}")

for query in ("tell me about defender", "folk remedies for a sore throat"):
    ranked = retrieve_top_k(index, query, k=3)
    print(f"\nquery: {query!r}")
    for pid, score in ranked.entries:
        print(f"  {pid}  {score:.4f}")
    print(f"  corpus score s_c = {corpus_score(index, query):.4f}")
