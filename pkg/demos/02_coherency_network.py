"""From retrieved passages to a coherency network and its connectivity.

Passages on one topic predict each other as successors, so their network is
dense; mixed-topic retrievals fall apart into islands. Node connectivity
(NC) and average node connectivity (ANC) quantify the difference.

Run: python demos/02_coherency_network.py
"""

from claritykit import (
    HeuristicScorer,
    Passage,
    average_node_connectivity,
    binarize_edges,
    build_network,
    export_dot,
    node_connectivity,
    score_pairs,
)

coherent = [
    Passage("a1", "warm honey tea soothes a sore throat before bed"),
    Passage("a2", "warm honey tea calms a sore throat at night"),
    Passage("a3", "warm honey tea with lemon eases a sore throat"),
    Passage("a4", "warm honey tea and rest help a sore throat"),
]

scattered = [
    Passage("b1", "warm honey tea soothes a sore throat before bed"),
    Passage("b2", "the arcade cabinet drew crowds with alien waves"),
    Passage("b3", "antivirus software scans files for malware signatures"),
    Passage("b4", "the off road vehicle climbed the muddy ridge"),
]

for name, passages in (("single-topic retrieval", coherent), ("mixed retrieval", scattered)):
    pairs = score_pairs(passages, HeuristicScorer())
    network = build_network(binarize_edges(pairs, threshold=0.5))
    nc = node_connectivity(network)
    anc = average_node_connectivity(network)
    print(f"{name}: {network.n_edges()} edges, NC = {nc}, ANC = {anc:.3f}")

print("\nDOT export of the scattered network:\n")
pairs = score_pairs(scattered, HeuristicScorer())
print(export_dot(build_network(binarize_edges(pairs, 0.5))))
