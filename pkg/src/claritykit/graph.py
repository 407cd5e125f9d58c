"""Coherency network construction and vertex-connectivity clarity signals.

The network is a directed graph over retrieved passages. Two signals are
computed on it: node connectivity (NC), the minimum number of vertices whose
removal disconnects the graph or makes it trivial, and average node
connectivity (ANC), the mean of local connectivity over all ordered vertex
pairs. Local connectivity kappa(u, v) is the maximum number of internally
node-disjoint directed u->v paths, computed as max-flow on the node-split
auxiliary digraph: every vertex w becomes an arc w_in -> w_out of capacity 1
and every edge a -> b an arc a_out -> b_in, so integral flow from u_out to
v_in packs internally disjoint paths and equals the minimum vertex cut for
non-adjacent pairs (Menger). Directed semantics throughout: NC is 0 whenever
the graph is not strongly connected.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .edges import EdgeMatrix


@dataclass
class CoherencyNetwork:
    """Directed graph on passage ids: ordered nodes plus an index-pair edge set."""

    nodes: list[str]
    edges: set[tuple[int, int]]

    def __post_init__(self) -> None:
        n = len(self.nodes)
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop on node index {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) references a missing node")
        self._pos = {pid: i for i, pid in enumerate(self.nodes)}
        if len(self._pos) != n:
            raise ValueError("duplicate node ids")

    def n_nodes(self) -> int:
        return len(self.nodes)

    def n_edges(self) -> int:
        return len(self.edges)

    def index_of(self, node: str) -> int:
        if node not in self._pos:
            raise ValueError(f"node {node!r} not in graph")
        return self._pos[node]


@dataclass
class ConnectivityReport:
    """NC/ANC summary for one query's network, JSON-serializable."""

    query_id: str
    n_nodes: int
    n_edges: int
    nc: int
    anc: float
    per_pair: dict[tuple[str, str], int] | None = field(default=None)

    def to_json(self) -> str:
        payload = {
            "query_id": self.query_id,
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
            "nc": self.nc,
            "anc": self.anc,
        }
        if self.per_pair is not None:
            payload["per_pair"] = {f"{u}->{v}": k for (u, v), k in sorted(self.per_pair.items())}
        return json.dumps(payload, sort_keys=True, indent=2)


def build_network(edge_matrix: EdgeMatrix) -> CoherencyNetwork:
    """Build the network from a binarized adjacency, preserving node order."""
    n = len(edge_matrix.passages)
    if edge_matrix.adj.shape != (n, n):
        raise ValueError(
            f"adjacency shape {edge_matrix.adj.shape} does not match {n} passages"
        )
    edges = {
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and bool(edge_matrix.adj[i, j])
    }
    return CoherencyNetwork(nodes=list(edge_matrix.passages), edges=edges)


class _SplitFlow:
    """Dinic max-flow on the node-split digraph of a CoherencyNetwork.

    Vertex i splits into in-node 2i and out-node 2i+1 joined by a unit arc;
    graph edge (i, j) becomes arc 2i+1 -> 2j. Unit capacity on edge arcs is
    exact: every path through internal vertices is already limited to one
    unit by their node arcs, and the one arc with no internal vertex, a
    direct source-to-sink edge, must count as exactly one path. The arc
    structure is built once; capacities are reset for each source/sink pair.
    """

    def __init__(self, n: int, edges: set[tuple[int, int]]):
        self.n = n
        self.n_vertices = 2 * n
        self.to: list[int] = []
        self.cap_init: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i in range(n):
            self._add_arc(2 * i, 2 * i + 1, 1)
        for i, j in sorted(edges):
            self._add_arc(2 * i + 1, 2 * j, 1)
        self.cap = list(self.cap_init)

    def _add_arc(self, u: int, v: int, capacity: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap_init.append(capacity)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap_init.append(0)

    def max_flow(self, source: int, sink: int) -> int:
        self.cap = list(self.cap_init)
        flow = 0
        while True:
            level = self._bfs(source, sink)
            if level[sink] < 0:
                return flow
            it = [0] * self.n_vertices
            while True:
                pushed = self._dfs(source, sink, self.n, level, it)
                if pushed == 0:
                    break
                flow += pushed

    def _bfs(self, source: int, sink: int) -> list[int]:
        level = [-1] * self.n_vertices
        level[source] = 0
        q = deque([source])
        while q:
            u = q.popleft()
            for arc in self.adj[u]:
                v = self.to[arc]
                if self.cap[arc] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
        return level

    def _dfs(self, u: int, sink: int, limit: int, level: list[int], it: list[int]) -> int:
        if u == sink:
            return limit
        while it[u] < len(self.adj[u]):
            arc = self.adj[u][it[u]]
            v = self.to[arc]
            if self.cap[arc] > 0 and level[v] == level[u] + 1:
                pushed = self._dfs(v, sink, min(limit, self.cap[arc]), level, it)
                if pushed > 0:
                    self.cap[arc] -= pushed
                    self.cap[arc ^ 1] += pushed
                    return pushed
            it[u] += 1
        level[u] = -1
        return 0


def local_node_connectivity(g: CoherencyNetwork, u: str, v: str) -> int:
    """Maximum number of internally node-disjoint directed paths from u to v.

    Equals the minimum u-v vertex cut for non-adjacent pairs (Menger); for
    adjacent pairs the direct edge counts as one path.
    """
    iu, iv = g.index_of(u), g.index_of(v)
    if iu == iv:
        raise ValueError(f"local connectivity needs two distinct nodes, got {u!r} twice")
    flow = _SplitFlow(g.n_nodes(), g.edges)
    return flow.max_flow(2 * iu + 1, 2 * iv)


def _all_pairs_local_connectivity(g: CoherencyNetwork) -> dict[tuple[int, int], int]:
    n = g.n_nodes()
    flow = _SplitFlow(n, g.edges)
    return {
        (i, j): flow.max_flow(2 * i + 1, 2 * j)
        for i in range(n)
        for j in range(n)
        if i != j
    }


def node_connectivity(g: CoherencyNetwork) -> int:
    """NC: minimum over all ordered pairs of local connectivity.

    0 iff the graph is not strongly connected; n-1 for the complete digraph.
    Graphs with fewer than 2 nodes are trivial and rejected.
    """
    n = g.n_nodes()
    if n < 2:
        raise ValueError(f"node connectivity needs >= 2 nodes, got {n}")
    flow = _SplitFlow(n, g.edges)
    best = n - 1
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            best = min(best, flow.max_flow(2 * i + 1, 2 * j))
            if best == 0:
                return 0
    return best


def average_node_connectivity(g: CoherencyNetwork) -> float:
    """ANC: mean local connectivity over all n*(n-1) ordered pairs."""
    n = g.n_nodes()
    if n < 2:
        raise ValueError(f"average node connectivity needs >= 2 nodes, got {n}")
    local = _all_pairs_local_connectivity(g)
    return sum(local.values()) / (n * (n - 1))


def connectivity_report(
    g: CoherencyNetwork, query_id: str = "", per_pair: bool = False
) -> ConnectivityReport:
    """Compute NC and ANC in one all-pairs pass."""
    n = g.n_nodes()
    if n < 2:
        raise ValueError(f"connectivity report needs >= 2 nodes, got {n}")
    local = _all_pairs_local_connectivity(g)
    pair_map = None
    if per_pair:
        pair_map = {(g.nodes[i], g.nodes[j]): k for (i, j), k in local.items()}
    return ConnectivityReport(
        query_id=query_id,
        n_nodes=n,
        n_edges=g.n_edges(),
        nc=min(local.values()),
        anc=sum(local.values()) / (n * (n - 1)),
        per_pair=pair_map,
    )


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: CoherencyNetwork, labels: dict[str, str] | None = None) -> str:
    """Render the network as DOT text with stable node and edge order."""
    lines = ["digraph coherency_network {"]
    for pid in g.nodes:
        if labels and pid in labels:
            lines.append(f"  {_dot_quote(pid)} [label={_dot_quote(labels[pid])}];")
        else:
            lines.append(f"  {_dot_quote(pid)};")
    for i, j in sorted(g.edges):
        lines.append(f"  {_dot_quote(g.nodes[i])} -> {_dot_quote(g.nodes[j])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
