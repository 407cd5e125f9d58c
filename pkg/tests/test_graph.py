import json
import random
import re

import numpy as np
import pytest

from claritykit import (
    CoherencyNetwork,
    EdgeMatrix,
    average_node_connectivity,
    build_network,
    connectivity_report,
    export_dot,
    local_node_connectivity,
    node_connectivity,
)


def graph_of(n, edges):
    return CoherencyNetwork(nodes=[f"n{i}" for i in range(n)], edges=set(edges))


def complete_digraph(n):
    return graph_of(n, {(i, j) for i in range(n) for j in range(n) if i != j})


class TestBuildNetwork:
    def test_all_false(self):
        matrix = EdgeMatrix(passages=[f"p{i}" for i in range(10)], adj=np.zeros((10, 10), bool))
        g = build_network(matrix)
        assert g.n_nodes() == 10 and g.n_edges() == 0

    def test_all_true(self):
        adj = np.ones((4, 4), dtype=bool)
        np.fill_diagonal(adj, False)
        g = build_network(EdgeMatrix(passages=list("abcd"), adj=adj))
        assert g.n_edges() == 12

    def test_matches_enumeration(self):
        rng = random.Random(17)
        adj = np.array([[rng.random() < 0.4 for _ in range(6)] for _ in range(6)])
        np.fill_diagonal(adj, False)
        g = build_network(EdgeMatrix(passages=[f"p{i}" for i in range(6)], adj=adj))
        expected = {(i, j) for i in range(6) for j in range(6) if i != j and adj[i, j]}
        assert g.edges == expected

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            build_network(EdgeMatrix(passages=["a", "b"], adj=np.zeros((3, 3), bool)))

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            CoherencyNetwork(nodes=["a", "b"], edges={(0, 0)})


class TestLocalConnectivity:
    def test_no_path(self):
        g = graph_of(3, {(0, 1)})
        assert local_node_connectivity(g, "n2", "n0") == 0

    def test_complete_k5_any_pair(self):
        g = complete_digraph(5)
        for u in range(5):
            for v in range(5):
                if u != v:
                    assert local_node_connectivity(g, f"n{u}", f"n{v}") == 4

    def test_direct_edge_only(self):
        g = graph_of(2, {(0, 1)})
        assert local_node_connectivity(g, "n0", "n1") == 1
        assert local_node_connectivity(g, "n1", "n0") == 0

    def test_two_disjoint_routes(self):
        # 0 -> 1 -> 3 and 0 -> 2 -> 3
        g = graph_of(4, {(0, 1), (1, 3), (0, 2), (2, 3)})
        assert local_node_connectivity(g, "n0", "n3") == 2
        # both routes share nothing internal, but 3 -> 0 has no path
        assert local_node_connectivity(g, "n3", "n0") == 0

    def test_same_node_rejected(self):
        g = complete_digraph(3)
        with pytest.raises(ValueError):
            local_node_connectivity(g, "n0", "n0")

    def test_missing_node_rejected(self):
        g = complete_digraph(3)
        with pytest.raises(ValueError):
            local_node_connectivity(g, "n0", "zz")


class TestNodeConnectivity:
    def test_edgeless(self):
        assert node_connectivity(graph_of(5, set())) == 0

    def test_two_node_bidirectional(self):
        assert node_connectivity(graph_of(2, {(0, 1), (1, 0)})) == 1

    def test_directed_three_cycle(self):
        assert node_connectivity(graph_of(3, {(0, 1), (1, 2), (2, 0)})) == 1

    def test_complete_family(self):
        for n in range(2, 9):
            assert node_connectivity(complete_digraph(n)) == n - 1

    def test_trivial_rejected(self):
        with pytest.raises(ValueError):
            node_connectivity(graph_of(1, set()))

    def test_zero_iff_not_strongly_connected(self):
        # one-way pair: reachable one way only
        assert node_connectivity(graph_of(2, {(0, 1)})) == 0


class TestAverageNodeConnectivity:
    def test_edgeless(self):
        assert average_node_connectivity(graph_of(5, set())) == 0.0

    def test_complete_k4(self):
        assert average_node_connectivity(complete_digraph(4)) == 3.0

    def test_directed_three_cycle(self):
        assert average_node_connectivity(graph_of(3, {(0, 1), (1, 2), (2, 0)})) == 1.0

    def test_trivial_rejected(self):
        with pytest.raises(ValueError):
            average_node_connectivity(graph_of(1, set()))


class TestConnectivityReport:
    def test_bounds_and_consistency(self):
        rng = random.Random(23)
        for _ in range(20):
            n = rng.randint(2, 6)
            edges = {
                (i, j)
                for i in range(n)
                for j in range(n)
                if i != j and rng.random() < 0.5
            }
            g = graph_of(n, edges)
            report = connectivity_report(g, query_id="q", per_pair=True)
            assert 0 <= report.nc <= n - 1
            assert 0.0 <= report.anc <= n - 1
            assert report.nc == min(report.per_pair.values())
            assert report.n_nodes == n and report.n_edges == len(edges)

    def test_json_round_trip(self):
        g = graph_of(3, {(0, 1), (1, 2), (2, 0)})
        report = connectivity_report(g, query_id="q7", per_pair=True)
        payload = json.loads(report.to_json())
        assert payload["nc"] == 1 and payload["anc"] == 1.0
        assert payload["query_id"] == "q7"
        assert payload["per_pair"]["n0->n1"] == 1

    def test_deterministic(self):
        g = graph_of(5, {(0, 1), (1, 2), (2, 0), (3, 4), (0, 3)})
        first = connectivity_report(g, per_pair=True)
        second = connectivity_report(g, per_pair=True)
        assert (first.nc, first.anc, first.per_pair) == (second.nc, second.anc, second.per_pair)


DOT_EDGE_RE = re.compile(r'^\s*"(.+?)" -> "(.+?)";$')
DOT_NODE_RE = re.compile(r'^\s*"(.+?)"( \[label=.*\])?;$')


def parse_dot(text):
    nodes, edges = [], set()
    for line in text.splitlines():
        edge = DOT_EDGE_RE.match(line)
        if edge:
            edges.add((edge.group(1), edge.group(2)))
            continue
        node = DOT_NODE_RE.match(line)
        if node:
            nodes.append(node.group(1))
    return nodes, edges


class TestExportDot:
    def test_empty_graph_nodes_only(self):
        g = graph_of(3, set())
        nodes, edges = parse_dot(export_dot(g))
        assert nodes == ["n0", "n1", "n2"] and edges == set()

    def test_single_edge(self):
        g = graph_of(2, {(0, 1)})
        text = export_dot(g)
        assert text.count("->") == 1

    def test_parse_back_exact_edges(self):
        rng = random.Random(31)
        edges = {
            (i, j) for i in range(6) for j in range(6) if i != j and rng.random() < 0.4
        }
        g = graph_of(6, edges)
        nodes, parsed = parse_dot(export_dot(g))
        assert nodes == g.nodes
        assert parsed == {(f"n{i}", f"n{j}") for i, j in edges}

    def test_labels_and_escaping(self):
        g = CoherencyNetwork(nodes=['we"ird', "ok"], edges={(0, 1)})
        text = export_dot(g, labels={'we"ird': 'say "hi"'})
        assert '\\"' in text
        _, edges = parse_dot(text)
        assert len(edges) == 1
