"""Graph layer: construction invariants, matching vs. a brute-force oracle,
subgraph extraction, canonical codes."""

import numpy as np
import pytest

from graphlens.errors import GraphStructureError
from graphlens.graphs import (
    Graph,
    GraphDatabase,
    Pattern,
    covers,
    graph_as_pattern,
    induced_subgraph,
    match_pattern,
    remove_subgraph,
)
from helpers import brute_force_matches, random_graph, random_pattern


def path3(types=(0, 0, 0)):
    return Graph.build(types, np.zeros((3, 1)), [(0, 1), (1, 2)])


def triangle(types=(0, 0, 0)):
    return Graph.build(types, np.zeros((3, 1)), [(0, 1), (1, 2), (0, 2)])


# ---------------------------------------------------------------- structure

def test_build_sorts_and_dedupes_edges():
    g = Graph.build([0, 0, 0], np.zeros((3, 1)), [(2, 1), (0, 1), (1, 2)])
    assert g.edges == ((0, 1), (1, 2))
    assert g.edge_types == (0, 0)


def test_build_rejects_self_loop():
    with pytest.raises(GraphStructureError):
        Graph.build([0], np.zeros((1, 1)), [(0, 0)])


def test_build_rejects_missing_node():
    with pytest.raises(GraphStructureError):
        Graph.build([0, 0], np.zeros((2, 1)), [(0, 5)])


def test_build_rejects_conflicting_duplicate_edge_types():
    with pytest.raises(GraphStructureError):
        Graph.build([0, 0], np.zeros((2, 1)), [(0, 1), (1, 0)], [0, 1])


def test_build_rejects_bad_feature_shape():
    with pytest.raises(GraphStructureError):
        Graph.build([0, 0], np.zeros((3, 1)))


def test_features_are_read_only():
    g = path3()
    with pytest.raises(ValueError):
        g.features[0, 0] = 1.0


def test_neighbors_and_degrees():
    g = triangle()
    assert g.neighbors == ((1, 2), (0, 2), (0, 1))
    assert g.degrees == (2, 2, 2)
    a = g.adjacency()
    assert a.tolist() == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert g.has_edge(2, 0) and not g.has_edge(0, 3 - 3)


def test_pattern_must_be_connected_and_nonempty():
    with pytest.raises(GraphStructureError):
        Pattern.build([])
    with pytest.raises(GraphStructureError):
        Pattern.build([0, 0], [])  # two isolated nodes
    Pattern.build([0])  # a singleton is connected


def test_graph_as_pattern_keeps_structure():
    g = triangle((1, 2, 1))
    p = graph_as_pattern(g)
    assert p.node_types == (1, 2, 1)
    assert p.edges == g.edges


# ----------------------------------------------------------------- matching

def test_match_edge_pattern_on_path():
    p = Pattern.build([0, 0], [(0, 1)])
    got = match_pattern(p, path3())
    assert got == [(0, 1), (1, 0), (1, 2), (2, 1)]


def test_match_is_node_induced():
    # a 3-path pattern has no induced occurrence inside a triangle
    p = Pattern.build([0, 0, 0], [(0, 1), (1, 2)])
    assert match_pattern(p, triangle()) == []


def test_match_respects_node_types():
    p = Pattern.build([0, 1], [(0, 1)])
    g = Graph.build([0, 1], np.zeros((2, 1)), [(0, 1)])
    assert match_pattern(p, g) == [(0, 1)]
    assert match_pattern(Pattern.build([1, 1], [(0, 1)]), g) == []


def test_match_respects_edge_types():
    p = Pattern.build([0, 0], [(0, 1)], [2])
    g = Graph.build([0, 0], np.zeros((2, 1)), [(0, 1)], [2])
    assert match_pattern(p, g) == [(0, 1), (1, 0)]
    g2 = Graph.build([0, 0], np.zeros((2, 1)), [(0, 1)], [3])
    assert match_pattern(p, g2) == []


def test_match_pattern_larger_than_graph():
    p = Pattern.build([0, 0], [(0, 1)])
    g = Graph.build([0], np.zeros((1, 1)))
    assert match_pattern(p, g) == []


def test_match_equals_brute_force_on_random_pairs():
    rng = np.random.default_rng(11)
    for _ in range(200):
        g = random_graph(rng, max_nodes=7, node_type_count=2, edge_type_count=2)
        p = random_pattern(rng, max_nodes=3, node_type_count=2, edge_type_count=2)
        assert match_pattern(p, g) == brute_force_matches(p, g)


def test_covers_reports_nodes_and_edges():
    g = path3((0, 1, 0))
    p = Pattern.build([0, 1], [(0, 1)])
    nodes, edges = covers([p], g, targets=range(3))
    assert nodes == {0, 1, 2}
    assert edges == {(0, 1), (1, 2)}
    nodes, edges = covers([p], g, targets={2})
    assert nodes == {2}
    assert edges == {(0, 1), (1, 2)}
    nodes, edges = covers([Pattern.build([5])], g, targets=range(3))
    assert nodes == set() and edges == set()


# ----------------------------------------------------------- sub/remove

def test_induced_subgraph_remaps_and_records_origin():
    g = Graph.build(
        [0, 1, 2, 3],
        np.arange(8.0).reshape(4, 2),
        [(0, 1), (1, 2), (2, 3), (0, 3)],
        [5, 6, 7, 8],
    )
    s = induced_subgraph(g, [3, 1, 2])
    assert s.origin == (1, 2, 3)
    assert s.node_types == (1, 2, 3)
    assert s.edges == ((0, 1), (1, 2))
    assert s.edge_types == (6, 7)
    assert np.array_equal(s.features, g.features[[1, 2, 3]])
    # origin composes through nested extraction
    s2 = induced_subgraph(s, [0, 2])
    assert s2.origin == (1, 3)


def test_induced_subgraph_rejects_foreign_nodes():
    with pytest.raises(GraphStructureError):
        induced_subgraph(path3(), [0, 9])


def test_remove_subgraph_is_complement():
    g = path3()
    r = remove_subgraph(g, [1])
    assert r.origin == (0, 2)
    assert r.edges == ()
    assert remove_subgraph(g, []).n == 3
    assert remove_subgraph(g, [0, 1, 2]).n == 0


# ----------------------------------------------------------- canonical code

def test_canonical_code_invariant_under_relabeling():
    rng = np.random.default_rng(23)
    for _ in range(60):
        p = random_pattern(rng, max_nodes=4, node_type_count=3, edge_type_count=2)
        perm = list(rng.permutation(p.n))
        inv = {old: new for new, old in enumerate(perm)}
        q = Pattern.build(
            [p.node_types[perm[i]] for i in range(p.n)],
            [(inv[u], inv[v]) for u, v in p.edges],
            list(p.edge_types),
        )
        assert p.canonical_code == q.canonical_code


def test_canonical_code_separates_non_isomorphic():
    tri = Pattern.build([0, 0, 0], [(0, 1), (1, 2), (0, 2)])
    path = Pattern.build([0, 0, 0], [(0, 1), (1, 2)])
    assert tri.canonical_code != path.canonical_code
    a = Pattern.build([0, 1], [(0, 1)])
    b = Pattern.build([0, 0], [(0, 1)])
    assert a.canonical_code != b.canonical_code


# ----------------------------------------------------------------- database

def test_label_groups_sorted():
    g = path3()
    db = GraphDatabase(graphs=(g, g, g), labels={2: 0, 0: 1, 1: 0})
    assert db.label_groups() == {0: (1, 2), 1: (0,)}
