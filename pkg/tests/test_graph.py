import itertools
import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgnn_lab.graph import (ConnectivityError, Graph, GraphError, are_isomorphic,
                            bridged_triangles, complete_graph, connected_components,
                            erdos_renyi_connected, laplacian, path_graph, permutation_matrix,
                            permute, ring_graph)


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, on in zip(pairs, mask) if on])


@st.composite
def graph_and_perm(draw):
    g = draw(graphs())
    perm = draw(st.permutations(range(g.n)))
    return g, list(perm)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def test_edges_are_canonical_and_sorted():
    g = Graph(4, [(3, 1), (2, 0, 0.5), (1, 0)])
    assert g.edges == [(0, 1), (0, 2), (1, 3)]
    assert g.weight(2, 0) == 0.5 and g.weight(0, 3) == 0.0
    assert g.has_edge(3, 1)
    assert g.neighbors(0) == [1, 2]


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 5)], [(0, 1), (1, 0)], [(0, 1, -1.0)],
                                   [(0, 1, float("nan"))], [(0, 1, 2, 3)]])
def test_invalid_edges_rejected(edges):
    with pytest.raises(GraphError):
        Graph(3, edges)


def test_invalid_node_count():
    with pytest.raises(GraphError):
        Graph(0)


def test_json_round_trip():
    g = Graph(5, [(0, 1, 0.25), (3, 4), (1, 4, 2.0)])
    text = g.to_json()
    assert json.loads(text) == {"n": 5, "edges": [[0, 1, 0.25], [1, 4, 2.0], [3, 4, 1.0]]}
    assert Graph.from_json(text) == g
    assert hash(Graph.from_json(text)) == hash(g)


def test_factories():
    assert path_graph(4).edges == [(0, 1), (1, 2), (2, 3)]
    assert ring_graph(4).edges == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert complete_graph(4).num_edges == 6
    bt = bridged_triangles()
    assert bt.num_edges == 7 and bt.degrees() == [2, 2, 3, 3, 2, 2]


def test_laplacian_of_weighted_path():
    g = Graph(3, [(0, 1, 2.0), (1, 2)])
    np.testing.assert_array_equal(laplacian(g), [[2, -2, 0], [-2, 3, -1], [0, -1, 1]])


@given(graphs())
def test_laplacian_zero_modes_count_components(g):
    lap = laplacian(g)
    w, v = np.linalg.eigh(lap)
    assert abs(w[0]) < 1e-9
    np.testing.assert_allclose(lap @ np.ones(g.n), 0.0, atol=1e-12)
    assert np.sum(np.abs(w) < 1e-9) == len(connected_components(g))
    assert len(connected_components(g)) == nx.number_connected_components(to_nx(g))


@given(graph_and_perm())
def test_laplacian_permutation_covariance(gp):
    g, perm = gp
    p = permutation_matrix(perm)
    np.testing.assert_array_equal(laplacian(permute(g, perm)), p @ laplacian(g) @ p.T)


@given(graph_and_perm())
def test_permuted_graph_is_isomorphic(gp):
    g, perm = gp
    assert are_isomorphic(g, permute(g, perm))


@given(graphs(6), graphs(6))
def test_isomorphism_matches_networkx(a, b):
    if a.n == b.n:
        assert are_isomorphic(a, b) == nx.is_isomorphic(to_nx(a), to_nx(b))
    else:
        assert not are_isomorphic(a, b)


def test_ring_vs_two_triangles():
    # same degree sequence, not isomorphic
    two_tri = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert not are_isomorphic(ring_graph(6), two_tri)


def test_isomorphism_on_larger_random_graphs():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = erdos_renyi_connected(12, 0.4, rng)
        h = erdos_renyi_connected(12, 0.4, rng)
        assert are_isomorphic(g, h) == nx.is_isomorphic(to_nx(g), to_nx(h))
        assert are_isomorphic(g, permute(g, rng.permutation(12)))


def test_identity_permutation():
    g = bridged_triangles()
    assert permute(g, range(6)) == g


def test_permute_rejects_bad_perm():
    with pytest.raises(GraphError):
        permute(path_graph(3), [0, 1])
    with pytest.raises(GraphError):
        permute(path_graph(3), [0, 0, 1])


def test_erdos_renyi_two_nodes_forced_edge():
    g = erdos_renyi_connected(2, 0.999, np.random.default_rng(0))
    assert g.edges == [(0, 1)]


def test_erdos_renyi_is_seeded_and_connected():
    a = erdos_renyi_connected(6, 0.5, np.random.default_rng(7))
    b = erdos_renyi_connected(6, 0.5, np.random.default_rng(7))
    assert a == b and a.is_connected()


def test_erdos_renyi_budget_exhausted():
    with pytest.raises(ConnectivityError, match="attempts"):
        erdos_renyi_connected(10, 0.01, np.random.default_rng(0), max_attempts=5)
