"""
Tests for graph.py
"""

import itertools
import random
from collections import Counter
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from peaknet.scripts.corpus import SceneSequence, parse_scenes
from peaknet.scripts.errors import ParameterError, UnknownNodeError
from peaknet.scripts.graph import (
    ChronoMultigraph,
    adjacency,
    build_network,
    collaboration_weights,
    connected_components,
    degree,
    degrees,
    simple_view,
)


def network(text: str) -> ChronoMultigraph:
    return build_network(parse_scenes(text).sequence)


def random_sequence(rng: random.Random) -> SceneSequence:
    cast = [f"c{i}" for i in range(12)]
    scenes = []
    for _ in range(rng.randint(1, 20)):
        size = rng.randint(1, 8)
        scenes.append(tuple(rng.sample(cast, size)))
    return SceneSequence(tuple(scenes))


def test_build_network_two_scenes():
    """Test multiplicities, order and scene counts for 'A|B', 'A|B|C'."""
    g = network("A|B\nA|B|C\n")
    assert g.names == ["A", "B", "C"]
    assert g.edges == {("A", "B"): 2, ("A", "C"): 1, ("B", "C"): 1}
    assert [info.scene_count for info in g.nodes] == [2, 2, 1]
    assert g.number_of_edges == 3
    assert g.total_multiplicity == 4


def test_build_network_order_within_scene():
    """Test that new characters in one scene keep their written order."""
    g = network("B|A\nC|D|A\n")
    assert g.names == ["B", "A", "C", "D"]
    assert [info.appearance_index for info in g.nodes] == [0, 1, 2, 3]


def test_build_network_single_character_scenes():
    """Test that one-character scenes add nodes but no edges."""
    g = network("A\nB\nA\n")
    assert g.names == ["A", "B"]
    assert g.number_of_edges == 0
    assert g.scene_count("A") == 2


def test_build_network_empty_sequence():
    """Test that zero scenes are rejected."""
    with pytest.raises(ParameterError):
        build_network(SceneSequence(()))


def test_build_network_matches_pair_counting_oracle():
    """Test 500 random sequences against a naive per-pair count."""
    rng = random.Random(500)
    for _ in range(500):
        seq = random_sequence(rng)
        g = build_network(seq)

        expected = Counter()
        for scene in seq:
            for u, v in itertools.combinations(scene, 2):
                expected[frozenset((u, v))] += 1
        actual = {frozenset(pair): m for pair, m in g.edges.items()}

        assert actual == dict(expected)
        assert g.total_multiplicity == sum(len(s) * (len(s) - 1) // 2 for s in seq)
        assert g.names == seq.characters
        assert [info.scene_count for info in g.nodes] == [
            sum(name in scene for scene in seq) for name in g.names
        ]


def test_build_network_scene_order_only_changes_node_order():
    """Test that permuted scenes give the same multigraph up to node order."""
    rng = random.Random(21)
    edge_match = nx.algorithms.isomorphism.numerical_edge_match("weight", 1)
    node_match = nx.algorithms.isomorphism.numerical_node_match("scene_count", 1)
    for _ in range(100):
        seq = random_sequence(rng)
        scenes = list(seq.scenes)
        rng.shuffle(scenes)
        g = build_network(seq)
        shuffled = build_network(SceneSequence(tuple(scenes)))

        assert sorted(shuffled.names) == sorted(g.names)
        assert {frozenset(p): m for p, m in shuffled.edges.items()} == {
            frozenset(p): m for p, m in g.edges.items()
        }
        assert nx.is_isomorphic(
            g.view, shuffled.view, node_match=node_match, edge_match=edge_match
        )


def test_adjacency_is_symmetric_with_zero_diagonal():
    """Test the matrix views and their row sums."""
    rng = random.Random(7)
    for _ in range(50):
        g = build_network(random_sequence(rng))
        weighted = adjacency(g)
        binary = adjacency(g, weighted=False)

        assert np.array_equal(weighted, weighted.T)
        assert not np.diag(weighted).any()
        assert set(np.unique(binary)) <= {0, 1}
        assert list(weighted.sum(axis=1)) == degrees(g, weighted=True)
        assert list(binary.sum(axis=1)) == degrees(g)


def test_degree():
    """Test weighted and unweighted degree of one node."""
    g = network("A|B\nA|B|C\n")
    assert degree(g, "A") == 2
    assert degree(g, "A", weighted=True) == 3
    with pytest.raises(UnknownNodeError):
        degree(g, "Z")


def test_simple_view_and_collaboration_weights():
    """Test that the simple view clamps multiplicities."""
    g = network("A|B\nA|B|C\nA|B\n")
    assert simple_view(g).edges == {("A", "B"): 1, ("A", "C"): 1, ("B", "C"): 1}
    assert simple_view(g).names == g.names
    assert collaboration_weights(g)[("A", "B")] == Fraction(1, 3)


def test_induced_keeps_order_and_multiplicity():
    """Test the induced multigraph on a subset of names."""
    g = network("A|B|C\nB|C\nC|D\n")
    sub = g.induced(["D", "B", "C"])
    assert sub.names == ["B", "C", "D"]
    assert sub.edges == {("B", "C"): 2, ("C", "D"): 1}
    assert sub.scene_count("C") == 3


def test_induced_unknown_names():
    """Test that every unknown name is reported."""
    g = network("A|B\n")
    with pytest.raises(UnknownNodeError) as exc:
        g.induced(["A", "X", "Y"])
    assert exc.value.names == ("X", "Y")
    assert "X" in str(exc.value)


def test_scaled():
    """Test uniform multiplicity scaling."""
    g = network("A|B\nA|B|C\n")
    assert g.scaled(3).edges == {("A", "B"): 6, ("A", "C"): 3, ("B", "C"): 3}
    with pytest.raises(ParameterError):
        g.scaled(0)


def test_connected_components_order():
    """Test components ordered by their earliest character."""
    g = network("A|B\nC|D\nE\nB|F\n")
    assert connected_components(g) == [{"A", "B", "F"}, {"C", "D"}, {"E"}]


def test_graph_is_frozen():
    """Test that the backing graph cannot be mutated."""
    g = network("A|B\n")
    with pytest.raises(nx.NetworkXError):
        g.view.add_edge("A", "C")


def test_rejects_self_loops_and_bad_weights():
    """Test construction checks."""
    graph = nx.Graph()
    graph.add_edge("A", "A", weight=1)
    with pytest.raises(ValueError):
        ChronoMultigraph(graph)

    graph = nx.Graph()
    graph.add_edge("A", "B", weight=0)
    with pytest.raises(ValueError):
        ChronoMultigraph(graph)


def test_from_edges():
    """Test building a simple graph from index pairs."""
    g = ChronoMultigraph.from_edges(4, [(0, 1), (1, 2)])
    assert g.names == ["0", "1", "2", "3"]
    assert g.edges == {("0", "1"): 1, ("1", "2"): 1}
    assert [info.scene_count for info in g.nodes] == [1, 2, 1, 1]
    assert ChronoMultigraph.from_networkx(nx.path_graph(3)) == g.induced(["0", "1", "2"])
