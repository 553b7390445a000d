"""
The chronological co-occurrence multigraph and its matrix views.

Nodes are characters in order of first appearance; the multiplicity of a pair
is the number of scenes the two characters share.
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Set, Tuple

import networkx as nx
import numpy as np

from .corpus import SceneSequence
from .errors import ParameterError, UnknownNodeError

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


class NodeInfo(NamedTuple):
    name: str
    appearance_index: int
    scene_count: int


class ChronoMultigraph:
    """
    Undirected, loop-free multigraph with nodes in order of first appearance.

    Backed by a networkx Graph whose node insertion order is the appearance
    order, with a ``scene_count`` node attribute and the pair multiplicity in
    the ``weight`` edge attribute. Instances are not mutated after
    construction; every transform returns a new graph.
    """

    def __init__(self, graph: nx.Graph):
        if graph.is_directed() or graph.is_multigraph():
            raise ValueError("ChronoMultigraph expects an undirected nx.Graph")
        if nx.number_of_selfloops(graph):
            raise ValueError("Self-loops are not allowed")
        for u, v, weight in graph.edges(data="weight"):
            if not isinstance(weight, (int, np.integer)) or weight < 1:
                raise ValueError(f"Multiplicity of {u!r}-{v!r} must be a positive integer")
        self._graph = nx.freeze(graph)
        self._index: Dict[str, int] = {name: i for i, name in enumerate(graph.nodes)}

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "ChronoMultigraph":
        """
        Build a simple graph on nodes named "0".."n-1".

        Each edge is read as one two-character scene, so the scene count of
        a node equals its degree. An isolated node has one solo scene.
        """
        graph = nx.Graph()
        graph.add_nodes_from(str(i) for i in range(n))
        graph.add_edges_from((str(u), str(v)) for u, v in edges if u != v)
        nx.set_edge_attributes(graph, 1, "weight")
        for name, deg in graph.degree():
            graph.nodes[name]["scene_count"] = max(deg, 1)
        return cls(graph)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "ChronoMultigraph":
        """Adopt a generated networkx graph with integer nodes 0..n-1."""
        ordered = sorted(graph.nodes)
        if ordered != list(range(len(ordered))):
            raise ValueError("Generated graphs must use nodes 0..n-1")
        return cls.from_edges(len(ordered), graph.edges)

    def __repr__(self) -> str:
        return (
            f"ChronoMultigraph(nodes={self.number_of_nodes}, edges={self.number_of_edges}, "
            f"multiplicity={self.total_multiplicity})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChronoMultigraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    @property
    def view(self) -> nx.Graph:
        """The frozen backing graph (multiplicities in ``weight``)."""
        return self._graph

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._index)

    @property
    def names(self) -> List[str]:
        return list(self._index)

    @property
    def nodes(self) -> List[NodeInfo]:
        return [
            NodeInfo(name, i, self._graph.nodes[name].get("scene_count", 0))
            for name, i in self._index.items()
        ]

    @property
    def edges(self) -> Dict[Pair, int]:
        """Pair -> multiplicity, pairs and keys ordered by appearance index."""
        pairs = []
        for u, v, weight in self._graph.edges(data="weight"):
            if self._index[u] > self._index[v]:
                u, v = v, u
            pairs.append(((u, v), int(weight)))
        pairs.sort(key=lambda item: (self._index[item[0][0]], self._index[item[0][1]]))
        return dict(pairs)

    @property
    def number_of_nodes(self) -> int:
        return len(self._index)

    @property
    def number_of_edges(self) -> int:
        """Number of distinct connected pairs (simple edges)."""
        return self._graph.number_of_edges()

    @property
    def total_multiplicity(self) -> int:
        return int(self._graph.size(weight="weight"))

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownNodeError([name]) from None

    def scene_count(self, name: str) -> int:
        self.index_of(name)
        return self._graph.nodes[name].get("scene_count", 0)

    def multiplicity(self, u: str, v: str) -> int:
        self.index_of(u)
        self.index_of(v)
        data = self._graph.get_edge_data(u, v)
        return int(data["weight"]) if data else 0

    def neighbors(self, name: str) -> List[str]:
        self.index_of(name)
        return sorted(self._graph.neighbors(name), key=self._index.__getitem__)

    def check_names(self, names: Iterable[str]) -> List[str]:
        """Return names as a list, raising UnknownNodeError listing all offenders."""
        names = list(names)
        unknown = [name for name in dict.fromkeys(names) if name not in self._index]
        if unknown:
            raise UnknownNodeError(unknown)
        return names

    def induced(self, names: Iterable[str]) -> "ChronoMultigraph":
        """Induced multigraph on names; appearance order kept and re-ranked."""
        keep = set(self.check_names(names))
        graph = nx.Graph()
        graph.add_nodes_from(
            (name, dict(self._graph.nodes[name])) for name in self._index if name in keep
        )
        graph.add_edges_from(
            (u, v, {"weight": weight})
            for u, v, weight in self._graph.edges(data="weight")
            if u in keep and v in keep
        )
        return ChronoMultigraph(graph)

    def scaled(self, factor: int) -> "ChronoMultigraph":
        """Copy with every multiplicity multiplied by a positive integer."""
        if factor < 1:
            raise ParameterError("Scale factor must be a positive integer")
        graph = self._graph.copy()
        for _, _, data in graph.edges(data=True):
            data["weight"] *= factor
        return ChronoMultigraph(graph)

    def to_networkx(self, weighted: bool = True) -> nx.Graph:
        """
        Copy as a networkx Graph with appearance_index/scene_count node data.

        Args:
            weighted: Keep multiplicities as ``weight``; otherwise every edge
                has weight 1

        Returns:
            A new nx.Graph, nodes in appearance order
        """
        graph = nx.Graph()
        for info in self.nodes:
            graph.add_node(
                info.name, appearance_index=info.appearance_index, scene_count=info.scene_count
            )
        for (u, v), weight in self.edges.items():
            graph.add_edge(u, v, weight=weight if weighted else 1)
        return graph


def build_network(seq: SceneSequence) -> ChronoMultigraph:
    """
    Build the co-occurrence multigraph of a scene sequence.

    Every new character becomes a node, in order of first appearance (ties
    inside a scene follow the within-scene order). Every pair sharing a scene
    gets one more unit of multiplicity.

    Args:
        seq: Parsed, alias-resolved scenes

    Returns:
        The chronological multigraph
    """
    if not len(seq):
        raise ParameterError("Cannot build a network from zero scenes")

    graph = nx.Graph()
    for scene in seq:
        scene = tuple(dict.fromkeys(scene))
        for name in scene:
            if name in graph:
                graph.nodes[name]["scene_count"] += 1
            else:
                graph.add_node(name, scene_count=1)
        for u, v in itertools.combinations(scene, 2):
            if graph.has_edge(u, v):
                graph[u][v]["weight"] += 1
            else:
                graph.add_edge(u, v, weight=1)

    network = ChronoMultigraph(graph)
    logger.info(
        f"Built network from {len(seq)} scenes: {network.number_of_nodes} characters, "
        f"{network.number_of_edges} links, total multiplicity {network.total_multiplicity}"
    )
    return network


def adjacency(g: ChronoMultigraph, weighted: bool = True) -> np.ndarray:
    """Symmetric, zero-diagonal adjacency matrix in appearance order."""
    return nx.to_numpy_array(
        g.view,
        nodelist=g.names,
        weight="weight" if weighted else None,
        dtype=np.int64,
    )


def degree(g: ChronoMultigraph, node: str, weighted: bool = False) -> int:
    """
    Degree of a character.

    Args:
        g: The network
        node: Character name
        weighted: Sum multiplicities instead of counting distinct neighbours

    Returns:
        The degree (the matching adjacency row sum)
    """
    g.index_of(node)
    if weighted:
        return int(g.view.degree(node, weight="weight"))
    return int(g.view.degree(node))


def degrees(g: ChronoMultigraph, weighted: bool = False) -> List[int]:
    """Degrees of all characters in appearance order."""
    weight = "weight" if weighted else None
    return [int(d) for _, d in g.view.degree(g.names, weight=weight)]


def simple_view(g: ChronoMultigraph) -> ChronoMultigraph:
    """Copy with every multiplicity clamped to 1."""
    return ChronoMultigraph(g.to_networkx(weighted=False))


def collaboration_weights(g: ChronoMultigraph) -> Dict[Pair, Fraction]:
    """Collaboration-distance weights: n shared scenes give weight 1/n."""
    return {pair: Fraction(1, multiplicity) for pair, multiplicity in g.edges.items()}


def connected_components(g: ChronoMultigraph) -> List[Set[str]]:
    """Maximal connected node sets, ordered by their earliest character."""
    components = [set(c) for c in nx.connected_components(g.view)]
    components.sort(key=lambda c: min(g.index_of(name) for name in c))
    return components
