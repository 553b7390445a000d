"""
Louvain community detection and modularity scoring.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from .errors import ParameterError
from .graph import ChronoMultigraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    """
    Node -> community id, ids 0..c-1 numbered by each community's earliest
    character. ``trace`` holds the modularity after every Louvain pass.
    """

    assignment: Dict[str, int]
    modularity: float
    trace: Tuple[float, ...] = ()

    @property
    def community_count(self) -> int:
        return len(set(self.assignment.values()))


PartitionLike = Union[Partition, Mapping[str, int], Iterable[Iterable[str]]]


def _as_communities(g: ChronoMultigraph, partition: PartitionLike) -> List[Set[str]]:
    if isinstance(partition, Partition):
        partition = partition.assignment
    if isinstance(partition, Mapping):
        groups: Dict[int, Set[str]] = {}
        for name, community in partition.items():
            groups.setdefault(community, set()).add(name)
        communities = list(groups.values())
    else:
        communities = [set(c) for c in partition]

    covered = [name for c in communities for name in c]
    g.check_names(covered)
    if len(covered) != len(set(covered)) or set(covered) != set(g.names):
        raise ParameterError("Partition must assign every node exactly once")
    return communities


def _weighted_graph(g: ChronoMultigraph, weighted: bool) -> nx.Graph:
    return g.view if weighted else g.to_networkx(weighted=False)


def modularity(
    g: ChronoMultigraph,
    partition: PartitionLike,
    weighted: bool = True,
    resolution: float = 1.0,
) -> Optional[float]:
    """
    Newman–Girvan modularity of a partition.

    Args:
        g: The network
        partition: A Partition, a node -> community mapping or node sets
        weighted: Use multiplicities as edge weights (otherwise binary)
        resolution: Resolution parameter, 1.0 for classic modularity

    Returns:
        Q, or None for a graph without edges
    """
    communities = _as_communities(g, partition)
    if not g.number_of_edges:
        return None
    return float(
        nx.community.modularity(
            _weighted_graph(g, weighted), communities, weight="weight", resolution=resolution
        )
    )


def _renumber(g: ChronoMultigraph, communities: Sequence[Set[str]]) -> Dict[str, int]:
    ordered = sorted(communities, key=lambda c: min(g.index_of(name) for name in c))
    assignment = {name: cid for cid, c in enumerate(ordered) for name in c}
    return {name: assignment[name] for name in g.names}


def louvain(
    g: ChronoMultigraph,
    weighted: bool = True,
    resolution: float = 1.0,
    seed: int = 0,
) -> Partition:
    """
    Two-phase Louvain modularity maximisation.

    Local moving and aggregation repeat until a pass brings no gain. The node
    visit order is shuffled by ``seed``, so runs are reproducible.

    Args:
        g: The network (at least one edge)
        weighted: Cluster on multiplicities (default) or the binary graph
        resolution: Positive resolution parameter
        seed: Seed for the node-order shuffle

    Returns:
        The final partition with its modularity and per-pass trace
    """
    if not g.number_of_edges:
        raise ParameterError("no edges to cluster")
    if resolution <= 0:
        raise ParameterError(f"resolution must be positive, got {resolution}")

    graph = _weighted_graph(g, weighted)
    trace: List[float] = []
    communities: List[Set[str]] = [{name} for name in g.names]
    for level in nx.community.louvain_partitions(
        graph, weight="weight", resolution=resolution, seed=seed
    ):
        communities = [set(c) for c in level]
        q = modularity(g, communities, weighted=weighted, resolution=resolution)
        trace.append(q if q is not None else 0.0)
        logger.debug(
            f"Louvain pass {len(trace)}: {len(communities)} communities, Q={trace[-1]:.6f}"
        )

    assignment = _renumber(g, communities)
    final_q = modularity(g, assignment, weighted=weighted, resolution=resolution)
    partition = Partition(assignment, final_q if final_q is not None else 0.0, tuple(trace))
    logger.info(
        f"Louvain found {partition.community_count} communities, Q={partition.modularity:.6f}"
    )
    return partition


def partition_communities(partition: Partition) -> List[List[str]]:
    """Members of each community, in community-id then assignment order."""
    members: List[List[str]] = [[] for _ in range(partition.community_count)]
    for name, cid in partition.assignment.items():
        members[cid].append(name)
    return members
