"""
Degree statistics: CCDFs, assortativity, densities and top-k reports.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx
import numpy as np
from scipy import stats as scipy_stats

from .. import __version__
from .errors import ParameterError
from .graph import ChronoMultigraph, Pair, degrees

logger = logging.getLogger(__name__)

STATS_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class DegreeDistribution:
    """Degree sequence (appearance order) and its CCDF, P(X > x) for x = 0..max."""

    degrees: Tuple[int, ...]
    ccdf: Tuple[Tuple[int, Fraction], ...]

    @classmethod
    def from_degrees(cls, values: Iterable[int]) -> "DegreeDistribution":
        values = tuple(int(v) for v in values)
        if not values:
            raise ParameterError("A degree distribution needs at least one node")
        if min(values) < 0:
            raise ParameterError("Degrees must be non-negative")

        n = len(values)
        counts = np.bincount(np.asarray(values, dtype=np.int64))
        greater = n - np.cumsum(counts)
        ccdf = tuple((x, Fraction(int(greater[x]), n)) for x in range(len(counts)))
        return cls(values, ccdf)

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def max_degree(self) -> int:
        return len(self.ccdf) - 1

    def ccdf_at(self, x: int) -> Fraction:
        """P(X > x), also outside the stored range."""
        if x < 0:
            return Fraction(1)
        if x > self.max_degree:
            return Fraction(0)
        return self.ccdf[x][1]


class LogLogFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    points: int


@dataclass(frozen=True)
class TopK:
    top_nodes: Tuple[Tuple[str, int], ...]
    top_links: Tuple[Tuple[Pair, int], ...]


def degree_distribution(g: ChronoMultigraph, weighted: bool = False) -> DegreeDistribution:
    """
    Degree distribution of a network.

    Args:
        g: The network (at least one node)
        weighted: Use summed multiplicities instead of distinct neighbours

    Returns:
        Degrees in appearance order with the exact CCDF
    """
    if not g.number_of_nodes:
        raise ParameterError("Cannot take the degree distribution of an empty graph")
    return DegreeDistribution.from_degrees(degrees(g, weighted=weighted))


def loglog_points(dist: DegreeDistribution) -> List[Tuple[int, float]]:
    """CCDF points that survive a log-log plot (x > 0 and p > 0)."""
    return [(x, float(p)) for x, p in dist.ccdf if x > 0 and p > 0]


def loglog_fit(dist: DegreeDistribution, x_min: int = 1, x_max: Optional[int] = None) -> LogLogFit:
    """
    Least-squares line through log10 CCDF against log10 degree.

    Args:
        dist: Degree distribution
        x_min: Smallest degree included
        x_max: Largest degree included (default: max degree)

    Returns:
        Slope, intercept, R² and the number of points used
    """
    points = [
        (x, p)
        for x, p in loglog_points(dist)
        if x >= x_min and (x_max is None or x <= x_max)
    ]
    if len(points) < 2:
        raise ParameterError(f"Need at least two plottable CCDF points in [{x_min}, {x_max}]")

    xs = np.log10([x for x, _ in points])
    ys = np.log10([p for _, p in points])
    result = scipy_stats.linregress(xs, ys)
    return LogLogFit(
        float(result.slope), float(result.intercept), float(result.rvalue**2), len(points)
    )


def assortativity(g: ChronoMultigraph) -> Optional[float]:
    """
    Degree assortativity of the simple view.

    Pearson correlation of unweighted endpoint degrees, every edge counted in
    both orientations.

    Returns:
        The coefficient, or None when there are no edges or all endpoint
        degrees are equal
    """
    if not g.number_of_edges:
        return None

    deg = dict(g.view.degree())
    ends = np.array([(deg[u], deg[v]) for u, v in g.view.edges()], dtype=np.float64)
    x = np.concatenate([ends[:, 0], ends[:, 1]])
    y = np.concatenate([ends[:, 1], ends[:, 0]])

    dx = x - x.mean()
    dy = y - y.mean()
    variance = float(np.dot(dx, dx))
    if variance == 0.0:
        return None
    return float(np.clip(np.dot(dx, dy) / variance, -1.0, 1.0))


def top_k(g: ChronoMultigraph, k: int) -> TopK:
    """
    Most connected characters and most repeated links.

    Nodes rank by unweighted degree, links by multiplicity; ties go to the
    earlier appearance index (then the pair's second index).
    """
    if k < 1:
        raise ParameterError(f"k must be a positive integer, got {k}")

    node_degrees = list(zip(g.names, degrees(g)))
    ranked_nodes = sorted(
        enumerate(node_degrees), key=lambda item: (-item[1][1], item[0])
    )
    ranked_links = sorted(
        g.edges.items(),
        key=lambda item: (-item[1], g.index_of(item[0][0]), g.index_of(item[0][1])),
    )
    return TopK(
        tuple(entry for _, entry in ranked_nodes[:k]),
        tuple(ranked_links[:k]),
    )


def density(
    node_set_a: Iterable[str], node_set_b: Iterable[str], g: ChronoMultigraph
) -> Fraction:
    """
    Fraction of possible simple edges present within one set or between two.

    Args:
        node_set_a: First node set
        node_set_b: Second node set, identical to or disjoint from the first
        g: The network

    Returns:
        Edges within / C(|A|, 2) for identical sets, cross edges / (|A|·|B|)
        for disjoint ones; 0 when no pair is possible
    """
    a = set(g.check_names(node_set_a))
    b = set(g.check_names(node_set_b))

    if a == b:
        possible = len(a) * (len(a) - 1) // 2
        present = g.view.subgraph(a).number_of_edges() if possible else 0
    elif a & b:
        raise ParameterError("Density needs identical or disjoint node sets")
    else:
        possible = len(a) * len(b)
        present = int(nx.cut_size(g.view, a, b)) if possible else 0

    return Fraction(present, possible) if possible else Fraction(0)


def stats_report(g: ChronoMultigraph, k: int = 5, weighted: bool = False) -> Dict[str, Any]:
    """Collect the per-network statistics into one JSON-ready report."""
    ranks = top_k(g, k)
    dist = degree_distribution(g, weighted=weighted) if g.number_of_nodes else None
    r = assortativity(g)
    logger.info(
        f"Stats: {g.number_of_nodes} nodes, {g.number_of_edges} edges, assortativity "
        f"{'undefined' if r is None else f'{r:.4f}'}"
    )
    return {
        "schema_version": STATS_SCHEMA_VERSION,
        "tool_version": __version__,
        "nodes": g.number_of_nodes,
        "edges": g.number_of_edges,
        "total_multiplicity": g.total_multiplicity,
        "weighted_degrees": weighted,
        "degrees": dict(zip(g.names, dist.degrees)) if dist else {},
        "mean_degree": _mean(dist.degrees) if dist else None,
        "density": density(g.names, g.names, g),
        "assortativity": r,
        "top_nodes": [{"name": name, "degree": d} for name, d in ranks.top_nodes],
        "top_links": [
            {"pair": list(pair), "multiplicity": m} for pair, m in ranks.top_links
        ],
    }


def _mean(values: Tuple[int, ...]) -> float:
    return math.fsum(values) / len(values)
