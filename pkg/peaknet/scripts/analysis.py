"""
Core–periphery experiments on chronological networks.

Characters up to and including the pivot (the protagonist) form the BC
("before Cooper") block, the rest the AD ("after Dale") block.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Set, Tuple

import networkx as nx
import numpy as np
from scipy import stats as scipy_stats

from .. import __version__
from .errors import ParameterError
from .graph import ChronoMultigraph, connected_components
from .stats import DegreeDistribution, assortativity, degree_distribution, density, top_k

logger = logging.getLogger(__name__)

DCE_SCHEMA_VERSION = 1
SCAN_METHODS = ("correlation", "density")


@dataclass(frozen=True)
class SplitSpec:
    """Pivot index; the pivot itself belongs to the first (BC) block."""

    pivot_index: int

    @classmethod
    def from_name(cls, g: ChronoMultigraph, name: str) -> "SplitSpec":
        return cls(g.index_of(name))

    def validate(self, g: ChronoMultigraph) -> None:
        if not 0 <= self.pivot_index < g.number_of_nodes:
            raise ParameterError(
                f"Pivot {self.pivot_index} outside [0, {g.number_of_nodes - 1}]"
            )

    def blocks(self, g: ChronoMultigraph) -> Tuple[List[str], List[str]]:
        """(BC names, AD names) in appearance order."""
        self.validate(g)
        names = g.names
        return names[: self.pivot_index + 1], names[self.pivot_index + 1 :]


class SplitResult(NamedTuple):
    core: ChronoMultigraph
    periphery: Tuple[str, ...]
    cross_edges: int
    cross_multiplicity: int
    periphery_edges: int
    periphery_multiplicity: int


@dataclass(frozen=True)
class DceThresholds:
    assortativity_tolerance: float = 0.1


@dataclass(frozen=True)
class DceReport:
    pivot_index: int
    pivot_name: str
    core_size: int
    periphery_size: int
    d_bb: Fraction
    d_aa: Fraction
    d_cross: Fraction
    edges_full: int
    edges_core: int
    edge_scaling: Optional[float]
    r_full: Optional[float]
    r_core: Optional[float]
    verdict: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": DCE_SCHEMA_VERSION,
            "tool_version": __version__,
            "pivot_index": self.pivot_index,
            "pivot_name": self.pivot_name,
            "core_size": self.core_size,
            "periphery_size": self.periphery_size,
            "density_core": self.d_bb,
            "density_periphery": self.d_aa,
            "density_cross": self.d_cross,
            "edges_full": self.edges_full,
            "edges_core": self.edges_core,
            "edge_scaling": self.edge_scaling,
            "assortativity_full": self.r_full,
            "assortativity_core": self.r_core,
            "verdict": self.verdict,
        }


class PivotScan(NamedTuple):
    best_pivot: int
    scores: Tuple[float, ...]

    @property
    def pivots(self) -> range:
        return range(1, len(self.scores) + 1)


class PruneResult(NamedTuple):
    graph: ChronoMultigraph
    removed: Tuple[str, ...]
    removed_indices: Tuple[int, ...]

    def by_block(self, spec: SplitSpec) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        """Removed names (before or at the pivot, after the pivot)."""
        pairs = list(zip(self.removed, self.removed_indices))
        return (
            tuple(name for name, i in pairs if i <= spec.pivot_index),
            tuple(name for name, i in pairs if i > spec.pivot_index),
        )


class CollapseResult(NamedTuple):
    removed_node: str
    distance_before: float
    distance_after: float


class RemovalReport(NamedTuple):
    graph: ChronoMultigraph
    removed: Tuple[str, ...]
    components: List[Set[str]]
    isolated: Tuple[str, ...]
    central: Optional[str]

    def to_dict(self) -> Dict[str, Any]:
        names = self.graph.names
        return {
            "removed": list(self.removed),
            "nodes": self.graph.number_of_nodes,
            "edges": self.graph.number_of_edges,
            "component_count": len(self.components),
            "component_sizes": [len(c) for c in self.components],
            "components": [[n for n in names if n in c] for c in self.components],
            "isolated": list(self.isolated),
            "central": self.central,
        }


def split(g: ChronoMultigraph, spec: SplitSpec) -> SplitResult:
    """
    Split a network at a pivot into the BC core and the AD periphery.

    Args:
        g: The network
        spec: Pivot specification

    Returns:
        The induced core multigraph, the periphery names and the cross and
        periphery-internal counts, as simple edges and as multiplicities
    """
    bc, ad = spec.blocks(g)
    core = g.induced(bc)
    periphery = g.induced(ad)
    return SplitResult(
        core=core,
        periphery=tuple(ad),
        cross_edges=int(nx.cut_size(g.view, bc, ad)) if ad else 0,
        cross_multiplicity=int(nx.cut_size(g.view, bc, ad, weight="weight")) if ad else 0,
        periphery_edges=periphery.number_of_edges,
        periphery_multiplicity=periphery.total_multiplicity,
    )


def dce_verdict(
    d_bb: Fraction,
    d_aa: Fraction,
    d_cross: Fraction,
    r_full: Optional[float],
    r_core: Optional[float],
    thresholds: DceThresholds,
) -> bool:
    """Dense core, sparser cross links, sparsest periphery, disassortative
    whole network around a neutral core."""
    theta = thresholds.assortativity_tolerance
    if r_full is None or r_core is None:
        return False
    return d_bb > d_cross > d_aa and r_full < -theta and abs(r_core) < theta


def dce_report(
    g: ChronoMultigraph, spec: SplitSpec, thresholds: Optional[DceThresholds] = None
) -> DceReport:
    """
    Measure the Dale Cooper Effect for one pivot.

    Densities are read off the simple view; the verdict needs both blocks to
    be non-empty and is otherwise false.
    """
    thresholds = thresholds or DceThresholds()
    result = split(g, spec)
    bc = result.core.names
    ad = list(result.periphery)

    d_bb = density(bc, bc, g)
    d_aa = density(ad, ad, g)
    d_cross = density(bc, ad, g)
    r_full = assortativity(g)
    r_core = assortativity(result.core)
    edges_core = result.core.number_of_edges

    verdict = bool(ad) and dce_verdict(d_bb, d_aa, d_cross, r_full, r_core, thresholds)
    report = DceReport(
        pivot_index=spec.pivot_index,
        pivot_name=g.names[spec.pivot_index],
        core_size=len(bc),
        periphery_size=len(ad),
        d_bb=d_bb,
        d_aa=d_aa,
        d_cross=d_cross,
        edges_full=g.number_of_edges,
        edges_core=edges_core,
        edge_scaling=g.number_of_edges / edges_core if edges_core else None,
        r_full=r_full,
        r_core=r_core,
        verdict=verdict,
    )
    logger.info(
        f"DCE at pivot {report.pivot_index} ({report.pivot_name}): "
        f"d_BB={float(d_bb):.4f} d_cross={float(d_cross):.4f} d_AA={float(d_aa):.4f} "
        f"verdict={verdict}"
    )
    return report


def scan_pivot(g: ChronoMultigraph, method: str = "correlation") -> PivotScan:
    """
    Score every pivot in [1, n-2] and return the best one.

    Methods:
        correlation: phi coefficient between the binary adjacency and the
            ideal pattern "BC x BC linked, every other pair empty", over all
            node pairs (0 where undefined)
        density: d_BB - d_AA

    Args:
        g: The network (at least four nodes)
        method: Contrast to maximise

    Returns:
        The best pivot (ties go to the smallest) and the score per pivot
    """
    n = g.number_of_nodes
    if n < 4:
        raise ParameterError(f"Pivot scan needs at least 4 nodes, got {n}")
    if method not in SCAN_METHODS:
        raise ParameterError(f"Unknown scan method {method!r}, use one of {SCAN_METHODS}")

    earlier = np.zeros(n, dtype=np.float64)
    later = np.zeros(n, dtype=np.float64)
    for u, v in g.view.edges():
        i, j = sorted((g.index_of(u), g.index_of(v)))
        later[i] += 1
        earlier[j] += 1

    # Edges inside the first k+1 nodes, and from them to the rest
    within_prefix = np.cumsum(earlier)
    cross_prefix = np.cumsum(later) - within_prefix

    pivots = np.arange(1, n - 1)
    within = within_prefix[pivots]
    total = float(g.number_of_edges)
    core_size = (pivots + 1).astype(np.float64)
    core_pairs = core_size * (core_size - 1) / 2

    if method == "density":
        rest = n - core_size
        rest_pairs = rest * (rest - 1) / 2
        rest_edges = total - within - cross_prefix[pivots]
        d_rest = np.divide(
            rest_edges, rest_pairs, out=np.zeros_like(rest_pairs), where=rest_pairs > 0
        )
        scores = within / core_pairs - d_rest
    else:
        all_pairs = n * (n - 1) / 2
        numerator = within * all_pairs - core_pairs * total
        denominator = np.sqrt(core_pairs * (all_pairs - core_pairs) * total * (all_pairs - total))
        scores = np.divide(
            numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0
        )

    best = int(pivots[int(np.argmax(scores))])
    logger.debug(f"Pivot scan ({method}): best pivot {best}, score {scores.max():.6f}")
    return PivotScan(best, tuple(float(s) for s in scores))


def prune_single_scene(g: ChronoMultigraph) -> PruneResult:
    """
    Remove every character that appears in exactly one scene.

    Scene counts are data, not graph structure: they are never recomputed,
    so pruning twice removes nothing more.
    """
    removed = [info for info in g.nodes if info.scene_count == 1]
    removed_names = {info.name for info in removed}
    pruned = g.induced(name for name in g.names if name not in removed_names)
    logger.info(f"Pruned {len(removed)} single-scene characters, {pruned.number_of_nodes} remain")
    return PruneResult(
        pruned,
        tuple(info.name for info in removed),
        tuple(info.appearance_index for info in removed),
    )


def remove_nodes(g: ChronoMultigraph, names: Iterable[str]) -> ChronoMultigraph:
    """
    Induced multigraph on everything except names.

    Raises:
        UnknownNodeError: Listing every name not in the graph
    """
    drop = set(g.check_names(names))
    return g.induced(name for name in g.names if name not in drop)


def distribution_distance(a: DegreeDistribution, b: DegreeDistribution) -> float:
    """
    Kolmogorov–Smirnov distance: the largest CCDF gap over both supports.
    """
    if not a.n or not b.n:
        raise ParameterError("Both distributions must be non-empty")
    return float(scipy_stats.ks_2samp(a.degrees, b.degrees, method="asymp").statistic)


def collapse_experiment(g: ChronoMultigraph, spec: SplitSpec) -> CollapseResult:
    """
    Prune, drop the most connected remaining character, and compare each
    stage's degree distribution with the BC core's.

    Returns:
        The removed character and the KS distances to the core before and
        after its removal
    """
    core_dist = degree_distribution(split(g, spec).core)
    pruned = prune_single_scene(g).graph
    if pruned.number_of_nodes < 2:
        raise ParameterError("Pruning left fewer than two characters")

    hub = top_k(pruned, 1).top_nodes[0][0]
    reduced = remove_nodes(pruned, [hub])
    result = CollapseResult(
        hub,
        distribution_distance(degree_distribution(pruned), core_dist),
        distribution_distance(degree_distribution(reduced), core_dist),
    )
    logger.info(
        f"Collapse: removing {hub} moves KS distance to core from "
        f"{result.distance_before:.4f} to {result.distance_after:.4f}"
    )
    return result


def removal_report(g: ChronoMultigraph, names: Iterable[str]) -> RemovalReport:
    """
    Remove characters and describe what holds the rest together.

    The central character is the most connected one in the largest
    remaining component.
    """
    names = g.check_names(names)
    reduced = remove_nodes(g, names)
    components = connected_components(reduced)
    isolated = tuple(name for c in components if len(c) == 1 for name in c)

    central = None
    if components and reduced.number_of_edges:
        largest = max(components, key=len)
        central = top_k(reduced.induced(largest), 1).top_nodes[0][0]

    logger.info(
        f"Removed {len(set(names))} characters: {len(components)} components, "
        f"{len(isolated)} isolated, central character {central}"
    )
    return RemovalReport(reduced, tuple(dict.fromkeys(names)), components, isolated, central)
