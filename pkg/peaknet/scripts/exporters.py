"""
Render networks and reports as text artifacts.

Renderers return strings; writing to disk is left to the caller so a run can
write everything at once. Every artifact ends with a newline and names the
tool version (a header comment, a GraphML graph attribute or a JSON field).
"""

import csv
import io
import json
import logging
import os
from fractions import Fraction
from typing import Any, Iterable, List, Mapping, Optional, Sequence

import networkx as nx
import pydot

from .. import __version__
from .analysis import PivotScan
from .community import Partition
from .graph import ChronoMultigraph, adjacency
from .stats import DegreeDistribution, TopK, loglog_points

logger = logging.getLogger(__name__)

DECIMALS = 6
CSV_HEADER = f"# peaknet {__version__}"
DOT_HEADER = f"// peaknet {__version__}"

# Fill colours cycled over community ids
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


def format_number(value: Any) -> str:
    """Integers as-is, everything numeric else with six fixed decimals."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (float, Fraction)):
        return f"{float(value):.{DECIMALS}f}"
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Recursively convert Fractions, tuples and floats for json.dumps."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (float, Fraction)):
        return round(float(value), DECIMALS)
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return to_jsonable(value.item())
    raise TypeError(f"Cannot serialise {type(value).__name__} to JSON")


def render_json(report: Mapping[str, Any]) -> str:
    return json.dumps(to_jsonable(report), indent=2, allow_nan=False) + "\n"


def _render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    buffer.write(CSV_HEADER + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(cell) for cell in row])
    return buffer.getvalue()


def render_matrix_csv(g: ChronoMultigraph, weighted: bool = True) -> str:
    """Adjacency matrix with node names as header row and first column."""
    names = g.names
    matrix = adjacency(g, weighted=weighted)
    return _render_csv(
        [""] + names,
        ([name] + [int(v) for v in matrix[i]] for i, name in enumerate(names)),
    )


def render_ccdf_csv(dist: DegreeDistribution, loglog: bool = False) -> str:
    """
    Two-column CCDF table.

    Args:
        dist: Degree distribution
        loglog: Keep only the points a log-log plot can show

    Returns:
        CSV text with columns x, p
    """
    points = loglog_points(dist) if loglog else list(dist.ccdf)
    return _render_csv(["x", "p"], points)


def render_topk_csv(ranks: TopK) -> str:
    rows = []
    for rank, (name, deg) in enumerate(ranks.top_nodes, start=1):
        rows.append(["node", rank, name, "", deg])
    for rank, ((u, v), multiplicity) in enumerate(ranks.top_links, start=1):
        rows.append(["link", rank, u, v, multiplicity])
    return _render_csv(["kind", "rank", "name", "other", "value"], rows)


def render_partition_csv(partition: Partition) -> str:
    return _render_csv(["name", "community"], partition.assignment.items())


def render_pivot_scan_csv(g: ChronoMultigraph, scan: PivotScan) -> str:
    names = g.names
    return _render_csv(
        ["pivot", "name", "score"],
        ([pivot, names[pivot], score] for pivot, score in zip(scan.pivots, scan.scores)),
    )


def render_graphml(g: ChronoMultigraph, weighted: bool = True) -> str:
    """
    GraphML with appearance_index and scene_count on nodes and the
    multiplicity (1 in the simple view) as edge ``weight``.
    """
    graph = g.to_networkx(weighted=weighted)
    graph.graph["tool_version"] = __version__
    graph.graph["view"] = "weighted" if weighted else "simple"
    return "\n".join(nx.generate_graphml(graph)) + "\n"


def _dot_graph(g: ChronoMultigraph, weighted: bool, partition: Optional[Partition]) -> pydot.Dot:
    dot = pydot.Dot("peaknet", graph_type="graph")
    for info in g.nodes:
        attrs = {"label": info.name, "scene_count": str(info.scene_count)}
        if partition is not None:
            community = partition.assignment[info.name]
            attrs.update(
                community=str(community),
                style="filled",
                fillcolor=PALETTE[community % len(PALETTE)],
            )
        dot.add_node(pydot.Node(f"n{info.appearance_index}", **attrs))
    for (u, v), multiplicity in g.edges.items():
        dot.add_edge(
            pydot.Edge(
                f"n{g.index_of(u)}",
                f"n{g.index_of(v)}",
                weight=str(multiplicity if weighted else 1),
            )
        )
    return dot


def render_dot(
    g: ChronoMultigraph, weighted: bool = True, partition: Optional[Partition] = None
) -> str:
    """
    DOT text; nodes are keyed by appearance index and labelled with names.

    Args:
        g: The network
        weighted: Emit multiplicities as ``weight`` (otherwise 1)
        partition: Colour nodes by community when given

    Returns:
        DOT source with a version comment on the first line
    """
    body = _dot_graph(g, weighted, partition).to_string().rstrip("\n")
    return f"{DOT_HEADER}\n{body}\n"


def write_artifacts(artifacts: Mapping[str, str], output_dir: str) -> List[str]:
    """
    Write rendered artifacts; on failure remove what this call wrote.

    Args:
        artifacts: File name -> content
        output_dir: Existing output directory

    Returns:
        Paths written, in the given order
    """
    written: List[str] = []
    try:
        for name, content in artifacts.items():
            path = os.path.join(output_dir, name)
            written.append(path)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(content)
            logger.info(f"Wrote {path}")
    except OSError:
        for path in written:
            try:
                os.remove(path)
            except FileNotFoundError:
                pass
            except OSError:
                logger.warning(f"Could not remove partial output {path}")
        raise
    return written
