"""
peaknet command line: scenes -> network -> analysis -> artifacts.

Every subcommand renders its artifacts in memory; they are written together
at the end of the run.
"""

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

try:
    from .. import __version__
    from .analysis import (
        DceThresholds,
        SplitSpec,
        collapse_experiment,
        dce_report,
        distribution_distance,
        prune_single_scene,
        removal_report,
        scan_pivot,
        split,
    )
    from .community import louvain, partition_communities
    from .config import Defaults, load_defaults
    from .corpus import load_node_list, load_scenes
    from .errors import ParameterError, PeaknetError
    from .exporters import (
        render_ccdf_csv,
        render_dot,
        render_graphml,
        render_json,
        render_matrix_csv,
        render_partition_csv,
        render_pivot_scan_csv,
        render_topk_csv,
        write_artifacts,
    )
    from .graph import ChronoMultigraph, build_network
    from .models import BaParams, ErParams, Params, SplicedParams, generate, seed_sweep
    from .stats import assortativity, degree_distribution, loglog_fit, stats_report, top_k
except ImportError:
    # For when the module is run directly
    sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))
    from peaknet import __version__  # type: ignore
    from peaknet.scripts.analysis import (  # type: ignore
        DceThresholds,
        SplitSpec,
        collapse_experiment,
        dce_report,
        distribution_distance,
        prune_single_scene,
        removal_report,
        scan_pivot,
        split,
    )
    from peaknet.scripts.community import louvain, partition_communities  # type: ignore
    from peaknet.scripts.config import Defaults, load_defaults  # type: ignore
    from peaknet.scripts.corpus import load_node_list, load_scenes  # type: ignore
    from peaknet.scripts.errors import ParameterError, PeaknetError  # type: ignore
    from peaknet.scripts.exporters import (  # type: ignore
        render_ccdf_csv,
        render_dot,
        render_graphml,
        render_json,
        render_matrix_csv,
        render_partition_csv,
        render_pivot_scan_csv,
        render_topk_csv,
        write_artifacts,
    )
    from peaknet.scripts.graph import ChronoMultigraph, build_network  # type: ignore
    from peaknet.scripts.models import (  # type: ignore
        BaParams,
        ErParams,
        Params,
        SplicedParams,
        generate,
        seed_sweep,
    )
    from peaknet.scripts.stats import (  # type: ignore
        assortativity,
        degree_distribution,
        loglog_fit,
        stats_report,
        top_k,
    )

# Setup logging
logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1

Artifacts = Dict[str, str]


@dataclass(frozen=True)
class RunConfig:
    """One fully resolved invocation: defaults, ini, environment and flags merged."""

    subcommand: str
    output_dir: str = "."
    scenes: Optional[str] = None
    aliases: Optional[str] = None
    remove_list: Optional[str] = None
    model: Optional[str] = None
    model_params: Dict[str, Any] = field(default_factory=dict)
    weighted: Optional[bool] = None
    louvain_weighted: bool = True
    resolution: float = 1.0
    tolerance: float = 0.1
    seed: int = 0
    seeds: int = 1
    workers: int = 1
    top_k: int = 5
    pivot: Optional[int] = None
    pivot_name: Optional[str] = None
    method: str = "correlation"
    loglog: bool = False
    fit_range: Optional[Tuple[int, int]] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace, defaults: Defaults) -> "RunConfig":
        """Merge parsed flags over defaults and check the input files exist."""
        for path in (
            getattr(args, "scenes", None),
            getattr(args, "aliases", None),
            getattr(args, "remove_list", None),
        ):
            if path and not os.path.isfile(path):
                raise ParameterError(f"Input file not found: {path}")

        def pick(name: str, default: Any) -> Any:
            value = getattr(args, name, None)
            return default if value is None else value

        model = getattr(args, "model", None)
        model_params = {}
        if model:
            model_params = {
                key: getattr(args, key)
                for key in MODEL_FLAGS[model]
                if getattr(args, key, None) is not None
            }
        fit_range = None
        if model == "ba":
            fit_range = (args.fit_min, args.fit_max)

        config = cls(
            subcommand=args.command,
            output_dir=args.output_dir,
            scenes=getattr(args, "scenes", None),
            aliases=getattr(args, "aliases", None),
            remove_list=getattr(args, "remove_list", None),
            model=model,
            model_params=model_params,
            weighted=getattr(args, "weighted", None),
            louvain_weighted=pick("weighted", defaults.weighted),
            resolution=pick("resolution", defaults.resolution),
            tolerance=pick("tolerance", defaults.assortativity_tolerance),
            seed=pick("seed", defaults.seed),
            seeds=pick("seeds", defaults.seeds),
            workers=pick("workers", defaults.workers),
            top_k=pick("top_k", defaults.top_k),
            pivot=getattr(args, "pivot", None),
            pivot_name=getattr(args, "pivot_name", None),
            method=pick("method", "correlation"),
            loglog=bool(getattr(args, "loglog", False)),
            fit_range=fit_range,
        )
        if config.seeds < 1:
            raise ParameterError(f"--seeds must be at least 1, got {config.seeds}")
        if config.workers < 1:
            raise ParameterError(f"--workers must be at least 1, got {config.workers}")
        return config


def _load_network(config: RunConfig) -> ChronoMultigraph:
    if not config.scenes:
        raise ParameterError(f"{config.subcommand} needs --scenes")
    parsed = load_scenes(config.scenes, config.aliases)
    return build_network(parsed.sequence)


def _resolve_pivot(config: RunConfig, g: ChronoMultigraph) -> Optional[SplitSpec]:
    if config.pivot_name is not None:
        return SplitSpec.from_name(g, config.pivot_name)
    if config.pivot is not None:
        spec = SplitSpec(config.pivot)
        spec.validate(g)
        return spec
    return None


def _header(**fields: Any) -> Dict[str, Any]:
    return {"schema_version": REPORT_SCHEMA_VERSION, "tool_version": __version__, **fields}


def cmd_build(config: RunConfig) -> Artifacts:
    g = _load_network(config)
    return {
        "graph.graphml": render_graphml(g, weighted=True),
        "graph.dot": render_dot(g, weighted=True),
        "simple.graphml": render_graphml(g, weighted=False),
        "simple.dot": render_dot(g, weighted=False),
        "matrix.csv": render_matrix_csv(g, weighted=True),
        "matrix_binary.csv": render_matrix_csv(g, weighted=False),
    }


def cmd_stats(config: RunConfig) -> Artifacts:
    g = _load_network(config)
    weighted = bool(config.weighted)
    return {
        "stats.json": render_json(stats_report(g, k=config.top_k, weighted=weighted)),
        "topk.csv": render_topk_csv(top_k(g, config.top_k)),
    }


def cmd_ccdf(config: RunConfig) -> Artifacts:
    g = _load_network(config)
    dist = degree_distribution(g, weighted=bool(config.weighted))
    return {"ccdf.csv": render_ccdf_csv(dist, loglog=config.loglog)}


def cmd_cluster(config: RunConfig) -> Artifacts:
    g = _load_network(config)
    weighted = config.louvain_weighted
    partition = louvain(g, weighted=weighted, resolution=config.resolution, seed=config.seed)
    communities = partition_communities(partition)
    report = _header(
        seed=config.seed,
        weighted=weighted,
        resolution=config.resolution,
        modularity=partition.modularity,
        trace=list(partition.trace),
        community_count=partition.community_count,
        community_sizes=[len(c) for c in communities],
        communities=communities,
    )
    return {
        "partition.csv": render_partition_csv(partition),
        "clusters.dot": render_dot(g, weighted=weighted, partition=partition),
        "cluster.json": render_json(report),
    }


def cmd_dce(config: RunConfig) -> Artifacts:
    g = _load_network(config)
    spec = _resolve_pivot(config, g)
    scan = scan_pivot(g, method=config.method) if g.number_of_nodes >= 4 else None
    if spec is None:
        if scan is None:
            raise ParameterError("Give --pivot or --pivot-name; a pivot scan needs 4 characters")
        spec = SplitSpec(scan.best_pivot)
        logger.info(f"No pivot given, using scanned pivot {spec.pivot_index}")

    report = dce_report(g, spec, DceThresholds(config.tolerance)).to_dict()
    report["assortativity_tolerance"] = config.tolerance
    if scan is not None:
        report["pivot_scan"] = {
            "method": config.method,
            "best_pivot": scan.best_pivot,
            "best_name": g.names[scan.best_pivot],
        }
    artifacts = {"dce.json": render_json(report)}
    if scan is not None:
        artifacts["pivot_scan.csv"] = render_pivot_scan_csv(g, scan)
    return artifacts


def cmd_prune(config: RunConfig) -> Artifacts:
    g = _load_network(config)
    pruned = prune_single_scene(g)
    report = _header(
        removed=list(pruned.removed),
        removed_count=len(pruned.removed),
        stats=stats_report(pruned.graph, k=config.top_k) if pruned.graph.number_of_nodes else None,
    )

    spec = _resolve_pivot(config, g)
    if spec is not None:
        before, after = pruned.by_block(spec)
        core_dist = degree_distribution(split(g, spec).core)
        report.update(
            pivot_index=spec.pivot_index,
            pivot_name=g.names[spec.pivot_index],
            removed_before_pivot=list(before),
            removed_after_pivot=list(after),
            ks_full_to_core=distribution_distance(degree_distribution(g), core_dist),
            ks_pruned_to_core=(
                distribution_distance(degree_distribution(pruned.graph), core_dist)
                if pruned.graph.number_of_nodes
                else None
            ),
        )
        if pruned.graph.number_of_nodes >= 2:
            collapse = collapse_experiment(g, spec)
            report["collapse"] = {
                "removed_node": collapse.removed_node,
                "distance_before": collapse.distance_before,
                "distance_after": collapse.distance_after,
            }
        else:
            report["collapse"] = None

    return {
        "pruned.graphml": render_graphml(pruned.graph),
        "prune.json": render_json(report),
    }


def cmd_remove(config: RunConfig) -> Artifacts:
    g = _load_network(config)
    if not config.remove_list:
        raise ParameterError("remove needs --remove-list")
    result = removal_report(g, load_node_list(config.remove_list))
    report = _header(**result.to_dict())
    if result.graph.number_of_edges:
        partition = louvain(
            result.graph,
            weighted=config.louvain_weighted,
            resolution=config.resolution,
            seed=config.seed,
        )
        report["louvain"] = {
            "seed": config.seed,
            "modularity": partition.modularity,
            "community_count": partition.community_count,
            "community_sizes": [len(c) for c in partition_communities(partition)],
        }
    else:
        report["louvain"] = None
    return {
        "removed.graphml": render_graphml(result.graph),
        "remove.json": render_json(report),
    }


def simulate_seed(
    params: Params,
    tolerance: float = 0.1,
    fit_range: Optional[Tuple[int, int]] = None,
) -> Dict[str, Any]:
    """
    Generate one graph and measure it.

    Args:
        params: Generator params (seed included)
        tolerance: Assortativity tolerance for the DCE verdict (spliced only)
        fit_range: Degree range for a log-log CCDF fit, if wanted

    Returns:
        One per-seed row; ``ccdf`` holds the CCDF values for aggregation
    """
    g = generate(params)
    dist = degree_distribution(g)
    row: Dict[str, Any] = {
        "seed": params.seed,
        "nodes": g.number_of_nodes,
        "edges": g.number_of_edges,
        "mean_degree": 2 * g.number_of_edges / g.number_of_nodes,
        "median_degree": float(np.median(dist.degrees)),
        "assortativity": assortativity(g),
    }
    if isinstance(params, SplicedParams):
        pivot = params.core_n - 1
        report = dce_report(g, SplitSpec(pivot), DceThresholds(tolerance))
        best = scan_pivot(g).best_pivot if g.number_of_nodes >= 4 else None
        row.update(
            assortativity_core=report.r_core,
            verdict=report.verdict,
            best_pivot=best,
            pivot_recovered=best == pivot,
        )
    if fit_range is not None:
        try:
            fit = loglog_fit(dist, *fit_range)
            row.update(loglog_slope=fit.slope, loglog_r_squared=fit.r_squared)
        except ParameterError:
            row.update(loglog_slope=None, loglog_r_squared=None)
    row["ccdf"] = [float(p) for _, p in dist.ccdf]
    return row


def _mean(values: Sequence[float]) -> Optional[float]:
    return math.fsum(values) / len(values) if values else None


def aggregate_rows(rows: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Summarise per-seed rows; removes their ``ccdf`` entries."""
    ccdfs = [row.pop("ccdf") for row in rows]
    width = max(len(c) for c in ccdfs)
    padded = np.zeros((len(ccdfs), width))
    for i, values in enumerate(ccdfs):
        padded[i, : len(values)] = values

    defined = [row["assortativity"] for row in rows if row["assortativity"] is not None]
    summary: Dict[str, Any] = {
        "runs": len(rows),
        "mean_degree": _mean([row["mean_degree"] for row in rows]),
        "median_degree": float(np.median([row["median_degree"] for row in rows])),
        "mean_edges": _mean([row["edges"] for row in rows]),
        "mean_assortativity": _mean(defined),
        "mean_abs_assortativity": _mean([abs(r) for r in defined]),
        "undefined_assortativity": len(rows) - len(defined),
    }
    if "verdict" in rows[0]:
        summary["verdict_rate"] = _mean([float(row["verdict"]) for row in rows])
        summary["pivot_recovery_rate"] = _mean([float(row["pivot_recovered"]) for row in rows])
        core = [row["assortativity_core"] for row in rows if row["assortativity_core"] is not None]
        summary["mean_assortativity_core"] = _mean(core)
    if "loglog_slope" in rows[0]:
        fits = [row for row in rows if row["loglog_slope"] is not None]
        summary["mean_loglog_slope"] = _mean([row["loglog_slope"] for row in fits])
        summary["mean_loglog_r_squared"] = _mean([row["loglog_r_squared"] for row in fits])
    summary["mean_ccdf"] = [[x, float(p)] for x, p in enumerate(padded.mean(axis=0))]
    return summary


MODEL_PARAMS = {"er": ErParams, "ba": BaParams, "spliced": SplicedParams}
MODEL_FLAGS = {
    "er": ("n", "p"),
    "ba": ("n", "m"),
    "spliced": ("core_n", "periphery_n", "core_p", "m", "bias"),
}


def cmd_simulate(config: RunConfig) -> Artifacts:
    params = MODEL_PARAMS[config.model](**config.model_params, seed=config.seed)
    seeds = list(range(config.seed, config.seed + config.seeds))
    task = partial(simulate_seed, tolerance=config.tolerance, fit_range=config.fit_range)
    rows = seed_sweep(task, params, seeds, workers=config.workers)
    summary = aggregate_rows(rows)
    logger.info(
        f"Simulated {config.model} over {len(seeds)} seeds: "
        f"mean degree {summary['mean_degree']:.4f}"
    )
    report = _header(
        model=config.model,
        params={**config.model_params},
        seeds=seeds,
        assortativity_tolerance=config.tolerance,
        runs=rows,
        aggregate=summary,
    )
    if config.fit_range is not None:
        report["fit_range"] = list(config.fit_range)
    return {"simulate.json": render_json(report)}


COMMANDS: Dict[str, Callable[[RunConfig], Artifacts]] = {
    "build": cmd_build,
    "stats": cmd_stats,
    "ccdf": cmd_ccdf,
    "cluster": cmd_cluster,
    "dce": cmd_dce,
    "prune": cmd_prune,
    "remove": cmd_remove,
    "simulate": cmd_simulate,
}


def _add_weighted(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--weighted",
        dest="weighted",
        action="store_true",
        default=None,
        help="Use scene multiplicities as weights.",
    )
    group.add_argument(
        "--binary",
        dest="weighted",
        action="store_false",
        default=None,
        help="Ignore multiplicities.",
    )


def _add_pivot(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--pivot", type=int, help="Appearance index of the protagonist.")
    group.add_argument("--pivot-name", type=str, help="Name of the protagonist.")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", type=str, default=".", help="Directory for artifacts.")
    common.add_argument("--config", type=str, help="Optional ini file with defaults.")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")

    scenes = argparse.ArgumentParser(add_help=False)
    scenes.add_argument(
        "--scenes", type=str, required=True, help="Scenes file, one scene per line."
    )
    scenes.add_argument("--aliases", type=str, help="Alias file, 'alias => canonical' per line.")

    parser = argparse.ArgumentParser(
        prog="peaknet", description="Character co-occurrence network analysis."
    )
    parser.add_argument("--version", action="version", version=f"peaknet {__version__}")
    sub = parser.add_subparsers(dest="command")

    sub.add_parser("build", parents=[common, scenes], help="Export the network.")

    stats = sub.add_parser("stats", parents=[common, scenes], help="Degree and link statistics.")
    _add_weighted(stats)
    stats.add_argument("--top-k", type=int, help="Number of top nodes and links.")

    ccdf = sub.add_parser("ccdf", parents=[common, scenes], help="Degree CCDF as CSV.")
    _add_weighted(ccdf)
    ccdf.add_argument("--loglog", action="store_true", help="Only log-log plottable points.")

    cluster = sub.add_parser("cluster", parents=[common, scenes], help="Louvain communities.")
    _add_weighted(cluster)
    cluster.add_argument("--resolution", type=float, help="Modularity resolution.")
    cluster.add_argument("--seed", type=int, help="Seed for the node-order shuffle.")

    dce = sub.add_parser("dce", parents=[common, scenes], help="Dale Cooper Effect report.")
    _add_pivot(dce)
    dce.add_argument("--method", choices=("correlation", "density"), help="Pivot scan contrast.")
    dce.add_argument("--tolerance", type=float, help="Assortativity tolerance.")

    prune = sub.add_parser("prune", parents=[common, scenes], help="Drop single-scene characters.")
    _add_pivot(prune)
    prune.add_argument("--top-k", type=int, help="Number of top nodes and links.")

    remove = sub.add_parser("remove", parents=[common, scenes], help="Remove listed characters.")
    remove.add_argument("--remove-list", type=str, required=True, help="Names, one per line.")
    _add_weighted(remove)
    remove.add_argument("--resolution", type=float, help="Modularity resolution.")
    remove.add_argument("--seed", type=int, help="Louvain seed.")

    simulate = sub.add_parser("simulate", help="Random-model seed sweeps.")
    models = simulate.add_subparsers(dest="model", required=True)
    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--seed", type=int, help="First seed (default: PEAKNET_SEED or 0).")
    sweep.add_argument("--seeds", type=int, help="Number of consecutive seeds.")
    sweep.add_argument("--workers", type=int, help="Worker processes.")
    sweep.add_argument("--tolerance", type=float, help="Assortativity tolerance.")

    er = models.add_parser("er", parents=[common, sweep], help="Erdős–Rényi G(n, p).")
    er.add_argument("--n", type=int, required=True)
    er.add_argument("--p", type=float, required=True)

    ba = models.add_parser("ba", parents=[common, sweep], help="Barabási–Albert growth.")
    ba.add_argument("--n", type=int, required=True)
    ba.add_argument("--m", type=int, required=True)
    ba.add_argument("--fit-min", type=int, default=8, help="Smallest degree in the log-log fit.")
    ba.add_argument("--fit-max", type=int, default=100, help="Largest degree in the log-log fit.")

    spliced = models.add_parser("spliced", parents=[common, sweep], help="Core-periphery model.")
    spliced.add_argument("--core-n", type=int)
    spliced.add_argument("--periphery-n", type=int)
    spliced.add_argument("--core-p", type=float)
    spliced.add_argument("--m", type=int)
    spliced.add_argument("--bias", type=float)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Exit status: 0 on success, 1 on any error, 2 without a subcommand
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2

    # Set verbose logging if requested
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        config = RunConfig.from_args(args, load_defaults(args.config))
        artifacts = COMMANDS[config.subcommand](config)
        os.makedirs(config.output_dir, exist_ok=True)
        write_artifacts(artifacts, config.output_dir)
    except (PeaknetError, OSError) as e:
        logger.error(f"Error: {e}")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
