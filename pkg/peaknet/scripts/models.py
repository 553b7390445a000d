"""
Seeded random-graph generators.

All generators draw from one ``random.Random`` (MT19937) instance seeded with
a 64-bit unsigned integer, so identical params give identical graphs.
"""

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, List, Sequence, TypeVar, Union

import networkx as nx

from .errors import ParameterError
from .graph import ChronoMultigraph

logger = logging.getLogger(__name__)

MAX_SEED = 2**64


def _check_seed(seed: int) -> None:
    if not isinstance(seed, int) or not 0 <= seed < MAX_SEED:
        raise ParameterError(f"seed must be an integer in [0, 2**64), got {seed!r}")


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class ErParams:
    """Erdős–Rényi G(n, p)."""

    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be at least 1, got {self.n}")
        _check_probability("p", self.p)
        _check_seed(self.seed)


@dataclass(frozen=True)
class BaParams:
    """Barabási–Albert growth to n nodes, m links per new node."""

    n: int
    m: int
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n <= self.m:
            raise ParameterError(f"Need n > m >= 1, got n={self.n}, m={self.m}")
        _check_seed(self.seed)


@dataclass(frozen=True)
class SplicedParams:
    """
    Dense random core followed by a periphery attached preferentially to it.

    Defaults mirror a story with about thirty characters before the
    protagonist and thirty after.
    """

    core_n: int = 30
    periphery_n: int = 30
    core_p: float = 0.3
    m: int = 2
    bias: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.core_n < 1:
            raise ParameterError(f"core_n must be positive, got {self.core_n}")
        if self.periphery_n < 0:
            raise ParameterError(f"periphery_n must be non-negative, got {self.periphery_n}")
        if self.m < 1 or self.m > self.core_n:
            raise ParameterError(f"Need 1 <= m <= core_n, got m={self.m}, core_n={self.core_n}")
        _check_probability("core_p", self.core_p)
        _check_probability("bias", self.bias)
        _check_seed(self.seed)

    @property
    def n(self) -> int:
        return self.core_n + self.periphery_n


Params = Union[ErParams, BaParams, SplicedParams]
P = TypeVar("P", ErParams, BaParams, SplicedParams)


def generate_er(params: ErParams) -> ChronoMultigraph:
    """
    Erdős–Rényi graph: each pair of the upper triangle, in row-major order,
    is linked with probability p.
    """
    graph = nx.gnp_random_graph(params.n, params.p, seed=random.Random(params.seed))
    return ChronoMultigraph.from_networkx(graph)


def generate_ba(params: BaParams) -> ChronoMultigraph:
    """
    Barabási–Albert graph grown from a complete graph on m+1 nodes.

    Each new node links to m distinct existing nodes chosen with probability
    proportional to their current degree.
    """
    graph = nx.barabasi_albert_graph(
        params.n,
        params.m,
        seed=random.Random(params.seed),
        initial_graph=nx.complete_graph(params.m + 1),
    )
    return ChronoMultigraph.from_networkx(graph)


def _weighted_pick(rng: random.Random, pool: Sequence[int], degree: List[int]) -> int:
    return rng.choices(pool, weights=[degree[v] + 1 for v in pool])[0]


def generate_spliced(params: SplicedParams) -> ChronoMultigraph:
    """
    Core–periphery growth model.

    Nodes 0..core_n-1 form an Erdős–Rényi core. Each periphery node then
    forms m distinct links; a link goes to the core with probability
    ``bias`` and otherwise to any existing node, in both cases choosing
    proportionally to degree + 1.

    Args:
        params: Model parameters (seed included)

    Returns:
        The generated graph, core first in appearance order
    """
    rng = random.Random(params.seed)
    graph = nx.gnp_random_graph(params.core_n, params.core_p, seed=rng)
    graph.add_nodes_from(range(params.core_n, params.n))

    degree = [0] * params.n
    for v, d in graph.degree():
        degree[v] = d
    core = list(range(params.core_n))

    for new in range(params.core_n, params.n):
        existing = list(range(new))
        targets: List[int] = []
        while len(targets) < params.m:
            pool = core if rng.random() < params.bias else existing
            target = _weighted_pick(rng, pool, degree)
            if target not in targets:
                targets.append(target)
        for target in targets:
            graph.add_edge(new, target)
            degree[target] += 1
        degree[new] += params.m

    logger.debug(
        f"Spliced model seed={params.seed}: {graph.number_of_nodes()} nodes, "
        f"{graph.number_of_edges()} edges"
    )
    return ChronoMultigraph.from_networkx(graph)


def generate(params: Params) -> ChronoMultigraph:
    """Dispatch to the generator matching the params type."""
    if isinstance(params, ErParams):
        return generate_er(params)
    if isinstance(params, BaParams):
        return generate_ba(params)
    return generate_spliced(params)


T = TypeVar("T")


def seed_sweep(
    task: Callable[[P], T], params: P, seeds: Sequence[int], workers: int = 1
) -> List[T]:
    """
    Run task once per seed, each time with params re-seeded.

    Args:
        task: Picklable callable taking the params (e.g. a generator, or a
            function that generates and then measures)
        params: Template params; only the seed is replaced
        seeds: Seeds to run, results come back in this order
        workers: Process count; 1 runs sequentially in this process

    Returns:
        One result per seed, identical for any worker count
    """
    runs = [replace(params, seed=seed) for seed in seeds]
    if workers <= 1 or len(runs) <= 1:
        return [task(run) for run in runs]

    logger.info(f"Running {len(runs)} seeds on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, runs))
