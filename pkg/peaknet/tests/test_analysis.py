"""
Tests for analysis.py
"""

import random
from fractions import Fraction

import networkx as nx
import pytest

from peaknet.scripts.analysis import (
    DceThresholds,
    SplitSpec,
    collapse_experiment,
    dce_report,
    distribution_distance,
    prune_single_scene,
    removal_report,
    remove_nodes,
    scan_pivot,
    split,
)
from peaknet.scripts.corpus import parse_scenes
from peaknet.scripts.errors import ParameterError, UnknownNodeError
from peaknet.scripts.graph import ChronoMultigraph, build_network
from peaknet.scripts.models import ErParams, SplicedParams, generate_er, generate_spliced
from peaknet.scripts.stats import DegreeDistribution

# Two 4-cliques joined by the edge 3-4
TWO_CLIQUES = (
    [(i, j) for i in range(4) for j in range(i + 1, 4)]
    + [(i, j) for i in range(4, 8) for j in range(i + 1, 8)]
    + [(3, 4)]
)

# Triangle H, X, Y; P1 joins them twice; Q appears once, with P1
COLLAPSE_SCENES = "H|X|Y\nH|X|Y|P1\nH|X|Y|P1\nP1|Q\n"


def network(text: str) -> ChronoMultigraph:
    return build_network(parse_scenes(text).sequence)


def test_split_blocks():
    """Test that the pivot belongs to the first block."""
    g = network("A|B\nB|C\nC|D\nD|E\n")
    result = split(g, SplitSpec(1))
    assert result.core.names == ["A", "B"]
    assert result.periphery == ("C", "D", "E")
    assert result.cross_edges == 1
    assert result.periphery_edges == 2


def test_split_conserves_edges():
    """Test core + cross + periphery = all, as edges and as multiplicities."""
    rng = random.Random(3)
    for _ in range(100):
        cast = [f"c{i}" for i in range(10)]
        text = "\n".join("|".join(rng.sample(cast, rng.randint(1, 4))) for _ in range(15))
        g = network(text)
        spec = SplitSpec(rng.randrange(g.number_of_nodes))
        result = split(g, spec)
        assert (
            result.core.number_of_edges + result.cross_edges + result.periphery_edges
            == g.number_of_edges
        )
        assert (
            result.core.total_multiplicity
            + result.cross_multiplicity
            + result.periphery_multiplicity
            == g.total_multiplicity
        )


def test_split_pivot_out_of_range():
    """Test pivot indices outside the graph."""
    g = network("A|B\n")
    with pytest.raises(ParameterError):
        split(g, SplitSpec(2))
    with pytest.raises(ParameterError):
        split(g, SplitSpec(-1))


def test_split_spec_from_name():
    """Test pivot lookup by character name."""
    g = network("A|B\nB|Dale Cooper\n")
    assert SplitSpec.from_name(g, "Dale Cooper").pivot_index == 2
    with pytest.raises(UnknownNodeError):
        SplitSpec.from_name(g, "Laura")


def test_dce_report_fields():
    """Test densities, edge counts and scaling on a small graph."""
    g = network("A|B|C\nC|D\nB|E\n")
    report = dce_report(g, SplitSpec(2))
    assert report.pivot_name == "C"
    assert (report.core_size, report.periphery_size) == (3, 2)
    assert report.d_bb == 1
    assert report.d_aa == 0
    assert report.d_cross == Fraction(2, 6)
    assert report.edges_full == 5
    assert report.edges_core == 3
    assert report.edge_scaling == pytest.approx(5 / 3)


def test_dce_report_empty_core_edges():
    """Test that a one-character core leaves edge scaling undefined."""
    g = network("A|B\nB|C\n")
    report = dce_report(g, SplitSpec(0))
    assert report.edges_core == 0
    assert report.edge_scaling is None
    assert report.r_core is None
    assert report.verdict is False
    assert report.to_dict()["edge_scaling"] is None


def test_dce_report_empty_periphery():
    """Test that a pivot at the last character never gives a verdict."""
    g = ChronoMultigraph.from_networkx(nx.star_graph(4))
    report = dce_report(g, SplitSpec(4))
    assert report.periphery_size == 0
    assert report.verdict is False


def test_dce_verdict_ignores_multiplicity():
    """Test that the report reads the simple view."""
    params = SplicedParams(core_n=80, periphery_n=800, core_p=0.2, m=1, bias=1.0, seed=0)
    g = generate_spliced(params)
    spec = SplitSpec(params.core_n - 1)
    plain = dce_report(g, spec)
    scaled = dce_report(g.scaled(3), spec)
    assert plain.verdict == scaled.verdict
    assert plain.d_cross == scaled.d_cross


def test_dce_verdict_on_core_periphery_model():
    """Test a dense core with a large star-like periphery: verdict in most seeds."""
    hits = 0
    for seed in range(50):
        params = SplicedParams(
            core_n=80, periphery_n=800, core_p=0.2, m=1, bias=1.0, seed=seed
        )
        report = dce_report(generate_spliced(params), SplitSpec(params.core_n - 1))
        assert report.d_bb > report.d_cross > report.d_aa
        hits += report.verdict
    assert hits >= 40


def test_dce_verdict_negative_control():
    """Test ER(60, 0.1) split in the middle: verdict in at most 10% of seeds."""
    hits = sum(
        dce_report(generate_er(ErParams(60, 0.1, seed=seed)), SplitSpec(29)).verdict
        for seed in range(50)
    )
    assert hits <= 5


def test_dce_verdict_rate_at_spliced_defaults():
    """Test default spliced graphs: clearly negative r overall, verdict in most seeds."""
    hits, full = 0, []
    for seed in range(50):
        params = SplicedParams(seed=seed)
        report = dce_report(generate_spliced(params), SplitSpec(params.core_n - 1))
        full.append(report.r_full)
        hits += report.verdict
    assert sum(full) / len(full) < -0.15
    # the |r_core| clause on an ER(30, 0.3) core fails in about a quarter of seeds
    assert hits >= 35


def test_dce_thresholds():
    """Test that a wide tolerance cannot turn a failed density order into a verdict."""
    g = ChronoMultigraph.from_edges(8, TWO_CLIQUES)
    report = dce_report(g, SplitSpec(3), DceThresholds(assortativity_tolerance=0.9))
    assert report.d_aa == 1
    assert report.verdict is False


def test_scan_pivot_two_cliques():
    """Test that the scan finds the clique boundary."""
    g = ChronoMultigraph.from_edges(8, TWO_CLIQUES)
    scan = scan_pivot(g)
    assert scan.best_pivot == 3
    assert len(scan.scores) == 6
    assert list(scan.pivots) == [1, 2, 3, 4, 5, 6]
    assert scan.scores[2] == pytest.approx(0.561, abs=1e-3)


def test_scan_pivot_density_method():
    """Test the raw density contrast d_BB - d_AA."""
    g = ChronoMultigraph.from_edges(8, TWO_CLIQUES)
    scan = scan_pivot(g, method="density")
    # pivot 1: BC = {0, 1} fully linked, AD = {2..7} has 8 of 15 pairs
    assert scan.scores[0] == pytest.approx(1 - 8 / 15)


def test_scan_pivot_complete_graph():
    """Test that a complete graph has no contrast, so the first pivot wins."""
    scan = scan_pivot(ChronoMultigraph.from_networkx(nx.complete_graph(6)))
    assert scan.best_pivot == 1
    assert all(score == 0 for score in scan.scores)


def test_scan_pivot_errors():
    """Test graphs too small to scan and unknown methods."""
    with pytest.raises(ParameterError):
        scan_pivot(ChronoMultigraph.from_networkx(nx.path_graph(3)))
    with pytest.raises(ParameterError):
        scan_pivot(ChronoMultigraph.from_networkx(nx.path_graph(5)), method="spectral")


def test_scan_pivot_recovers_spliced_core():
    """Test pivot recovery on default spliced graphs with full bias."""
    correlation = density = 0
    for seed in range(50):
        params = SplicedParams(bias=1.0, seed=seed)
        g = generate_spliced(params)
        correlation += scan_pivot(g).best_pivot == params.core_n - 1
        density += scan_pivot(g, method="density").best_pivot == params.core_n - 1
    assert correlation >= 40
    assert density < correlation


def test_prune_single_scene():
    """Test that single-scene characters go and pruning is idempotent."""
    g = network(COLLAPSE_SCENES)
    pruned = prune_single_scene(g)
    assert pruned.removed == ("Q",)
    assert pruned.removed_indices == (4,)
    assert pruned.graph.names == ["H", "X", "Y", "P1"]
    assert prune_single_scene(pruned.graph).removed == ()
    assert pruned.by_block(SplitSpec(2)) == ((), ("Q",))


def test_prune_by_block():
    """Test per-block prune counts."""
    g = network("A|B\nA|B\nC|A\nD|B\nD|E\nE|B\nF|A\n")
    pruned = prune_single_scene(g)
    assert pruned.removed == ("C", "F")
    assert pruned.by_block(SplitSpec(2)) == (("C",), ("F",))


def test_remove_nodes():
    """Test induced removal and unknown names."""
    g = network("A|B|C\nC|D\n")
    assert remove_nodes(g, ["C"]).edges == {("A", "B"): 1}
    with pytest.raises(UnknownNodeError) as exc:
        remove_nodes(g, ["C", "Z", "W"])
    assert exc.value.names == ("Z", "W")


def test_remove_nodes_composes():
    """Test that removing nothing is the identity and removals compose."""
    rng = random.Random(8)
    cast = [f"c{i}" for i in range(10)]
    for _ in range(100):
        text = "\n".join("|".join(rng.sample(cast, rng.randint(1, 4))) for _ in range(12))
        g = network(text)
        assert remove_nodes(g, []) == g

        names = list(g.names)
        rng.shuffle(names)
        first, second = names[: rng.randint(0, 3)], names[3 : 3 + rng.randint(0, 3)]
        assert remove_nodes(remove_nodes(g, first), second) == remove_nodes(g, first + second)


def test_distribution_distance_is_a_metric():
    """Test symmetry and the triangle inequality on random degree sequences."""
    rng = random.Random(4)
    for _ in range(200):
        a, b, c = (
            DegreeDistribution.from_degrees(
                rng.randint(0, 8) for _ in range(rng.randint(1, 20))
            )
            for _ in range(3)
        )
        ab = distribution_distance(a, b)
        assert ab == pytest.approx(distribution_distance(b, a), abs=1e-12)
        assert 0 <= ab <= 1
        assert ab <= distribution_distance(a, c) + distribution_distance(c, b) + 1e-12


def test_distribution_distance():
    """Test KS distances from the degree sequences."""
    a = DegreeDistribution.from_degrees([1, 1, 2])
    b = DegreeDistribution.from_degrees([1, 2, 2])
    assert distribution_distance(a, b) == pytest.approx(1 / 3)
    assert distribution_distance(a, a) == 0
    zeros = DegreeDistribution.from_degrees([0, 0, 0])
    fives = DegreeDistribution.from_degrees([5, 5])
    assert distribution_distance(zeros, fives) == 1


def test_collapse_experiment():
    """Test that removing the hub left after pruning restores the core's shape."""
    g = network(COLLAPSE_SCENES)
    result = collapse_experiment(g, SplitSpec(g.index_of("Y")))
    assert result.removed_node == "H"
    assert result.distance_before == 1
    assert result.distance_after == 0


def test_collapse_experiment_on_spliced_model():
    """Test the collapse pipeline on default spliced graphs."""
    shrinks = 0
    for seed in range(50):
        params = SplicedParams(seed=seed)
        result = collapse_experiment(generate_spliced(params), SplitSpec(params.core_n - 1))
        assert int(result.removed_node) < params.core_n
        assert 0 <= result.distance_before <= 1
        assert 0 <= result.distance_after <= 1
        shrinks += result.distance_after < result.distance_before
    # every periphery node has scene count m >= 2, so pruning keeps the periphery and
    # dropping a core hub only moves the degree distribution further from the core's
    assert shrinks <= 5


def test_removal_report():
    """Test components, isolated characters and the central character."""
    g = network("A|B\nB|C\nC|D\nD|E\nE|F|G\nB|H\n")
    report = removal_report(g, ["C"])
    assert report.components == [{"A", "B", "H"}, {"D", "E", "F", "G"}]
    assert report.isolated == ()
    assert report.central == "E"

    report = removal_report(g, ["B", "C"])
    assert report.isolated == ("A", "H")
    assert report.to_dict()["component_sizes"] == [1, 4, 1]


def test_removal_report_unknown_name():
    """Test that unknown names are all reported."""
    g = network("A|B\n")
    with pytest.raises(UnknownNodeError):
        removal_report(g, ["Sheriff"])
