"""Tests for construction of reachability graphs."""

import math

import numpy as np
import pytest

from chargeplan import reachability as reachability_module
from chargeplan.exceptions import InvalidVertexError, PreconditionError
from chargeplan.graph import RoadGraph, grid_road_graph
from chargeplan.reachability import (
    ReachabilityGraph,
    build_reachability_graph,
    find_outliers,
    threshold_lower_bounds,
)
from chargeplan.tests.utils import (
    oracle_reachability_edges,
    path_road_graph,
    random_road_graph,
)


def test_path_graph_reachability():
    graph = path_road_graph([1000, 1000])
    reachability = build_reachability_graph(graph, 1000.0)
    assert reachability.edge_set() == {(1, 2), (2, 3)}

    reachability = build_reachability_graph(graph, 2000.0)
    assert reachability.edge_set() == {(1, 2), (1, 3), (2, 3)}


def test_triangle_with_long_edge_uses_shortest_path():
    graph = RoadGraph(
        vertices=[(v, 0, 0) for v in (1, 2, 3)],
        edges=[(1, 2, 1000.0), (2, 3, 1000.0), (1, 3, 5000.0)],
    )
    reachability = build_reachability_graph(graph, 2000.0)
    assert reachability.neighbors(1) == (2, 3)
    assert reachability.degree_stats.delta == 2


def test_grid_degrees(grid_reachability):
    # Corner reaches 2 vertices at 1 km and 3 vertices at 2 km
    assert grid_reachability.degree(0) == 5
    assert grid_reachability.neighbors(0) == (1, 2, 4, 5, 8)
    assert grid_reachability.degree(5) == 10


def test_degree_stats(grid_reachability):
    stats = grid_reachability.degree_stats
    assert stats.delta == 5
    assert stats.Delta == 10
    assert len(stats.degree_sequence) == 16
    assert stats.dbar == sum(stats.degree_sequence) / 16
    assert stats.edge_count == grid_reachability.m
    assert 0 < stats.density < 1


def test_threshold_below_every_edge_gives_edgeless_graph(grid_graph):
    reachability = build_reachability_graph(grid_graph, 999.0)
    assert reachability.m == 0
    assert reachability.degree_stats.delta == 0
    assert find_outliers(reachability, 1) == set(range(16))


def test_threshold_above_diameter_gives_complete_graph(grid_graph):
    reachability = build_reachability_graph(grid_graph, 6000.0)
    assert reachability.m == 16 * 15 // 2
    assert reachability.degree_stats.delta == 15


@pytest.mark.parametrize('t', [0.0, -1.0, math.inf, math.nan])
def test_invalid_thresholds_are_rejected(grid_graph, t):
    with pytest.raises(PreconditionError):
        build_reachability_graph(grid_graph, t)


def test_adjacency_is_sorted_and_symmetric(grid_graph):
    reachability = build_reachability_graph(grid_graph, 3000.0)
    for index in range(reachability.n):
        neighbors = reachability.dense_neighbors(index)
        assert np.all(np.diff(neighbors) > 0)
        assert index not in neighbors
        for neighbor in neighbors:
            assert index in reachability.dense_neighbors(neighbor)


@pytest.mark.parametrize('seed', range(10))
def test_edges_agree_with_all_pairs_oracle(seed):
    graph = random_road_graph(n=50, extra_edges=30, seed=seed)
    for t in (1, 4, 9, 17, 30):
        reachability = build_reachability_graph(graph, float(t))
        assert reachability.edge_set() == oracle_reachability_edges(graph, t)


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(50))
def test_edges_agree_with_all_pairs_oracle_at_scale(seed):
    graph = random_road_graph(
        n=50 + 3 * seed,
        extra_edges=2 * seed,
        seed=1000 + seed,
        connected=seed % 5 != 0,
    )
    for t in (2, 5, 11, 23, 47):
        reachability = build_reachability_graph(graph, float(t))
        assert reachability.edge_set() == oracle_reachability_edges(graph, t)


def test_result_is_independent_of_thread_count():
    graph = random_road_graph(n=120, extra_edges=100, seed=3)
    single = build_reachability_graph(graph, 12.0, threads=1)
    multi = build_reachability_graph(graph, 12.0, threads=4)
    assert single == multi


def test_fingerprint_refers_to_road_graph(grid_graph, grid_reachability):
    assert grid_reachability.fingerprint == (16, 24, 2000.0)


def test_threshold_lower_bounds():
    graph = RoadGraph(
        vertices=[(v, 0, 0) for v in (1, 2, 3, 4)],
        edges=[(1, 2, 100.0), (2, 3, 300.0), (3, 4, 50.0)],
    )
    bounds = threshold_lower_bounds(graph)
    assert bounds.t_minmax == 100.0
    assert bounds.t_maxedge == 300.0


def test_threshold_lower_bounds_reject_isolated_vertices():
    graph = RoadGraph(
        vertices=[(v, 0, 0) for v in (1, 2, 3)],
        edges=[(1, 2, 100.0)],
    )
    with pytest.raises(PreconditionError, match=r'\[3\]'):
        threshold_lower_bounds(graph)


def test_minmax_threshold_leaves_no_isolated_vertex():
    graph = grid_road_graph(5, 5, spacing_m=250.0)
    bounds = threshold_lower_bounds(graph)
    reachability = build_reachability_graph(graph, bounds.t_minmax)
    assert reachability.degree_stats.delta >= 1


def test_find_outliers():
    reachability = ReachabilityGraph.from_edges(
        range(5),
        [(0, 1), (0, 2), (0, 3), (1, 2)],
    )
    assert find_outliers(reachability, 1) == {4}
    assert find_outliers(reachability, 2) == {3, 4}
    with pytest.raises(PreconditionError):
        find_outliers(reachability, 0)


def test_from_edges_ignores_loops_and_repeats():
    reachability = ReachabilityGraph.from_edges(
        [1, 2, 3],
        [(1, 2), (2, 1), (3, 3)],
    )
    assert reachability.m == 1
    assert reachability.neighbors(3) == ()
    with pytest.raises(InvalidVertexError):
        ReachabilityGraph.from_edges([1, 2], [(1, 5)])


def test_one_sided_pairs_are_added_in_both_directions(caplog):
    rows = [
        np.array([1, 2], dtype=np.int32),
        np.array([], dtype=np.int32),
        np.array([0], dtype=np.int32),
    ]
    symmetric = reachability_module._symmetrized(rows)
    assert [list(row) for row in symmetric] == [[1, 2], [0], [0]]
    assert any('one direction' in message for message in caplog.messages)


@pytest.mark.parametrize('seed', range(8))
def test_larger_threshold_gives_spanning_supergraph(seed):
    graph = random_road_graph(n=25, extra_edges=15, seed=seed)
    previous = build_reachability_graph(graph, 1.0)
    for t in (3.0, 7.0, 7.5, 15.0, 40.0):
        reachability = build_reachability_graph(graph, t)
        assert np.array_equal(reachability.vertex_ids, previous.vertex_ids)
        assert previous.edge_set() <= reachability.edge_set()
        previous = reachability


@pytest.mark.parametrize('seed', range(8))
def test_threshold_of_longest_edge_keeps_road_neighbors(seed):
    graph = random_road_graph(n=30, extra_edges=20, seed=seed)
    reachability = build_reachability_graph(graph, graph.max_edge_length)
    for vertex in graph.vertex_ids:
        road_neighbors = {neighbor for neighbor, _ in graph.neighbors(vertex)}
        assert road_neighbors <= set(reachability.neighbors(vertex))
        assert reachability.degree(vertex) >= graph.degree(vertex)
