"""Tests for detours of trips which recharge near their source."""

import logging

import numpy as np
import pytest

from chargeplan.evaluation import (
    DESTINATION_UNREACHABLE,
    NO_STATION_IN_RANGE,
    detour_experiment,
    min_detour,
    sample_pairs,
)
from chargeplan.exceptions import PreconditionError
from chargeplan.graph import RoadGraph
from chargeplan.tests.utils import path_road_graph, random_road_graph


@pytest.fixture
def path_graph() -> RoadGraph:
    """Return path 1 - 2 - 3 - 4 with 1 km segments."""
    return path_road_graph([1000, 1000, 1000])


def test_detour_backwards_to_only_station(path_graph):
    record = min_detour(path_graph, s=1, dest=2, X=[4], t=3000.0)
    assert record.station == 4
    assert record.detour == 4000.0
    assert record.candidates == 1
    assert record.feasible


def test_station_on_shortest_path_gives_no_detour(path_graph):
    record = min_detour(path_graph, s=1, dest=4, X=[3], t=3000.0)
    assert record.detour == 0.0


def test_source_station_is_a_candidate(path_graph):
    record = min_detour(path_graph, s=2, dest=4, X=[2], t=0.0)
    assert record.station == 2
    assert record.detour == 0.0


def test_ties_are_won_by_smallest_station(path_graph):
    record = min_detour(path_graph, s=2, dest=2, X=[3, 1], t=1000.0)
    assert record.candidates == 2
    assert record.station == 1
    assert record.detour == 2000.0


def test_best_candidate_minimizes_total_distance(path_graph):
    record = min_detour(path_graph, s=2, dest=3, X=[1, 3, 4], t=1000.0)
    assert record.candidates == 2
    assert record.station == 3
    assert record.detour == 0.0


def test_no_station_within_range(path_graph):
    record = min_detour(path_graph, s=1, dest=2, X=[4], t=2999.0)
    assert not record.feasible
    assert record.reason == NO_STATION_IN_RANGE
    assert record.station is None
    assert record.candidates == 0


def test_unreachable_destination():
    graph = RoadGraph(
        vertices=[(v, 0, 0) for v in (1, 2, 3)],
        edges=[(1, 2, 10.0)],
    )
    record = min_detour(graph, s=1, dest=3, X=[2], t=100.0)
    assert record.reason == DESTINATION_UNREACHABLE
    assert record.as_dict() == {
        'source': 1,
        'destination': 3,
        'station': None,
        'detour': None,
        'candidates': 1,
        'reason': DESTINATION_UNREACHABLE,
    }


@pytest.mark.parametrize('seed', range(10))
def test_detours_are_nonnegative_and_monotone_in_stations(seed):
    graph = random_road_graph(n=50, extra_edges=40, seed=seed)
    generator = np.random.default_rng(seed)
    ids = list(graph.vertex_ids)
    for _ in range(4):
        larger = [v for v in ids if generator.random() < 0.3] or ids[:1]
        smaller = [v for v in larger if generator.random() < 0.5] or larger[:1]
        for source, destination in sample_pairs(graph.n, 10, seed):
            s, dest = ids[source], ids[destination]
            few = min_detour(graph, s, dest, smaller, t=12.0)
            many = min_detour(graph, s, dest, larger, t=12.0)
            if few.feasible:
                assert few.detour >= 0
                assert many.feasible
                assert many.detour <= few.detour


def test_every_vertex_a_station_gives_no_detours(grid_graph):
    report = detour_experiment(grid_graph, range(16), 1000.0, 50, seed=1)
    assert report.mean == 0.0
    assert report.std == 0.0
    assert report.infeasible_count == 0
    assert len(report.records) == 50


def test_detour_experiment_is_deterministic(grid_graph):
    first = detour_experiment(grid_graph, [5, 10], 2000.0, 40, seed=9)
    second = detour_experiment(grid_graph, [5, 10], 2000.0, 40, seed=9)
    threaded = detour_experiment(
        grid_graph,
        [5, 10],
        2000.0,
        40,
        seed=9,
        threads=4,
    )
    assert first == second == threaded


def test_infeasible_trips_are_counted_not_averaged(grid_graph, caplog):
    with caplog.at_level(logging.WARNING):
        report = detour_experiment(grid_graph, [0, 15], 1000.0, 30, seed=4)
    feasible = [record.detour for record in report.records if record.feasible]
    assert report.infeasible_count == 30 - len(feasible)
    assert report.infeasible_count > 0
    assert report.mean == pytest.approx(np.mean(feasible))
    assert any('infeasible' in message for message in caplog.messages)


def test_detour_report_without_feasible_trips():
    graph = RoadGraph(
        vertices=[(v, 0, 0) for v in (1, 2, 3)],
        edges=[(1, 2, 10.0)],
    )
    report = detour_experiment(graph, [3], 100.0, 6, seed=0)
    assert report.infeasible_count == 6
    assert report.mean is None
    assert report.std is None


def test_detour_report_dictionary(path_graph):
    report = detour_experiment(path_graph, [2], 3000.0, 2, seed=0)
    data = report.as_dict()
    assert set(data) == {'mean_m', 'std_m', 'infeasible_count', 'records'}
    assert len(data['records']) == 2


def test_sampled_pairs_are_distinct_and_proper():
    pairs = sample_pairs(10, 90, seed=3)
    assert len(set(pairs)) == 90
    assert all(s != d for s, d in pairs)
    assert all(0 <= s < 10 and 0 <= d < 10 for s, d in pairs)
    assert sample_pairs(10, 20, seed=3) == sample_pairs(10, 20, seed=3)


@pytest.mark.parametrize('n, pairs', [(10, 91), (1, 1), (10, 0)])
def test_impossible_pair_counts_are_rejected(n, pairs):
    with pytest.raises(PreconditionError):
        sample_pairs(n, pairs, seed=0)
