"""Tests for JSON, CSV and GeoJSON result files."""

import json

import geojson
import pytest

from chargeplan.domination import greedy_k_dominating
from chargeplan.evaluation import DetourRecord
from chargeplan.exceptions import ConfigurationError
from chargeplan.graph import export_geojson
from chargeplan.persistence import (
    load_dominating_set,
    save_dominating_set,
    write_detour_csv,
    write_geojson,
    write_report,
)


def test_dominating_set_file(grid_reachability, temp_directory):
    stations = greedy_k_dominating(grid_reachability, k=2)
    path = temp_directory / 'stations.json'
    save_dominating_set(stations, path, run_config={'seed': 2017})

    data = json.loads(path.read_text(encoding='utf-8'))
    assert data['members'] == list(stations.members)
    assert data['run_config'] == {'seed': 2017}
    assert data['graph_fingerprint'] == {'n': 16, 'm': 24, 't_meters': 2000.0}
    assert load_dominating_set(path) == stations


def test_dominating_set_file_is_byte_stable(grid_reachability, tmp_path):
    stations = greedy_k_dominating(grid_reachability, k=1)
    first, second = tmp_path / 'a.json', tmp_path / 'b.json'
    save_dominating_set(stations, first)
    save_dominating_set(stations, second)
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes().endswith(b'}\n')


@pytest.mark.parametrize('content', [
    '{"members": [1, 2]}',
    '{"k": 1, "members": "abc", "provenance": {}, "graph_fingerprint": {}}',
    '[1, 2, 3]',
    'not json',
])
def test_invalid_dominating_set_files(temp_directory, content):
    path = temp_directory / 'stations.json'
    path.write_text(content)
    with pytest.raises(ConfigurationError, match='not a valid dominating set'):
        load_dominating_set(path)


def test_missing_dominating_set_file(temp_directory):
    with pytest.raises(FileNotFoundError):
        load_dominating_set(temp_directory / 'missing.json')


def test_report_keys_are_sorted(temp_directory):
    path = temp_directory / 'report.json'
    write_report(path, {'b': 1, 'a': {'d': 2.5, 'c': None}})
    assert path.read_text() == (
        '{\n'
        '  "a": {\n'
        '    "c": null,\n'
        '    "d": 2.5\n'
        '  },\n'
        '  "b": 1\n'
        '}\n'
    )


def test_report_refuses_nan(temp_directory):
    with pytest.raises(ValueError):
        write_report(temp_directory / 'report.json', {'mean': float('nan')})


def test_detour_csv(temp_directory):
    path = temp_directory / 'detours.csv'
    write_detour_csv(path, [
        DetourRecord(1, 2, 4, 4000.0, 1),
        DetourRecord(3, 1, None, None, 0, reason='no-station-in-range'),
    ])
    assert path.read_text().splitlines() == [
        'source,dest,station,detour_m,candidates',
        '1,2,4,4000.0,1',
        '3,1,,,0',
    ]


def test_geojson_file(grid_graph, temp_directory):
    path = temp_directory / 'map.geojson'
    write_geojson(path, export_geojson(grid_graph, stations=[0, 5]))
    collection = geojson.loads(path.read_text())
    assert collection.is_valid
    assert len(collection['features']) == grid_graph.m + 2
