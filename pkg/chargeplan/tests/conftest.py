"""Application wide fixtures."""

import os
from pathlib import Path
from typing import Tuple

import pytest

import chargeplan.xdg
from chargeplan.graph import RoadGraph, read_road_graph
from chargeplan.reachability import (
    ReachabilityGraph,
    build_reachability_graph,
)


@pytest.fixture
def data_directory() -> Path:
    """Return path to directory containing test data."""
    return Path(__file__).parent / 'data'


@pytest.fixture
def grid_csv(data_directory) -> Tuple[Path, Path]:
    """Return nodes and edges CSV paths of a 4x4 grid with 1 km segments."""
    return (
        data_directory / 'grid_nodes.csv',
        data_directory / 'grid_edges.csv',
    )


@pytest.fixture
def grid_graph(grid_csv) -> RoadGraph:
    """Return 4x4 grid road graph, vertex r * 4 + c in row r, column c."""
    return read_road_graph(*grid_csv)


@pytest.fixture
def grid_reachability(grid_graph) -> ReachabilityGraph:
    """Return reachability graph of the 4x4 grid for a 2 km threshold."""
    return build_reachability_graph(grid_graph, 2000.0)


@pytest.fixture
def example_config_directory() -> Path:
    """Return path to directory containing the example settings file."""
    return Path(__file__).parents[1] / 'config'


@pytest.fixture
def temp_directory(tmp_path) -> Path:
    """Return path to temporary directory."""
    return tmp_path.resolve()


@pytest.fixture(autouse=True)
def patch_xdg_directory_standard(tmp_path, monkeypatch, request):
    """During testing, the XDG directory standard is monkeypatched."""
    if 'dont_patch_xdg' in request.keywords:
        yield
        return

    cache_dir = tmp_path / '.cache' / 'chargeplan'
    cache_dir.mkdir(parents=True)
    monkeypatch.setattr(
        chargeplan.xdg.XDG,
        'cache_home',
        cache_dir,
    )
    yield cache_dir


@pytest.fixture(autouse=True)
def patch_chargeplan_config_home(tmp_path, monkeypatch):
    """Patch $CHARGEPLAN_CONFIG_HOME, so user settings never leak in."""
    config_home = tmp_path / 'config'
    config_home.mkdir()
    monkeypatch.setitem(
        os.environ,
        'CHARGEPLAN_CONFIG_HOME',
        str(config_home),
    )
    return config_home
