"""Fixtures for command line tests."""

from pathlib import Path
from typing import Callable, List, Tuple

import pytest

from chargeplan import cli


@pytest.fixture
def path_csv(temp_directory) -> Tuple[Path, Path]:
    """Return CSV files of a 100 vertex path with 1 km segments."""
    nodes = temp_directory / 'path_nodes.csv'
    edges = temp_directory / 'path_edges.csv'
    nodes.write_text(
        'id,lon,lat\n'
        + ''.join(f'{v},{0.01 * v:.2f},0.0\n' for v in range(1, 101)),
    )
    edges.write_text(
        'u,v,length_m\n'
        + ''.join(f'{v},{v + 1},1000\n' for v in range(1, 100)),
    )
    return nodes, edges


@pytest.fixture
def run(capsys) -> Callable[..., Tuple[int, str, str]]:
    """Return function running the command line, with captured output."""
    def run_command(*argv: object) -> Tuple[int, str, str]:
        status = cli.main([str(argument) for argument in argv])
        captured = capsys.readouterr()
        return status, captured.out, captured.err

    return run_command


@pytest.fixture
def grid_args(grid_csv) -> List[str]:
    """Return --nodes and --edges arguments of the 4x4 grid."""
    nodes, edges = grid_csv
    return ['--nodes', str(nodes), '--edges', str(edges)]
