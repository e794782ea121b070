"""Tests for the immutable run configuration."""

from pathlib import Path

import pytest

from chargeplan.config import RunConfig
from chargeplan.exceptions import ConfigurationError


def test_threads_do_not_affect_equality_or_provenance():
    single = RunConfig(command='dominate', k=2, t_m=3000.0, threads=1)
    multi = RunConfig(command='dominate', k=2, t_m=3000.0, threads=8)
    assert single == multi
    assert single.provenance() == multi.provenance()
    assert 'threads' not in single.provenance()


def test_provenance_is_json_serializable():
    config = RunConfig(
        command='evaluate',
        nodes=Path('/data/nodes.csv'),
        distances_m=(1000.0, 2000.0),
        use_cache=False,
        cache_directory=Path('/tmp'),
    )
    provenance = config.provenance()
    assert provenance['nodes'] == '/data/nodes.csv'
    assert provenance['distances_m'] == [1000.0, 2000.0]
    assert provenance['seed'] == 2017
    assert 'use_cache' not in provenance
    assert 'cache_directory' not in provenance


@pytest.mark.parametrize('kwargs', [
    {'command': 'place'},
    {'command': 'dominate', 't_m': 0.0},
    {'command': 'dominate', 't_m': -5.0},
    {'command': 'dominate', 'seed': -1},
    {'command': 'dominate', 'seed': 2 ** 64},
    {'command': 'dominate', 'runs': 0},
    {'command': 'dominate', 'threads': 0},
    {'command': 'dominate', 'outlier_policy': 'drop'},
])
def test_invalid_run_configurations(kwargs):
    with pytest.raises(ConfigurationError):
        RunConfig(**kwargs)


def test_run_config_is_frozen():
    config = RunConfig(command='bounds', k=1)
    with pytest.raises(AttributeError):
        config.k = 2
