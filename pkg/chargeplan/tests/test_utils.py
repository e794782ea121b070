"""Tests for chargeplan.utils module."""

import pytest

from chargeplan.utils import (
    cast_to_list,
    compile_yaml,
    dump_json,
    json_str,
    load_json,
)


def test_cast_to_list():
    assert cast_to_list(3) == [3]
    assert cast_to_list([1, 2]) == [1, 2]


def test_json_str_is_deterministic():
    assert json_str({'b': [1, 2], 'a': 'æ'}) \
        == '{\n  "a": "æ",\n  "b": [\n    1,\n    2\n  ]\n}\n'


def test_json_round_trip(temp_directory):
    path = temp_directory / 'nested' / 'data.json'
    dump_json(path, {'k': 2})
    assert load_json(path) == {'k': 2}


def test_compile_yaml_with_context(temp_directory):
    path = temp_directory / 'settings.yml'
    path.write_text('runs: {{ runs }}\nname: {{ missing }}\n')
    assert compile_yaml(path, context={'runs': 3}) == {'runs': 3, 'name': None}


def test_compile_missing_yaml_file(temp_directory):
    with pytest.raises(FileNotFoundError):
        compile_yaml(temp_directory / 'missing.yml')
