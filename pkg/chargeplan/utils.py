"""General utility functions which are used across the application."""

import json
import logging
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional, TypeVar, Union

from yaml import load  # noqa

from chargeplan import compiler


logger = logging.getLogger(__name__)

# Try to import PyYAML library for faster YAML parsing
try:
    from yaml import CLoader as Loader
    logger.debug('Using LibYAML bindings for faster .yml parsing.')
except ImportError:  # pragma: no cover
    from yaml import Loader  # type: ignore
    logger.debug(
        'LibYAML not installed. '
        'Using somewhat slower pure python implementation.',
    )


T = TypeVar('T')


def cast_to_list(content: Union[T, List[T]]) -> List[T]:
    """
    Cast content to a 1-item list containing content.

    If content already is a list, return content unaltered.
    """
    if not isinstance(content, list):
        return [content]
    else:
        return content


def compile_yaml(
    path: Path,
    context: Optional[Dict[str, Any]] = None,
) -> Any:
    """
    Return datastructure from compiled YAML jinja2 template.

    :param path: YAML template file path.
    :param context: Jinja2 context.
    """
    if not path.is_file():
        error_msg = f'Could not load config file "{path}".'
        logger.critical(error_msg)
        raise FileNotFoundError(error_msg)

    config_string = compiler.compile_template_to_string(
        template=path,
        context=context or {},
    )

    return load(StringIO(config_string), Loader=Loader)


def json_str(data: Any) -> str:
    """
    Return deterministic JSON string representation of data.

    Keys are sorted and the output ends with a newline, so that identical data
    always results in byte-identical files.

    :param data: JSON serializable python data structure.
    :return: JSON string.
    """
    return json.dumps(
        data,
        indent=2,
        sort_keys=True,
        ensure_ascii=False,
        allow_nan=False,
    ) + '\n'


def dump_json(path: Path, data: Any) -> None:
    """
    Dump data to UTF-8 encoded JSON file.

    :param path: Path to file to be created.
    :param data: Data to be dumped to file.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as json_file:
        json_file.write(json_str(data))


def load_json(path: Path) -> Any:
    """
    Load content from JSON file.

    :param path: Path to JSON formatted file.
    :return: Contents of JSON file.
    """
    with open(path, 'r', encoding='utf-8') as json_file:
        return json.load(json_file)
