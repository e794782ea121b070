"""Specifies everything related to run configuration and user settings."""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Tuple,
    Union,
)

import psutil
from mypy_extensions import TypedDict

from chargeplan import utils
from chargeplan.exceptions import ConfigurationError
from chargeplan.xdg import XDG

logger = logging.getLogger(__name__)

# Seed used whenever none is given, never derived from the wall clock
DEFAULT_SEED = 2017

COMMANDS = (
    'build-reach',
    'dominate',
    'bounds',
    'evaluate',
    'detour',
    'export',
    'verify',
    'compare',
)
OUTLIER_POLICIES = ('error', 'force-include', 'ignore')
LOGGING_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


class DefaultsConfigDict(TypedDict, total=False):
    """Optional items in chargeplan.yml::defaults."""

    seed: int
    runs: int
    mode: str
    threads: Optional[int]
    pairs: int
    distances_km: List[Union[int, float]]
    coverage_km: List[Union[int, float]]
    logging_level: str


class CacheConfigDict(TypedDict, total=False):
    """Optional items in chargeplan.yml::cache."""

    enabled: bool
    directory: Optional[str]


class ChargePlanYAMLConfigDict(TypedDict, total=False):
    """Optional items in chargeplan.yml."""

    defaults: DefaultsConfigDict
    cache: CacheConfigDict


CHARGEPLAN_DEFAULT_SETTINGS: ChargePlanYAMLConfigDict = {
    'defaults': {
        'seed': DEFAULT_SEED,
        'runs': 10,
        'mode': 'avg-degree',
        'threads': None,
        'pairs': 200,
        'distances_km': [1, 2, 3, 4, 5, 6],
        'coverage_km': [3, 4, 5, 6],
        'logging_level': 'INFO',
    },
    'cache': {
        'enabled': True,
        'directory': None,
    },
}


def resolve_config_directory() -> Path:
    """
    Return the absolute configuration directory path for the application.

    The directory path is resolved as follows:
        1) If $CHARGEPLAN_CONFIG_HOME is present, use it.
        2) If $XDG_CONFIG_HOME is present, use $XDG_CONFIG_HOME/chargeplan.
        3) Elsewise, use ~/.config/chargeplan.
    """
    if 'CHARGEPLAN_CONFIG_HOME' in os.environ:
        config_directory = Path(os.environ['CHARGEPLAN_CONFIG_HOME'])
    else:
        config_directory = XDG('chargeplan').config_home
    return config_directory.expanduser().absolute()


def user_settings(
    config_directory: Optional[Path] = None,
) -> ChargePlanYAMLConfigDict:
    """
    Return user settings, with defaults inserted for unspecified items.

    The settings file chargeplan.yml is compiled as a Jinja2 template before
    it is parsed, so environment variables are available as {{ env.NAME }}.

    :param config_directory: Directory containing chargeplan.yml.
    :raises ConfigurationError: If the settings file is malformed.
    """
    config_directory = config_directory or resolve_config_directory()
    config_file = config_directory / 'chargeplan.yml'

    settings: Any
    if config_file.is_file():
        logger.info(f'Using settings file "{config_file}".')
        try:
            settings = utils.compile_yaml(path=config_file) or {}
        except Exception as error:
            raise ConfigurationError(
                f'Could not parse "{config_file}": {error}',
            ) from None
    else:
        logger.debug(f'No settings file "{config_file}". Using defaults.')
        settings = {}

    if not isinstance(settings, dict):
        raise ConfigurationError(f'"{config_file}" is not a mapping.')

    unknown = set(settings) - set(CHARGEPLAN_DEFAULT_SETTINGS)
    if unknown:
        raise ConfigurationError(
            f'Unknown sections {sorted(unknown)} in "{config_file}".',
        )

    # Insert default settings that are not specified
    for section_name in ('defaults', 'cache'):
        section_content = settings.get(section_name) or {}
        if not isinstance(section_content, dict):
            raise ConfigurationError(
                f'Section "{section_name}" of "{config_file}" is not a '
                'mapping.',
            )
        settings[section_name] = CHARGEPLAN_DEFAULT_SETTINGS[section_name].copy()  # type: ignore # noqa
        settings[section_name].update(section_content)

    _validate_defaults(settings['defaults'], config_file)
    return settings


def _validate_defaults(defaults: Dict[str, Any], config_file: Path) -> None:
    """Raise ConfigurationError for ill-typed default values."""
    for key in ('seed', 'runs', 'pairs'):
        value = defaults[key]
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ConfigurationError(
                f'defaults.{key} in "{config_file}" must be a nonnegative '
                f'integer, got {value!r}.',
            )
    if defaults['mode'] not in ('min-degree', 'avg-degree'):
        raise ConfigurationError(
            f'defaults.mode in "{config_file}" must be min-degree or '
            f'avg-degree, got {defaults["mode"]!r}.',
        )
    if str(defaults['logging_level']).upper() not in LOGGING_LEVELS:
        raise ConfigurationError(
            f'Invalid defaults.logging_level {defaults["logging_level"]!r}.',
        )
    for key in ('distances_km', 'coverage_km'):
        defaults[key] = utils.cast_to_list(defaults[key])


def default_threads() -> int:
    """Return number of physical processor cores, at least 1."""
    return psutil.cpu_count(logical=False) or 1


def expand_path(path: Union[str, Path], config_directory: Path) -> Path:
    """
    Return an absolute path from a (possibly) relative path.

    Relative paths are relative to config_directory, and ~ and environment
    variables are expanded.
    """
    path = Path(os.path.expandvars(path)).expanduser()
    if not path.is_absolute():
        path = config_directory / path
    return path.resolve()


@dataclass(frozen=True)
class RunConfig:
    """
    Complete configuration of a single command line invocation.

    Thresholds and distances are stored in meters. threads is left out of
    the provenance, as results are identical for any number of threads.
    """

    command: str
    nodes: Optional[Path] = None
    edges: Optional[Path] = None
    t_m: Optional[float] = None
    k: Optional[int] = None
    algorithm: str = 'randomized'
    mode: str = 'avg-degree'
    seed: int = DEFAULT_SEED
    runs: int = 1
    phase_b: str = 'extension'
    outlier_policy: Optional[str] = None
    alpha: Optional[float] = None
    ks: Tuple[int, ...] = ()
    stations: Optional[Path] = None
    output: Optional[Path] = None
    csv_output: Optional[Path] = None
    pairs: int = 200
    distances_m: Tuple[float, ...] = ()
    coverage_m: Tuple[float, ...] = ()
    verify: bool = False
    use_cache: bool = True
    cache_directory: Optional[Path] = None
    threads: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        """Validate invariants of the configuration."""
        if self.command not in COMMANDS:
            raise ConfigurationError(f'Unknown command "{self.command}".')
        if self.t_m is not None and not self.t_m > 0:
            raise ConfigurationError(
                f'Threshold must be positive, got {self.t_m} m.',
            )
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError('Seed must be in [0, 2**64).')
        if self.runs < 1:
            raise ConfigurationError(
                f'runs must be positive, got {self.runs}.',
            )
        if self.threads < 1:
            raise ConfigurationError(
                f'threads must be positive, got {self.threads}.',
            )
        if self.outlier_policy not in (None,) + OUTLIER_POLICIES:
            raise ConfigurationError(
                f'Unknown outlier policy "{self.outlier_policy}".',
            )

    def provenance(self) -> Dict[str, Any]:
        """Return JSON serializable configuration, embedded in artifacts."""
        data: Dict[str, Any] = {}
        for key, value in self.__dict__.items():
            if key in ('threads', 'use_cache', 'cache_directory'):
                continue
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            data[key] = value
        return data
