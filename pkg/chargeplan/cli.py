"""Command line interface of chargeplan, using the argparse module."""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

import coloredlogs

from chargeplan import chargeplan
from chargeplan.config import (
    ChargePlanYAMLConfigDict,
    OUTLIER_POLICIES,
    RunConfig,
    default_threads,
    expand_path,
    resolve_config_directory,
    user_settings,
)
from chargeplan.domination import DEGREE_MODES
from chargeplan.exceptions import ChargePlanError

logger = logging.getLogger(__name__)

FILE_NOT_FOUND = 3
ALGORITHM_CHOICES = ('randomized', 'greedy', 'greedy-extension', 'exact')


def _graph_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--nodes',
        type=Path,
        required=True,
        help='CSV file of road network vertices, header "id,lon,lat".',
    )
    parser.add_argument(
        '--edges',
        type=Path,
        required=True,
        help='CSV file of road segments, header "u,v,length_m".',
    )


def _threshold_arguments(
    parser: argparse.ArgumentParser,
    required: bool = True,
) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument(
        '--t-km',
        type=float,
        help='Reachability threshold in kilometers.',
    )
    group.add_argument(
        '--t',
        type=float,
        dest='t_m',
        help='Reachability threshold in meters.',
    )


def _seed_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--seed',
        type=int,
        help='Seed of the random number generator.',
    )


def _stations_argument(
    parser: argparse.ArgumentParser,
    required: bool = True,
) -> None:
    parser.add_argument(
        '--stations',
        type=Path,
        required=required,
        help='Dominating set JSON file produced by "dominate".',
    )


def _pairs_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--pairs',
        type=int,
        help='Number of random (source, destination) pairs.',
    )
    parser.add_argument(
        '--csv-output',
        type=Path,
        help='Optional CSV file of all detour records.',
    )
    _seed_argument(parser)


def build_parser() -> argparse.ArgumentParser:
    """Return argument parser for all subcommands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--output',
        type=Path,
        help='Output file. Reports are printed to stdout if not given.',
    )
    common.add_argument(
        '--threads',
        type=int,
        help='Number of worker threads, physical cores by default. Results '
        'do not depend on it. Searches run in Python threads, which share '
        'the interpreter lock, so the speedup is small.',
    )
    common.add_argument(
        '--logging-level',
        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'),
        help='Logging level, overridden by $CHARGEPLAN_LOGGING_LEVEL.',
    )
    common.add_argument(
        '--no-cache',
        action='store_true',
        help='Neither read nor write the reachability graph cache.',
    )
    common.add_argument(
        '--cache-dir',
        type=Path,
        help='Reachability graph cache directory.',
    )

    parser = argparse.ArgumentParser(
        prog='chargeplan',
        description='Place electric vehicle charging stations on a road '
        'network as k-dominating sets of its reachability graph.',
    )
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    def subparser(name: str, help: str) -> argparse.ArgumentParser:
        return subparsers.add_parser(name, help=help, parents=[common])

    build_reach = subparser('build-reach', 'Build reachability graph.')
    _graph_arguments(build_reach)
    _threshold_arguments(build_reach)

    dominate = subparser('dominate', 'Compute a k-dominating set.')
    _graph_arguments(dominate)
    _threshold_arguments(dominate)
    dominate.add_argument('--k', type=int, required=True)
    dominate.add_argument(
        '--algo',
        dest='algorithm',
        choices=ALGORITHM_CHOICES,
        default='randomized',
    )
    dominate.add_argument('--mode', choices=DEGREE_MODES)
    dominate.add_argument(
        '--runs',
        type=int,
        help='Number of randomized runs, the smallest set is kept.',
    )
    _seed_argument(dominate)
    dominate.add_argument(
        '--outlier-policy',
        choices=OUTLIER_POLICIES,
        help='How to handle vertices of degree smaller than k.',
    )
    dominate.add_argument(
        '--sweep',
        action='store_true',
        help='Add all undercovered vertices at once in phase B.',
    )
    dominate.add_argument(
        '--verify',
        action='store_true',
        help='Re-check the result and print PASS or FAIL.',
    )

    bounds = subparser('bounds', 'Report theoretical upper bounds.')
    _graph_arguments(bounds)
    _threshold_arguments(bounds)
    bounds.add_argument('--k', type=int, required=True)
    bounds.add_argument(
        '--alpha',
        type=float,
        help='Also bound the alpha-domination number.',
    )

    evaluate = subparser('evaluate', 'Evaluate a station set.')
    _graph_arguments(evaluate)
    _threshold_arguments(evaluate, required=False)
    _stations_argument(evaluate)
    evaluate.add_argument('--distances-km', type=float, nargs='+')
    evaluate.add_argument('--coverage-km', type=float, nargs='+')
    _pairs_arguments(evaluate)

    detour = subparser('detour', 'Simulate recharging detours.')
    _graph_arguments(detour)
    _threshold_arguments(detour, required=False)
    _stations_argument(detour)
    _pairs_arguments(detour)

    export = subparser('export', 'Export road network as GeoJSON.')
    _graph_arguments(export)
    _stations_argument(export, required=False)

    verify = subparser('verify', 'Re-check a dominating set file.')
    _graph_arguments(verify)
    _threshold_arguments(verify, required=False)
    _stations_argument(verify)

    compare = subparser('compare', 'Compare greedy and randomized sizes.')
    _graph_arguments(compare)
    _threshold_arguments(compare)
    compare.add_argument('--k', type=int, nargs='+', required=True)
    compare.add_argument('--mode', choices=DEGREE_MODES)
    compare.add_argument('--runs', type=int)
    _seed_argument(compare)

    return parser


def build_config(
    arguments: argparse.Namespace,
    settings: ChargePlanYAMLConfigDict,
) -> RunConfig:
    """
    Return run configuration from parsed arguments and user settings.

    Command line arguments take precedence over the settings file, which
    takes precedence over built-in defaults.
    """
    defaults = settings['defaults']
    cache = settings['cache']

    def option(name: str, default: Any = None) -> Any:
        value = getattr(arguments, name, None)
        return default if value is None else value

    def meters(kilometers: Optional[Sequence[float]]) -> tuple:
        return tuple(1000.0 * float(km) for km in kilometers or ())

    t_m = option('t_m')
    if option('t_km') is not None:
        t_m = 1000.0 * arguments.t_km

    k = option('k')
    ks: tuple = ()
    if isinstance(k, list):
        k, ks = None, tuple(k)

    cache_directory = option('cache_dir')
    if cache_directory is None and cache.get('directory'):
        cache_directory = expand_path(
            cache['directory'],
            resolve_config_directory(),
        )

    return RunConfig(
        command=arguments.command,
        nodes=option('nodes'),
        edges=option('edges'),
        t_m=t_m,
        k=k,
        ks=ks,
        algorithm=option('algorithm', 'randomized'),
        mode=option('mode', defaults['mode']),
        seed=option('seed', defaults['seed']),
        runs=option('runs', defaults['runs']),
        phase_b='sweep' if option('sweep') else 'extension',
        outlier_policy=option('outlier_policy'),
        alpha=option('alpha'),
        stations=option('stations'),
        output=option('output'),
        csv_output=option('csv_output'),
        pairs=option('pairs', defaults['pairs']),
        distances_m=meters(option('distances_km', defaults['distances_km'])),
        coverage_m=meters(option('coverage_km', defaults['coverage_km'])),
        verify=bool(option('verify', False)),
        use_cache=cache['enabled'] and not option('no_cache', False),
        cache_directory=cache_directory,
        threads=option('threads', defaults['threads'] or default_threads()),
    )


def _fail(code_name: str, message: str, exit_code: int) -> int:
    """Print single line machine parsable error and return exit status."""
    message = ' '.join(str(message).split())
    print(f'error={code_name} message={message}', file=sys.stderr)
    return exit_code


def _install_logging(level: str) -> None:
    coloredlogs.install(
        level=level,
        fmt='%(asctime)s %(name)s[%(levelname)s] %(message)s',
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run chargeplan command line interface.

    :param argv: Arguments, sys.argv[1:] by default.
    :return: Exit status.
    """
    arguments = build_parser().parse_args(argv)

    # $CHARGEPLAN_LOGGING_LEVEL overrides all other logging level settings
    environment_level = os.environ.get('CHARGEPLAN_LOGGING_LEVEL')
    _install_logging(
        environment_level or arguments.logging_level or 'INFO',
    )

    try:
        settings = user_settings()
        if not environment_level and not arguments.logging_level:
            coloredlogs.set_level(
                str(settings['defaults']['logging_level']).upper(),
            )
        config = build_config(arguments, settings)
        return chargeplan.main(config)
    except ChargePlanError as error:
        logger.debug('Command failed.', exc_info=True)
        return _fail(error.code_name, str(error), error.exit_code)
    except FileNotFoundError as error:
        logger.debug('Command failed.', exc_info=True)
        filename = error.filename or error
        return _fail(
            'file-not-found',
            f'No such file: {filename}',
            FILE_NOT_FOUND,
        )
