"""The main process of chargeplan, binding all subcommands together."""

import logging
from typing import Any, Callable, Dict, Tuple

from chargeplan import persistence, utils
from chargeplan.bounds import bound_report
from chargeplan.config import RunConfig
from chargeplan.domination import (
    DominatingSet,
    best_of_runs,
    exact_min_k_dominating,
    extend_greedily,
    greedy_k_dominating,
    is_k_dominating,
    is_minimal,
)
from chargeplan.evaluation import (
    compare_algorithms,
    coverage_profile,
    detour_experiment,
    station_reachability_stats,
)
from chargeplan.exceptions import (
    ConfigurationError,
    FingerprintMismatchError,
    PreconditionError,
)
from chargeplan.graph import RoadGraph, export_geojson, read_road_graph
from chargeplan.reachability import (
    ReachabilityGraph,
    find_outliers,
    threshold_lower_bounds,
)

logger = logging.getLogger(__name__)

# Exit status of a `verify` which finds an invalid dominating set
VERIFY_FAILED = 1


def main(config: RunConfig) -> int:
    """
    Run a single chargeplan command.

    :param config: Complete run configuration.
    :return: Exit status, 0 on success.
    """
    command: Callable[[RunConfig], int] = COMMANDS[config.command]
    logger.debug(f'[{config.command}] {config}')
    return command(config)


def _road_graph(config: RunConfig) -> RoadGraph:
    if config.nodes is None or config.edges is None:
        raise ConfigurationError('Both --nodes and --edges are required.')
    return read_road_graph(config.nodes, config.edges)


def _threshold(config: RunConfig) -> float:
    if config.t_m is None:
        raise ConfigurationError('A threshold is required, use --t-km or --t.')
    return config.t_m


def _k(config: RunConfig) -> int:
    if config.k is None:
        raise ConfigurationError('Domination multiplicity --k is required.')
    return config.k


def _reachability_graph(
    config: RunConfig,
    g: RoadGraph,
    t: float,
) -> ReachabilityGraph:
    cache_path = None
    if config.cache_directory is not None:
        cache_path = persistence.cache_path_for(g, t, config.cache_directory)
    return persistence.cached_reachability_graph(
        g=g,
        t=t,
        cache_path=cache_path,
        use_cache=config.use_cache,
        threads=config.threads,
    )


def _fingerprint(g: RoadGraph, t: float) -> Dict[str, Any]:
    return {'n': g.n, 'm': g.m, 't_meters': t}


def _stations(config: RunConfig, g: RoadGraph) -> Tuple[DominatingSet, float]:
    """
    Return station set of config, and the threshold to evaluate it with.

    :raises FingerprintMismatchError: If the set was computed on a graph with
        another number of vertices or edges, or another threshold than the
        one explicitly configured.
    """
    if config.stations is None:
        raise ConfigurationError('A station set is required, use --stations.')
    stations = persistence.load_dominating_set(config.stations)

    n, m, t = stations.fingerprint
    if (n, m) != (g.n, g.m):
        raise FingerprintMismatchError(
            f'"{config.stations}" was computed on a graph with n={n}, m={m}, '
            f'not n={g.n}, m={g.m}.',
        )
    if config.t_m is not None and t and config.t_m != t:
        raise FingerprintMismatchError(
            f'"{config.stations}" was computed with t={t} m, '
            f'not t={config.t_m} m.',
        )
    return stations, config.t_m or t


def _emit(config: RunConfig, report: Dict[str, Any]) -> None:
    """Write report to --output, or to stdout if no output is given."""
    report = {**report, 'run_config': config.provenance()}
    if config.output is None:
        print(utils.json_str(report), end='')
    else:
        persistence.write_report(config.output, report)


def build_reach(config: RunConfig) -> int:
    """Build (and cache) the reachability graph, reporting its statistics."""
    g = _road_graph(config)
    t = _threshold(config)

    try:
        bounds = threshold_lower_bounds(g)
        if t < bounds.t_minmax:
            logger.warning(
                f'[build-reach] t={t} m is below {bounds.t_minmax} m, some '
                'vertices can not reach any road neighbor.',
            )
        threshold_bounds: Any = {
            't_minmax': bounds.t_minmax,
            't_maxedge': bounds.t_maxedge,
        }
    except PreconditionError as error:
        logger.warning(f'[build-reach] {error}')
        threshold_bounds = None

    r = _reachability_graph(config, g, t)
    stats = r.degree_stats
    _emit(config, {
        'graph_fingerprint': _fingerprint(g, t),
        'threshold_bounds': threshold_bounds,
        'degree_stats': {
            'delta': stats.delta,
            'Delta': stats.Delta,
            'dbar': stats.dbar,
            'edge_count': stats.edge_count,
            'density': stats.density,
        },
    })
    return 0


def dominate(config: RunConfig) -> int:
    """Compute a k-dominating set and write it to --output."""
    g = _road_graph(config)
    t = _threshold(config)
    k = _k(config)
    r = _reachability_graph(config, g, t)

    include: Tuple[int, ...] = ()
    exempt: Tuple[int, ...] = ()
    outliers = tuple(sorted(find_outliers(r, k)))
    if outliers:
        ellipsis = ' ...' if len(outliers) > 20 else ''
        preview = f'{list(outliers[:20])}{ellipsis}'
        if config.outlier_policy is None:
            raise ConfigurationError(
                f'{len(outliers)} vertices have degree smaller than k={k}: '
                f'{preview}. Choose --outlier-policy error, force-include or '
                'ignore.',
            )
        if config.outlier_policy == 'error':
            raise PreconditionError(
                f'{len(outliers)} vertices have degree smaller than k={k}: '
                f'{preview}.',
            )
        logger.warning(
            f'[dominate] {len(outliers)} outliers handled by policy '
            f'"{config.outlier_policy}".',
        )
        if config.outlier_policy == 'force-include':
            include = outliers
        else:
            exempt = outliers

    if config.algorithm == 'randomized':
        stations = best_of_runs(
            r=r,
            k=k,
            mode=config.mode,
            runs=config.runs,
            base_seed=config.seed,
            threads=config.threads,
            include=include,
            exempt=exempt,
            phase_b=config.phase_b,
        )
    elif config.algorithm == 'greedy':
        stations = greedy_k_dominating(r, k, warm_start=include, exempt=exempt)
    elif config.algorithm == 'greedy-extension':
        stations = extend_greedily(r, k, initial=include, exempt=exempt)
    elif config.algorithm == 'exact':
        if include or exempt:
            raise ConfigurationError(
                'The exact algorithm does not support outlier policies.',
            )
        stations = exact_min_k_dominating(r, k)
    else:
        raise ConfigurationError(f'Unknown algorithm "{config.algorithm}".')

    logger.info(
        f'[dominate] {config.algorithm} {k}-dominating set with '
        f'{len(stations)} of {r.n} vertices.',
    )
    if config.output is None:
        print(utils.json_str({
            **stations.as_dict(),
            'run_config': config.provenance(),
        }), end='')
    else:
        persistence.save_dominating_set(
            stations,
            config.output,
            run_config=config.provenance(),
        )

    if config.verify:
        return _report_verification(r, stations)
    return 0


def _report_verification(r: ReachabilityGraph, stations: DominatingSet) -> int:
    """Print PASS or FAIL for a dominating set and return exit status."""
    # Only vertices which can not be k-dominated may be exempt
    unjustified = set(stations.exempt) - find_outliers(r, stations.k)
    if unjustified:
        logger.error(
            f'[verify] Exempt vertices with degree of at least k='
            f'{stations.k}: {sorted(unjustified)[:20]}.',
        )
        print(
            f'FAIL k={stations.k} size={len(stations)} '
            f'unjustified-exempt={len(unjustified)}',
        )
        return VERIFY_FAILED

    dominating, violations = is_k_dominating(
        r,
        stations,
        stations.k,
        exempt=stations.exempt,
    )
    if not dominating:
        print(
            f'FAIL k={stations.k} size={len(stations)} '
            f'undercovered={len(violations)}',
        )
        return VERIFY_FAILED
    if stations.minimal and not is_minimal(
        r,
        stations,
        stations.k,
        exempt=stations.exempt,
    ):
        print(f'FAIL k={stations.k} size={len(stations)} not-minimal')
        return VERIFY_FAILED

    print(f'PASS k={stations.k} size={len(stations)}')
    return 0


def verify(config: RunConfig) -> int:
    """Re-check a dominating set file against a road graph."""
    g = _road_graph(config)
    stations, t = _stations(config, g)
    if not t:
        raise ConfigurationError(
            f'"{config.stations}" records no threshold, use --t-km or --t.',
        )
    r = _reachability_graph(config, g, t)
    return _report_verification(r, stations)


def bounds(config: RunConfig) -> int:
    """Report theoretical bounds of the reachability graph."""
    g = _road_graph(config)
    t = _threshold(config)
    r = _reachability_graph(config, g, t)
    report = bound_report(r, _k(config), alpha=config.alpha)
    _emit(config, {
        **report.as_dict(),
        'graph_fingerprint': _fingerprint(g, t),
    })
    return 0


def _detour_report(
    config: RunConfig,
    g: RoadGraph,
    stations: DominatingSet,
    t: float,
) -> Dict[str, Any]:
    report = detour_experiment(
        g=g,
        X=stations,
        t=t,
        pairs=config.pairs,
        seed=config.seed,
        threads=config.threads,
    )
    if config.csv_output is not None:
        persistence.write_detour_csv(config.csv_output, report.records)
    return report.as_dict()


def evaluate(config: RunConfig) -> int:
    """Write full evaluation report of a station set."""
    g = _road_graph(config)
    stations, t = _stations(config, g)
    if not t:
        raise ConfigurationError('A threshold is required, use --t-km or --t.')

    stats = station_reachability_stats(
        g,
        stations,
        config.distances_m,
        threads=config.threads,
    )
    profile = coverage_profile(
        g,
        stations,
        config.coverage_m or (t,),
        threads=config.threads,
    )
    _emit(config, {
        'graph_fingerprint': _fingerprint(g, t),
        'stats_by_distance': stats.as_rows(),
        'coverage_multiplicity': [
            {'q_m': q, 'k': k}
            for q, k
            in profile
        ],
        'detour': _detour_report(config, g, stations, t),
    })
    return 0


def detour(config: RunConfig) -> int:
    """Write detour experiment report of a station set."""
    g = _road_graph(config)
    stations, t = _stations(config, g)
    if not t:
        raise ConfigurationError('A threshold is required, use --t-km or --t.')
    _emit(config, {
        'graph_fingerprint': _fingerprint(g, t),
        'detour': _detour_report(config, g, stations, t),
    })
    return 0


def export(config: RunConfig) -> int:
    """Write GeoJSON of road network and optional stations to --output."""
    if config.output is None:
        raise ConfigurationError('export requires --output.')
    g = _road_graph(config)
    members: Tuple[int, ...] = ()
    if config.stations is not None:
        members = _stations(config, g)[0].members

    collection = export_geojson(g, members)
    persistence.write_geojson(config.output, collection)
    return 0


def compare(config: RunConfig) -> int:
    """Compare greedy and best-of-runs randomized set sizes for several k."""
    g = _road_graph(config)
    t = _threshold(config)
    if not config.ks:
        raise ConfigurationError('compare requires at least one --k value.')
    r = _reachability_graph(config, g, t)
    rows = compare_algorithms(
        r=r,
        ks=config.ks,
        runs=config.runs,
        base_seed=config.seed,
        mode=config.mode,
        threads=config.threads,
    )
    _emit(config, {'graph_fingerprint': _fingerprint(g, t), 'rows': rows})
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'build-reach': build_reach,
    'dominate': dominate,
    'bounds': bounds,
    'evaluate': evaluate,
    'detour': detour,
    'export': export,
    'verify': verify,
    'compare': compare,
}
