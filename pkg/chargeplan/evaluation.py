"""
Evaluation of charging station placements on the road network.

Placements are evaluated by how many stations can be reached from every
other location as a function of distance, and by how long a detour a driver
has to make in order to recharge on the way to a destination.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
)

import numpy as np

from chargeplan.domination import best_of_runs, greedy_k_dominating
from chargeplan.exceptions import PreconditionError
from chargeplan.graph import RoadGraph
from chargeplan.reachability import ReachabilityGraph

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

NO_STATION_IN_RANGE = 'no-station-in-range'
DESTINATION_UNREACHABLE = 'destination-unreachable'


def _parallel_map(
    function: Callable[[T], R],
    items: Sequence[T],
    threads: int,
) -> List[R]:
    """Return [function(item) for item in items], possibly using threads."""
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(function, items))
    return [function(item) for item in items]


def _station_indices(g: RoadGraph, X: Iterable[int]) -> List[int]:
    """Return sorted dense indices of a nonempty station set."""
    stations = sorted({g.index_of(station) for station in X})
    if not stations:
        raise PreconditionError('Station set is empty.')
    return stations


@dataclass(frozen=True)
class ReachabilityStats:
    """
    Number of stations reachable from non-station vertices, per distance.

    mean, std and min are computed over all vertices outside the station set,
    std being the population standard deviation.
    """

    distances: Tuple[float, ...]
    mean: Tuple[float, ...]
    std: Tuple[float, ...]
    min: Tuple[int, ...]
    population: int

    def as_rows(self) -> List[Dict[str, float]]:
        """Return one dictionary per distance, for JSON reports."""
        return [
            {'distance_m': d, 'mean': mean, 'std': std, 'min': minimum}
            for d, mean, std, minimum
            in zip(self.distances, self.mean, self.std, self.min)
        ]


def _reachable_station_counts(
    g: RoadGraph,
    stations: List[int],
    distances: Sequence[float],
    threads: int = 1,
) -> np.ndarray:
    """
    Return (n, len(distances)) array of stations within each distance.

    One bounded search is made per station, with radius max(distances).
    """
    thresholds = np.asarray(distances, dtype=float)
    radius = float(thresholds[-1]) if len(thresholds) else 0.0

    def search(station: int) -> Dict[int, float]:
        return g.dense_distances(station, cutoff=radius)

    counts = np.zeros((g.n, len(thresholds)), dtype=np.int64)
    for reached in _parallel_map(search, stations, threads):
        size = len(reached)
        indices = np.fromiter(reached.keys(), dtype=np.int64, count=size)
        lengths = np.fromiter(reached.values(), dtype=float, count=size)
        counts[indices] += lengths[:, None] <= thresholds[None, :]
    return counts


def station_reachability_stats(
    g: RoadGraph,
    X: Iterable[int],
    distances: Sequence[float],
    threads: int = 1,
) -> ReachabilityStats:
    """
    Return statistics of the number of stations reachable within distances.

    :param g: Road network graph.
    :param X: Station vertex ids.
    :param distances: Ascending road network distances in meters.
    :param threads: Number of worker threads.
    """
    stations = _station_indices(g, X)
    distances = [float(d) for d in distances]
    if not distances:
        raise PreconditionError('No distances given.')
    if any(a > b for a, b in zip(distances, distances[1:])):
        raise PreconditionError(f'Distances must be ascending: {distances}.')

    counts = _reachable_station_counts(g, stations, distances, threads)
    outside = np.ones(g.n, dtype=bool)
    outside[stations] = False
    population = counts[outside]
    if len(population) == 0:
        raise PreconditionError('Every vertex is a station.')

    stats = ReachabilityStats(
        distances=tuple(distances),
        mean=tuple(float(v) for v in population.mean(axis=0)),
        std=tuple(float(v) for v in population.std(axis=0)),
        min=tuple(int(v) for v in population.min(axis=0)),
        population=len(population),
    )
    logger.info(
        f'[stats] {len(stations)} stations, {stats.population} vertices: '
        f'mean {", ".join(f"{m:.2f}" for m in stats.mean)}.',
    )
    return stats


def coverage_profile(
    g: RoadGraph,
    X: Iterable[int],
    thresholds: Sequence[float],
    threads: int = 1,
) -> List[Tuple[float, int]]:
    """
    Return coverage multiplicity for several radii.

    :return: (q, k) pairs in ascending order of q, where k is the largest
        multiplicity for which X is k-dominating at radius q.
    """
    stations = _station_indices(g, X)
    radii = sorted(float(q) for q in thresholds)
    outside = np.ones(g.n, dtype=bool)
    outside[stations] = False
    if not outside.any():
        return [(q, len(stations)) for q in radii]

    counts = _reachable_station_counts(g, stations, radii, threads)[outside]
    return [
        (q, int(minimum))
        for q, minimum
        in zip(radii, counts.min(axis=0))
    ]


def coverage_multiplicity_at(
    g: RoadGraph,
    X: Iterable[int],
    q: float,
) -> int:
    """
    Return the smallest number of stations within q of a non-station vertex.

    This is the largest k for which X is k-dominating in the reachability
    graph with threshold q. If every vertex is a station, |X| is returned.
    """
    return coverage_profile(g, X, [q])[0][1]


@dataclass(frozen=True)
class DetourRecord:
    """
    Detour of a trip which recharges at the best station near the source.

    station and detour are None for infeasible trips, reason telling why.
    """

    source: int
    destination: int
    station: Optional[int]
    detour: Optional[float]
    candidates: int
    reason: Optional[str] = None

    @property
    def feasible(self) -> bool:
        """Return True if the trip could recharge and reach its destination."""
        return self.detour is not None

    def as_dict(self) -> Dict[str, Any]:
        """Return JSON serializable representation."""
        return asdict(self)


def _min_detour(
    g: RoadGraph,
    source: int,
    destination: int,
    stations: List[int],
    t: float,
) -> DetourRecord:
    """Return detour record between dense indices."""
    from_source = g.dense_distances(source)
    candidates = [
        station
        for station in stations
        if from_source.get(station, math.inf) <= t
    ]

    def record(
        station: Optional[int] = None,
        detour: Optional[float] = None,
        reason: Optional[str] = None,
    ) -> DetourRecord:
        return DetourRecord(
            source=g.vertex_ids[source],
            destination=g.vertex_ids[destination],
            station=None if station is None else g.vertex_ids[station],
            detour=detour,
            candidates=len(candidates),
            reason=reason,
        )

    if destination not in from_source:
        return record(reason=DESTINATION_UNREACHABLE)
    if not candidates:
        return record(reason=NO_STATION_IN_RANGE)

    to_destination = g.dense_distances(destination)
    total, station = min(
        (from_source[station] + to_destination[station], station)
        for station in candidates
    )
    return record(
        station=station,
        detour=max(0.0, total - from_source[destination]),
    )


def min_detour(
    g: RoadGraph,
    s: int,
    dest: int,
    X: Iterable[int],
    t: float,
) -> DetourRecord:
    """
    Return the smallest detour from s to dest via a station within t of s.

    If s is itself a station, it is a candidate at distance 0.

    :param g: Road network graph.
    :param s: Source vertex id.
    :param dest: Destination vertex id.
    :param X: Station vertex ids.
    :param t: Largest distance from s to a candidate station, in meters.
    """
    return _min_detour(
        g=g,
        source=g.index_of(s),
        destination=g.index_of(dest),
        stations=_station_indices(g, X),
        t=t,
    )


@dataclass(frozen=True)
class DetourReport:
    """
    Detour statistics of a sample of trips.

    mean and std (sample standard deviation) are taken over feasible trips
    only, and are None if no trip is feasible.
    """

    mean: Optional[float]
    std: Optional[float]
    infeasible_count: int
    records: Tuple[DetourRecord, ...]

    def as_dict(self) -> Dict[str, Any]:
        """Return JSON serializable representation."""
        return {
            'mean_m': self.mean,
            'std_m': self.std,
            'infeasible_count': self.infeasible_count,
            'records': [record.as_dict() for record in self.records],
        }


def sample_pairs(n: int, pairs: int, seed: int) -> List[Tuple[int, int]]:
    """
    Return distinct ordered (source, destination) index pairs, source != dest.

    Pairs are drawn uniformly without replacement from all n (n - 1) ordered
    pairs with a PCG64 generator.
    """
    if pairs < 1:
        raise PreconditionError(f'pairs must be at least 1, got {pairs}.')
    population = n * (n - 1)
    if pairs > population:
        raise PreconditionError(
            f'Graph with {n} vertices has only {population} ordered pairs, '
            f'{pairs} requested.',
        )

    generator = np.random.Generator(np.random.PCG64(seed))
    flat = generator.choice(population, size=pairs, replace=False)
    sources, offsets = np.divmod(flat, n - 1)
    destinations = offsets + (offsets >= sources)
    return [(int(s), int(d)) for s, d in zip(sources, destinations)]


def detour_experiment(
    g: RoadGraph,
    X: Iterable[int],
    t: float,
    pairs: int,
    seed: int,
    threads: int = 1,
) -> DetourReport:
    """
    Return detour statistics for randomly sampled trips.

    :param g: Road network graph.
    :param X: Station vertex ids.
    :param t: Largest distance from source to a candidate station.
    :param pairs: Number of sampled (source, destination) pairs.
    :param seed: Seed for sampling pairs.
    :param threads: Number of worker threads.
    """
    stations = _station_indices(g, X)
    sample = sample_pairs(g.n, pairs, seed)

    def evaluate(pair: Tuple[int, int]) -> DetourRecord:
        return _min_detour(g, pair[0], pair[1], stations, t)

    records = tuple(_parallel_map(evaluate, sample, threads))
    detours = np.array(
        [record.detour for record in records if record.feasible],
        dtype=float,
    )
    infeasible = len(records) - len(detours)
    if infeasible:
        logger.warning(
            f'[detour] {infeasible} of {len(records)} sampled trips are '
            'infeasible and excluded from the statistics.',
        )

    mean = float(detours.mean()) if len(detours) else None
    if len(detours) >= 2:
        std: Optional[float] = float(detours.std(ddof=1))
    else:
        std = 0.0 if len(detours) else None

    report = DetourReport(
        mean=mean,
        std=std,
        infeasible_count=infeasible,
        records=records,
    )
    logger.info(
        f'[detour] {len(detours)} feasible trips: mean {mean}, std {std}.',
    )
    return report


def compare_algorithms(
    r: ReachabilityGraph,
    ks: Sequence[int],
    runs: int = 10,
    base_seed: int = 0,
    mode: str = 'avg-degree',
    threads: int = 1,
) -> List[Dict[str, Any]]:
    """
    Return set cardinalities of the greedy and randomized algorithms per k.

    The greedy algorithm is run once, the randomized algorithm `runs` times
    keeping the smallest set.

    :return: One {'k', 'greedy', 'randomized', 'best_seed'} row per k.
    """
    rows = []
    for k in ks:
        greedy = greedy_k_dominating(r, k)
        randomized = best_of_runs(
            r=r,
            k=k,
            mode=mode,
            runs=runs,
            base_seed=base_seed,
            threads=threads,
        )
        rows.append({
            'k': k,
            'greedy': len(greedy),
            'randomized': len(randomized),
            'best_seed': randomized.provenance.seed,
        })
        logger.info(
            f'[compare] k={k}: greedy {len(greedy)}, '
            f'randomized {len(randomized)}.',
        )
    return rows
