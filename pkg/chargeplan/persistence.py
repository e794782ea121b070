"""
Module which persists reachability graphs and result artifacts to disk.

Reachability graphs are expensive to construct, and are therefore cached in
a compact binary format under $XDG_CACHE_HOME/chargeplan. A cache entry is
only used if it was computed with the same threshold from a road graph with
the same vertex ids, edges and edge lengths.
"""

import csv
import hashlib
import logging
import struct
from pathlib import Path
from typing import Any, Iterable, List, Optional, Tuple

import geojson
import numpy as np

from chargeplan import utils
from chargeplan.domination import DominatingSet
from chargeplan.evaluation import DetourRecord
from chargeplan.exceptions import ConfigurationError
from chargeplan.graph import RoadGraph
from chargeplan.reachability import (
    ReachabilityGraph,
    build_reachability_graph,
)
from chargeplan.xdg import XDG

logger = logging.getLogger(__name__)

CACHE_MAGIC = b'CPRG'
CACHE_VERSION = 2

# magic, format version, n, m of road graph, t in meters, road graph digest
CACHE_HEADER = struct.Struct('<4sHQQd16s')

DETOUR_CSV_COLUMNS = ('source', 'dest', 'station', 'detour_m', 'candidates')


def road_graph_digest(g: RoadGraph) -> bytes:
    """Return md5 digest of the vertex ids, edges and edge lengths of g."""
    md5 = hashlib.md5()
    md5.update(np.array(g.vertex_ids, dtype='<i8').tobytes())
    md5.update(
        np.array([(u, v) for u, v, _ in g.edges], dtype='<i8').tobytes(),
    )
    md5.update(
        np.array([length for _, _, length in g.edges], dtype='<f8')
        .tobytes(),
    )
    return md5.digest()


def cache_path_for(
    g: RoadGraph,
    t: float,
    directory: Optional[Path] = None,
) -> Path:
    """
    Return path to cache file of reachability graph of g with threshold t.

    :param g: Road network graph.
    :param t: Reachability threshold in meters.
    :param directory: Cache directory, $XDG_CACHE_HOME/chargeplan by default.
    """
    identity = f'{g.n}:{g.m}:{t!r}:{road_graph_digest(g).hex()}'
    digest = hashlib.md5(identity.encode('utf-8')).hexdigest()
    resource = f'reachability-{digest}.bin'
    if directory is None:
        return XDG('chargeplan').cache(resource)

    directory.mkdir(parents=True, exist_ok=True)
    return directory / resource


def save_reachability_graph(
    r: ReachabilityGraph,
    g: RoadGraph,
    path: Path,
) -> None:
    """
    Write reachability graph to binary cache file.

    Little endian header followed by the vertex ids, and then for every
    vertex its neighbor count and sorted neighbor indices.

    :param r: Reachability graph to be cached.
    :param g: Road graph r was derived from.
    :param path: Path to cache file.
    """
    n, m, t = r.fingerprint
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as cache_file:
        header = CACHE_HEADER.pack(
            CACHE_MAGIC,
            CACHE_VERSION,
            n,
            m,
            t,
            road_graph_digest(g),
        )
        cache_file.write(header)
        cache_file.write(r.vertex_ids.astype('<i8').tobytes())
        for index in range(n):
            neighbors = r.dense_neighbors(index)
            cache_file.write(struct.pack('<I', len(neighbors)))
            cache_file.write(neighbors.astype('<u4').tobytes())
    logger.debug(f'[cache] Wrote {r} to "{path}".')


def _read_rows(
    data: bytes,
    n: int,
    vertex_ids: Tuple[int, ...],
) -> Optional[List[np.ndarray]]:
    """Return neighbor index arrays, or None if the vertex ids differ."""
    offset = CACHE_HEADER.size
    cached_ids = np.frombuffer(data, dtype='<i8', count=n, offset=offset)
    if tuple(int(v) for v in cached_ids) != vertex_ids:
        return None
    offset += 8 * n

    rows = []
    for _ in range(n):
        count, = struct.unpack_from('<I', data, offset)
        offset += 4
        rows.append(
            np.frombuffer(data, dtype='<u4', count=count, offset=offset)
            .astype(np.int32),
        )
        offset += 4 * count
    return rows


def load_reachability_graph(
    path: Path,
    g: RoadGraph,
    t: float,
) -> Optional[ReachabilityGraph]:
    """
    Return cached reachability graph, or None if the cache is not valid.

    :param path: Path to cache file.
    :param g: Road graph the reachability graph should be derived from.
    :param t: Reachability threshold in meters.
    """
    if not path.is_file():
        return None

    data = path.read_bytes()
    try:
        magic, version, n, m, cached_t, digest = CACHE_HEADER.unpack_from(
            data,
        )
    except struct.error:
        magic, version, n, m, cached_t, digest = b'', 0, 0, 0, 0.0, b''

    if magic != CACHE_MAGIC or version != CACHE_VERSION:
        logger.warning(f'[cache] "{path}" is not a valid cache file. Ignored.')
        return None
    if (n, m, cached_t) != (g.n, g.m, t):
        logger.warning(
            f'[cache] Invalidated "{path}": cached (n, m, t) = '
            f'({n}, {m}, {cached_t}) != ({g.n}, {g.m}, {t}).',
        )
        return None
    if digest != road_graph_digest(g):
        logger.warning(
            f'[cache] Invalidated "{path}": road graph edges or edge '
            'lengths differ.',
        )
        return None

    try:
        rows = _read_rows(data, n, g.vertex_ids)
    except (ValueError, struct.error):
        logger.warning(f'[cache] "{path}" is truncated. Ignored.')
        return None
    if rows is None:
        logger.warning(f'[cache] Invalidated "{path}": vertex ids differ.')
        return None

    logger.info(f'[cache] Loaded reachability graph from "{path}".')
    return ReachabilityGraph._from_neighbor_arrays(
        vertex_ids=g.vertex_ids,
        rows=rows,
        threshold_t=t,
        source_m=m,
    )


def cached_reachability_graph(
    g: RoadGraph,
    t: float,
    cache_path: Optional[Path] = None,
    use_cache: bool = True,
    threads: int = 1,
) -> ReachabilityGraph:
    """
    Return reachability graph from cache, building and caching it if needed.

    :param g: Road network graph.
    :param t: Reachability threshold in meters.
    :param cache_path: Cache file path, derived from g and t by default.
    :param use_cache: If False, the cache is neither read nor written.
    :param threads: Number of worker threads used for construction.
    """
    if not use_cache:
        return build_reachability_graph(g, t, threads=threads)

    path = cache_path or cache_path_for(g, t)
    reachability_graph = load_reachability_graph(path, g, t)
    if reachability_graph is None:
        reachability_graph = build_reachability_graph(g, t, threads=threads)
        save_reachability_graph(reachability_graph, g, path)
    return reachability_graph


def save_dominating_set(
    D: DominatingSet,
    path: Path,
    run_config: Optional[Any] = None,
) -> None:
    """
    Write dominating set to JSON file.

    :param D: Dominating set.
    :param path: Destination path.
    :param run_config: Optional run configuration embedded for provenance.
    """
    data: Any = D.as_dict()
    if run_config is not None:
        data = {**data, 'run_config': run_config}
    utils.dump_json(path, data)
    logger.info(f'[dominating_set] Wrote {len(D)} vertices to "{path}".')


def load_dominating_set(path: Path) -> DominatingSet:
    """
    Return dominating set read from JSON file.

    :raises FileNotFoundError: If the file does not exist.
    :raises ConfigurationError: If the file is not a dominating set.
    """
    try:
        return DominatingSet.from_dict(utils.load_json(path))
    except (KeyError, TypeError, ValueError) as error:
        raise ConfigurationError(
            f'"{path}" is not a valid dominating set file: {error!r}',
        ) from None


def write_report(path: Path, report: Any) -> None:
    """Write JSON report with stable key order."""
    utils.dump_json(path, report)
    logger.info(f'[report] Wrote "{path}".')


def write_detour_csv(path: Path, records: Iterable[DetourRecord]) -> None:
    """Write detour records to CSV file, infeasible values left empty."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as csv_file:
        writer = csv.writer(csv_file, lineterminator='\n')
        writer.writerow(DETOUR_CSV_COLUMNS)
        for record in records:
            writer.writerow((
                record.source,
                record.destination,
                '' if record.station is None else record.station,
                '' if record.detour is None else repr(record.detour),
                record.candidates,
            ))
    logger.info(f'[report] Wrote detour records to "{path}".')


def write_geojson(path: Path, collection: geojson.FeatureCollection) -> None:
    """Write GeoJSON feature collection with stable key order."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as geojson_file:
        geojson_file.write(geojson.dumps(collection, sort_keys=True) + '\n')
    logger.info(f'[export] Wrote "{path}".')
