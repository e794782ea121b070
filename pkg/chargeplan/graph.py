"""
Road network graph model and exact shortest path primitives.

The road network is a weighted undirected simple graph where vertices are
intersections and dead-ends, and edge weights are road segment lengths in
meters. Vertex ids are arbitrary nonnegative integers; internally every
vertex is addressed by a dense index into the sorted vertex id sequence, so
that index order and vertex id order always coincide.
"""

import csv
import heapq
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import (
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import geojson

from chargeplan.exceptions import GraphFormatError, InvalidVertexError

logger = logging.getLogger(__name__)

NODE_COLUMNS = ('id', 'lon', 'lat')
EDGE_COLUMNS = ('u', 'v', 'length_m')

Vertex = Tuple[int, float, float]
Edge = Tuple[int, int, float]


class RoadGraph:
    """
    Immutable weighted undirected simple graph of a road network.

    :param vertices: Iterable of (vertex id, longitude, latitude) triples.
    :param edges: Iterable of (u, v, length in meters) triples. Duplicate rows
        of the same undirected edge are merged if their lengths are equal.
    :param edge_rows: Optional row numbers of `edges`, only used in order to
        point at the offending input row in error messages.
    """

    vertex_ids: Tuple[int, ...]
    edges: Tuple[Edge, ...]

    def __init__(
        self,
        vertices: Iterable[Vertex],
        edges: Iterable[Edge],
        edge_rows: Optional[Sequence[int]] = None,
    ) -> None:
        """Construct road graph and validate all graph invariants."""
        coordinates: Dict[int, Tuple[float, float]] = {}
        for vertex_id, lon, lat in vertices:
            if vertex_id in coordinates:
                raise GraphFormatError(f'duplicate vertex id {vertex_id}')
            coordinates[vertex_id] = (float(lon), float(lat))

        self.vertex_ids = tuple(sorted(coordinates))
        self._index = {
            vertex_id: index
            for index, vertex_id
            in enumerate(self.vertex_ids)
        }
        self._coordinates = [coordinates[v] for v in self.vertex_ids]

        adjacency: List[Dict[int, float]] = [{} for _ in self.vertex_ids]
        merged = 0
        for position, (u, v, length) in enumerate(edges):
            row = edge_rows[position] if edge_rows else 0
            for endpoint in (u, v):
                if endpoint not in self._index:
                    raise GraphFormatError(
                        f'unknown endpoint {endpoint} in edge ({u}, {v})',
                        row=row,
                    )
            if u == v:
                raise GraphFormatError(f'self-loop at vertex {u}', row=row)
            if not length > 0:
                raise GraphFormatError(
                    f'nonpositive length {length} of edge ({u}, {v})',
                    row=row,
                )
            if not math.isfinite(length):
                raise GraphFormatError(
                    f'non-finite length of edge ({u}, {v})',
                    row=row,
                )

            i, j = self._index[u], self._index[v]
            existing = adjacency[i].get(j)
            if existing is None:
                adjacency[i][j] = length
                adjacency[j][i] = length
            elif existing == length:
                merged += 1
            else:
                raise GraphFormatError(
                    f'conflicting duplicate edge ({u}, {v}) with lengths '
                    f'{existing} and {length}',
                    row=row,
                )

        if merged:
            logger.debug(f'[road_graph] Merged {merged} duplicate edge rows.')

        # Neighbor lists sorted by dense index, i.e. by vertex id
        self._adjacency: List[List[Tuple[int, float]]] = [
            sorted(neighbors.items())
            for neighbors
            in adjacency
        ]
        self.edges = tuple(
            (self.vertex_ids[i], self.vertex_ids[j], length)
            for i, neighbors in enumerate(self._adjacency)
            for j, length in neighbors
            if i < j
        )

    @property
    def n(self) -> int:
        """Return number of vertices."""
        return len(self.vertex_ids)

    @property
    def m(self) -> int:
        """Return number of edges."""
        return len(self.edges)

    @property
    def isolated_vertices(self) -> Tuple[int, ...]:
        """Return ids of vertices without any incident edge."""
        return tuple(
            self.vertex_ids[index]
            for index, neighbors
            in enumerate(self._adjacency)
            if not neighbors
        )

    @property
    def max_edge_length(self) -> float:
        """Return the greatest edge length, 0 for an edgeless graph."""
        return max((length for _, _, length in self.edges), default=0.0)

    def index_of(self, vertex: int) -> int:
        """
        Return dense index of vertex id.

        :raises InvalidVertexError: If the vertex is not part of the graph.
        """
        try:
            return self._index[vertex]
        except (KeyError, TypeError):
            raise InvalidVertexError(f'vertex {vertex} not in graph') from None

    def __contains__(self, vertex: object) -> bool:
        """Return True if vertex id is part of the graph."""
        return vertex in self._index

    def coordinates(self, vertex: int) -> Tuple[float, float]:
        """Return (longitude, latitude) of vertex."""
        return self._coordinates[self.index_of(vertex)]

    def neighbors(self, vertex: int) -> List[Tuple[int, float]]:
        """Return (neighbor id, edge length) pairs sorted by neighbor id."""
        return [
            (self.vertex_ids[j], length)
            for j, length
            in self._adjacency[self.index_of(vertex)]
        ]

    def degree(self, vertex: int) -> int:
        """Return the number of road segments incident to vertex."""
        return len(self._adjacency[self.index_of(vertex)])

    def dense_neighbors(self, index: int) -> List[Tuple[int, float]]:
        """Return (neighbor index, edge length) pairs of dense index."""
        return self._adjacency[index]

    def dense_distances(
        self,
        source: int,
        cutoff: float = math.inf,
    ) -> Dict[int, float]:
        """
        Return shortest path distances from dense index `source`.

        Dijkstra's algorithm with a binary heap and lazy deletion. Vertices
        further away than `cutoff` are never queued, so the search terminates
        when all vertices within `cutoff` have been settled.

        :param source: Dense index of source vertex.
        :param cutoff: Inclusive distance limit in meters.
        :return: Dictionary from dense index to distance, source included.
        """
        distances, _ = _dijkstra(self._adjacency, source, cutoff)
        return distances

    def __repr__(self) -> str:
        """Return string representation of road graph."""
        return f'RoadGraph(n={self.n}, m={self.m})'


def _dijkstra(
    adjacency: List[List[Tuple[int, float]]],
    source: int,
    cutoff: float = math.inf,
    target: Optional[int] = None,
) -> Tuple[Dict[int, float], Dict[int, int]]:
    """Return distance and predecessor maps of a bounded Dijkstra search."""
    distances = {source: 0.0}
    predecessors: Dict[int, int] = {}
    heap = [(0.0, source)]
    while heap:
        distance, vertex = heapq.heappop(heap)
        if distance > distances[vertex]:
            # Stale queue entry, superseded by a later decrease
            continue
        if vertex == target:
            break

        for neighbor, length in adjacency[vertex]:
            new_distance = distance + length
            if new_distance <= cutoff \
                    and new_distance < distances.get(neighbor, math.inf):
                distances[neighbor] = new_distance
                predecessors[neighbor] = vertex
                heapq.heappush(heap, (new_distance, neighbor))

    return distances, predecessors


@dataclass(frozen=True)
class PathResult:
    """Shortest path between two vertices, `inf` distance if unreachable."""

    distance: float
    path: Tuple[int, ...]

    @property
    def reachable(self) -> bool:
        """Return True if the target could be reached."""
        return math.isfinite(self.distance)


def shortest_path(g: RoadGraph, s: int, t: int) -> PathResult:
    """
    Return exact shortest path from s to t.

    :param g: Road network graph.
    :param s: Source vertex id.
    :param t: Target vertex id.
    :return: PathResult with distance `inf` and empty path if t is not
        reachable from s.
    """
    source, target = g.index_of(s), g.index_of(t)
    if source == target:
        return PathResult(distance=0.0, path=(s,))

    distances, predecessors = _dijkstra(g._adjacency, source, target=target)
    if target not in distances:
        return PathResult(distance=math.inf, path=())

    path = [target]
    while path[-1] != source:
        path.append(predecessors[path[-1]])

    return PathResult(
        distance=distances[target],
        path=tuple(g.vertex_ids[index] for index in reversed(path)),
    )


def bounded_dijkstra(
    g: RoadGraph,
    s: int,
    t: float,
) -> List[Tuple[int, float]]:
    """
    Return all vertices within network distance t of s.

    :param g: Road network graph.
    :param s: Source vertex id.
    :param t: Inclusive threshold in meters.
    :return: (vertex id, distance) pairs sorted by vertex id, s excluded.
    """
    source = g.index_of(s)
    if not t >= 0:
        raise ValueError(f'Threshold must be nonnegative, got {t}.')

    distances = g.dense_distances(source, cutoff=t)
    return [
        (g.vertex_ids[index], distance)
        for index, distance
        in sorted(distances.items())
        if index != source
    ]


def single_source_distances(
    g: RoadGraph,
    s: int,
    cutoff: Optional[float] = None,
) -> Dict[int, float]:
    """
    Return distances from s to every vertex reachable within cutoff.

    :param g: Road network graph.
    :param s: Source vertex id.
    :param cutoff: Optional inclusive distance limit in meters.
    :return: Dictionary keyed by vertex id, including s itself at distance 0.
    """
    distances = g.dense_distances(
        g.index_of(s),
        cutoff=math.inf if cutoff is None else cutoff,
    )
    return {
        g.vertex_ids[index]: distance
        for index, distance
        in distances.items()
    }


def _check_header(
    fieldnames: Optional[Sequence[str]],
    expected: Tuple[str, ...],
    table: str,
) -> None:
    """Raise GraphFormatError if the CSV header is not exactly `expected`."""
    header = tuple(name.strip() for name in fieldnames or ())
    if header != expected:
        raise GraphFormatError(
            f'{table} table header must be "{",".join(expected)}", '
            f'got "{",".join(header)}"',
            row=1,
        )


def _parse_rows(
    document: Iterable[str],
    columns: Tuple[str, ...],
    table: str,
) -> Iterable[Tuple[int, List[str]]]:
    """Yield (row number, stripped fields) of a CSV document."""
    reader = csv.reader(document)
    try:
        header = next(reader)
    except StopIteration:
        raise GraphFormatError(f'{table} table is empty', row=1) from None
    _check_header(header, columns, table)

    for fields in reader:
        if not fields or all(not field.strip() for field in fields):
            continue
        if len(fields) != len(columns):
            raise GraphFormatError(
                f'malformed {table} row, expected {len(columns)} fields '
                f'but got {len(fields)}',
                row=reader.line_num,
            )
        yield reader.line_num, [field.strip() for field in fields]


def _parse_vertex_id(field: str, row: int) -> int:
    """Return nonnegative integer vertex id parsed from field."""
    try:
        vertex_id = int(field)
    except ValueError:
        raise GraphFormatError(
            f'malformed vertex id "{field}"',
            row=row,
        ) from None
    if vertex_id < 0:
        raise GraphFormatError(f'negative vertex id {vertex_id}', row=row)
    return vertex_id


def _parse_float(field: str, name: str, row: int) -> float:
    """Return float parsed from field."""
    try:
        return float(field)
    except ValueError:
        raise GraphFormatError(
            f'malformed {name} "{field}"',
            row=row,
        ) from None


def _parse_coordinate(field: str, name: str, limit: float, row: int) -> float:
    """Return finite coordinate parsed from field, within [-limit, limit]."""
    value = _parse_float(field, name, row)
    if not math.isfinite(value) or abs(value) > limit:
        raise GraphFormatError(
            f'{name} {field} out of range [-{limit:g}, {limit:g}]',
            row=row,
        )
    return value


def load_road_graph(
    nodes_doc: Iterable[str],
    edges_doc: Iterable[str],
) -> RoadGraph:
    """
    Return road graph parsed from node and edge CSV documents.

    :param nodes_doc: Lines of CSV with header `id,lon,lat`.
    :param edges_doc: Lines of CSV with header `u,v,length_m`.
    :raises GraphFormatError: Naming the offending row on unknown endpoints,
        nonpositive lengths, conflicting duplicate edges, coordinates out of
        range and malformed rows.
    """
    vertices: List[Vertex] = []
    seen: Dict[int, int] = {}
    node_rows = _parse_rows(nodes_doc, NODE_COLUMNS, 'nodes')
    for row, (id_field, lon, lat) in node_rows:
        vertex_id = _parse_vertex_id(id_field, row)
        if vertex_id in seen:
            raise GraphFormatError(
                f'duplicate vertex id {vertex_id}, first declared on row '
                f'{seen[vertex_id]}',
                row=row,
            )
        seen[vertex_id] = row
        vertices.append((
            vertex_id,
            _parse_coordinate(lon, 'longitude', 180.0, row),
            _parse_coordinate(lat, 'latitude', 90.0, row),
        ))

    edges: List[Edge] = []
    rows: List[int] = []
    for row, (u, v, length) in _parse_rows(edges_doc, EDGE_COLUMNS, 'edges'):
        edges.append((
            _parse_vertex_id(u, row),
            _parse_vertex_id(v, row),
            _parse_float(length, 'length', row),
        ))
        rows.append(row)

    graph = RoadGraph(vertices=vertices, edges=edges, edge_rows=rows)
    isolated = graph.isolated_vertices
    if isolated:
        logger.warning(
            f'[road_graph] {len(isolated)} isolated vertices: '
            f'{list(isolated[:20])}'
            f'{" ..." if len(isolated) > 20 else ""}',
        )
    logger.info(
        f'[road_graph] Loaded road graph with n={graph.n}, m={graph.m}.',
    )
    return graph


def read_road_graph(nodes_path: Path, edges_path: Path) -> RoadGraph:
    """
    Return road graph read from node and edge CSV files.

    :param nodes_path: Path to UTF-8 CSV file with header `id,lon,lat`.
    :param edges_path: Path to UTF-8 CSV file with header `u,v,length_m`.
    """
    with open(nodes_path, encoding='utf-8-sig', newline='') as nodes_file, \
            open(edges_path, encoding='utf-8-sig', newline='') as edges_file:
        return load_road_graph(nodes_file, edges_file)


def grid_road_graph(
    rows: int,
    cols: int,
    spacing_m: float = 250.0,
    origin: Tuple[float, float] = (-71.06, 42.36),
) -> RoadGraph:
    """
    Return a synthetic rectangular grid road network.

    Vertex `r * cols + c` sits in row r and column c, and is connected to its
    horizontal and vertical neighbors by road segments of `spacing_m` meters.

    :param rows: Number of grid rows.
    :param cols: Number of grid columns.
    :param spacing_m: Length of every road segment.
    :param origin: (lon, lat) of vertex 0, only used for exported geometry.
    """
    lon0, lat0 = origin
    lat_step = spacing_m / 111_320.0
    lon_step = lat_step / math.cos(math.radians(lat0))

    vertices = [
        (r * cols + c, lon0 + c * lon_step, lat0 + r * lat_step)
        for r in range(rows)
        for c in range(cols)
    ]
    edges: List[Edge] = []
    for r in range(rows):
        for c in range(cols):
            vertex = r * cols + c
            if c + 1 < cols:
                edges.append((vertex, vertex + 1, spacing_m))
            if r + 1 < rows:
                edges.append((vertex, vertex + cols, spacing_m))

    return RoadGraph(vertices=vertices, edges=edges)


def export_geojson(
    g: RoadGraph,
    stations: Optional[Iterable[int]] = None,
) -> geojson.FeatureCollection:
    """
    Return GeoJSON rendering of road network and charging stations.

    Every edge becomes a LineString feature, and every station vertex a Point
    feature with the property `"station": true`.

    :param g: Road network graph.
    :param stations: Optional station vertex ids, e.g. a DominatingSet.
    :raises InvalidVertexError: If a station is not part of the graph.
    """
    station_ids = sorted(set(stations or ()))
    for station in station_ids:
        g.index_of(station)

    features = [
        geojson.Feature(
            geometry=geojson.LineString([
                g.coordinates(u),
                g.coordinates(v),
            ]),
            properties={'u': u, 'v': v, 'length_m': length},
        )
        for u, v, length
        in g.edges
    ]
    features.extend(
        geojson.Feature(
            geometry=geojson.Point(g.coordinates(station)),
            properties={'id': station, 'station': True},
        )
        for station
        in station_ids
    )
    return geojson.FeatureCollection(features)
