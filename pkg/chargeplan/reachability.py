"""
Reachability graphs derived from road networks.

The reachability graph of a road network for threshold t has the same vertex
set as the road network, and an (unweighted) edge between every pair of
distinct vertices whose shortest path distance in the road network is at most
t meters. Reachability graphs are dense, so the adjacency is stored in
compressed sparse row form: one sorted array of neighbor indices per vertex.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import (
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import numpy as np

from chargeplan.exceptions import (
    InvalidVertexError,
    PreconditionError,
)
from chargeplan.graph import RoadGraph

logger = logging.getLogger(__name__)

# (n, m, t in meters) of the road graph a reachability graph was built from
Fingerprint = Tuple[int, int, float]


@dataclass(frozen=True)
class DegreeStats:
    """Degree statistics of a reachability graph."""

    delta: int
    Delta: int
    dbar: float
    degree_sequence: Tuple[int, ...]

    @property
    def edge_count(self) -> int:
        """Return number of edges, by the handshake lemma."""
        return sum(self.degree_sequence) // 2

    @property
    def density(self) -> float:
        """Return fraction of all vertex pairs which are adjacent."""
        n = len(self.degree_sequence)
        if n < 2:
            return 0.0
        return self.edge_count / (n * (n - 1) / 2)


@dataclass(frozen=True)
class ThresholdBounds:
    """Lower bounds for a sensible reachability threshold, in meters."""

    # Every vertex reaches its nearest road neighbor, i.e. no isolates
    t_minmax: float

    # Every vertex reaches all of its road neighbors
    t_maxedge: float


class ReachabilityGraph:
    """
    Immutable unweighted simple graph in compressed sparse row form.

    :param vertex_ids: Sorted vertex ids, dense index i refers to
        vertex_ids[i].
    :param indptr: Array of length n + 1. The neighbors of dense index i are
        indices[indptr[i]:indptr[i + 1]].
    :param indices: Concatenated sorted neighbor index arrays.
    :param threshold_t: Reachability threshold in meters.
    :param source_m: Number of edges of the road graph the reachability graph
        was built from, if any.
    """

    def __init__(
        self,
        vertex_ids: Sequence[int],
        indptr: np.ndarray,
        indices: np.ndarray,
        threshold_t: float,
        source_m: Optional[int] = None,
    ) -> None:
        """Construct reachability graph from CSR arrays."""
        self.vertex_ids = np.asarray(vertex_ids, dtype=np.int64)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int32)
        self.threshold_t = float(threshold_t)
        self.source_m = source_m

        assert len(self.indptr) == len(self.vertex_ids) + 1
        assert self.indptr[-1] == len(self.indices)
        self._index = {
            int(vertex_id): index
            for index, vertex_id
            in enumerate(self.vertex_ids)
        }

        for array in (self.vertex_ids, self.indptr, self.indices):
            array.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        vertex_ids: Iterable[int],
        edges: Iterable[Tuple[int, int]],
        threshold_t: float = 0.0,
    ) -> 'ReachabilityGraph':
        """
        Return reachability graph from an explicit edge list.

        Used for graphs which are not derived from a road network, such as
        small textbook graphs. Self-loops and repeated edges are ignored.

        :param vertex_ids: All vertex ids of the graph.
        :param edges: Undirected (u, v) vertex id pairs.
        :param threshold_t: Threshold recorded in the fingerprint.
        """
        ids = sorted(set(vertex_ids))
        index = {vertex_id: i for i, vertex_id in enumerate(ids)}
        neighbors: List[Set[int]] = [set() for _ in ids]
        for u, v in edges:
            if u not in index or v not in index:
                raise InvalidVertexError(
                    f'edge ({u}, {v}) has unknown endpoint',
                )
            if u == v:
                continue
            neighbors[index[u]].add(index[v])
            neighbors[index[v]].add(index[u])

        return cls._from_neighbor_arrays(
            vertex_ids=ids,
            rows=[np.array(sorted(row), dtype=np.int32) for row in neighbors],
            threshold_t=threshold_t,
        )

    @classmethod
    def _from_neighbor_arrays(
        cls,
        vertex_ids: Sequence[int],
        rows: Sequence[np.ndarray],
        threshold_t: float,
        source_m: Optional[int] = None,
    ) -> 'ReachabilityGraph':
        """Return reachability graph from one sorted index array per vertex."""
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(row) for row in rows])
        if rows:
            indices = np.concatenate(rows).astype(np.int32, copy=False)
        else:
            indices = np.zeros(0, dtype=np.int32)
        return cls(
            vertex_ids=vertex_ids,
            indptr=indptr,
            indices=indices,
            threshold_t=threshold_t,
            source_m=source_m,
        )

    @property
    def n(self) -> int:
        """Return number of vertices."""
        return len(self.vertex_ids)

    @property
    def m(self) -> int:
        """Return number of (undirected) edges."""
        return len(self.indices) // 2

    @property
    def fingerprint(self) -> Fingerprint:
        """Return (n, m, t) identity of the underlying road graph."""
        source_m = self.m if self.source_m is None else self.source_m
        return (self.n, source_m, self.threshold_t)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Return degree array indexed by dense index."""
        return np.diff(self.indptr)

    @cached_property
    def rows(self) -> np.ndarray:
        """Return dense source index of every entry in `indices`."""
        return np.repeat(np.arange(self.n, dtype=np.int32), self.degrees)

    @cached_property
    def degree_stats(self) -> DegreeStats:
        """Return minimum, maximum and average degree and degree sequence."""
        degrees = self.degrees
        if self.n == 0:
            return DegreeStats(0, 0, 0.0, ())
        return DegreeStats(
            delta=int(degrees.min()),
            Delta=int(degrees.max()),
            dbar=int(degrees.sum()) / self.n,
            degree_sequence=tuple(int(degree) for degree in degrees),
        )

    def index_of(self, vertex: int) -> int:
        """
        Return dense index of vertex id.

        :raises InvalidVertexError: If the vertex is not part of the graph.
        """
        try:
            return self._index[vertex]
        except (KeyError, TypeError):
            raise InvalidVertexError(f'vertex {vertex} not in graph') from None

    def mask_of(self, vertices: Iterable[int]) -> np.ndarray:
        """Return boolean membership array of vertex ids, by dense index."""
        mask = np.zeros(self.n, dtype=bool)
        for vertex in vertices:
            mask[self.index_of(vertex)] = True
        return mask

    def ids_of(self, mask: np.ndarray) -> Tuple[int, ...]:
        """Return sorted vertex ids of boolean membership array."""
        return tuple(int(v) for v in self.vertex_ids[np.flatnonzero(mask)])

    def dense_neighbors(self, index: int) -> np.ndarray:
        """Return sorted neighbor indices of dense index."""
        return self.indices[self.indptr[index]:self.indptr[index + 1]]

    def neighbors(self, vertex: int) -> Tuple[int, ...]:
        """Return sorted neighbor ids of vertex id."""
        neighbors = self.dense_neighbors(self.index_of(vertex))
        return tuple(int(v) for v in self.vertex_ids[neighbors])

    def degree(self, vertex: int) -> int:
        """Return degree of vertex id."""
        return int(self.degrees[self.index_of(vertex)])

    def edge_set(self) -> Set[Tuple[int, int]]:
        """Return all edges as (u, v) vertex id pairs with u < v."""
        rows, cols = self.rows, self.indices
        upper = rows < cols
        return set(zip(
            (int(u) for u in self.vertex_ids[rows[upper]]),
            (int(v) for v in self.vertex_ids[cols[upper]]),
        ))

    def __eq__(self, other: object) -> bool:
        """Return True if other is an identical reachability graph."""
        if not isinstance(other, ReachabilityGraph):
            return NotImplemented
        return self.fingerprint == other.fingerprint \
            and np.array_equal(self.vertex_ids, other.vertex_ids) \
            and np.array_equal(self.indptr, other.indptr) \
            and np.array_equal(self.indices, other.indices)

    def __repr__(self) -> str:
        """Return string representation of reachability graph."""
        return (
            f'ReachabilityGraph(n={self.n}, m={self.m}, '
            f't={self.threshold_t})'
        )


def threshold_lower_bounds(g: RoadGraph) -> ThresholdBounds:
    """
    Return the two lower bounds for a sensible reachability threshold.

    t_minmax is the greatest distance from any vertex to its nearest road
    neighbor, and t_maxedge the greatest edge length.

    :raises PreconditionError: If the road graph has isolated vertices.
    """
    isolated = g.isolated_vertices
    if isolated:
        raise PreconditionError(
            f'{len(isolated)} isolated vertices have no nearest neighbor: '
            f'{list(isolated[:20])}',
        )

    t_minmax = max(
        (
            min(length for _, length in g.dense_neighbors(index))
            for index in range(g.n)
        ),
        default=0.0,
    )
    return ThresholdBounds(t_minmax=t_minmax, t_maxedge=g.max_edge_length)


def build_reachability_graph(
    g: RoadGraph,
    t: float,
    threads: int = 1,
) -> ReachabilityGraph:
    """
    Return the reachability graph of road graph g for threshold t.

    One bounded Dijkstra search is performed per vertex. Only the neighbor
    indices of each search are kept, never the distances. Searches may run
    on several threads, but the result is identical for any thread count.

    :param g: Road network graph.
    :param t: Inclusive reachability threshold in meters.
    :param threads: Number of worker threads.
    """
    if not t > 0 or not math.isfinite(t):
        raise PreconditionError(f'Threshold must be positive, got {t}.')

    def neighborhood(source: int) -> np.ndarray:
        distances = g.dense_distances(source, cutoff=t)
        del distances[source]
        row = np.fromiter(distances, dtype=np.int32, count=len(distances))
        row.sort()
        return row

    start = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(neighborhood, range(g.n)))
    else:
        rows = [neighborhood(source) for source in range(g.n)]

    reachability_graph = ReachabilityGraph._from_neighbor_arrays(
        vertex_ids=g.vertex_ids,
        rows=_symmetrized(rows),
        threshold_t=t,
        source_m=g.m,
    )
    logger.info(
        f'[reachability] Built {reachability_graph} in '
        f'{time.perf_counter() - start:.2f}s using {threads} thread(s).',
    )
    return reachability_graph


def _symmetrized(rows: List[np.ndarray]) -> List[np.ndarray]:
    """
    Return neighbor rows where every edge is present in both directions.

    Distances from u to v and from v to u are summed in different orders, so
    pairs at distance (almost) exactly t can be found from one side only.
    Such pairs are added to the other side as well.
    """
    n = len(rows)
    if n == 0:
        return rows

    sources = np.repeat(np.arange(n, dtype=np.int64), [len(r) for r in rows])
    targets = np.concatenate(rows).astype(np.int64)
    keys = sources * n + targets
    reverse = targets * n + sources
    missing = ~np.isin(reverse, keys)
    if not missing.any():
        return rows

    logger.warning(
        f'[reachability] {int(missing.sum())} pairs within rounding distance '
        'of the threshold were found in one direction only. Adding them.',
    )
    all_keys = np.unique(np.concatenate([keys, reverse[missing]]))
    all_sources, all_targets = all_keys // n, all_keys % n
    boundaries = np.searchsorted(all_sources, np.arange(n + 1))
    return [
        all_targets[boundaries[i]:boundaries[i + 1]].astype(np.int32)
        for i in range(n)
    ]


def find_outliers(r: ReachabilityGraph, k: int) -> Set[int]:
    """
    Return vertices which can not be k-dominated from outside.

    :param r: Reachability graph.
    :param k: Domination multiplicity.
    :return: Ids of all vertices with degree less than k.
    """
    if k < 1:
        raise PreconditionError(f'k must be a positive integer, got {k}.')
    return set(r.ids_of(r.degrees < k))
