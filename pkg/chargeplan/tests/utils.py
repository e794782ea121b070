"""Module for test utilities, mostly small graphs and independent oracles."""

import itertools
import math
from typing import Dict, Iterable, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from chargeplan.graph import RoadGraph
from chargeplan.reachability import ReachabilityGraph


def cycle_graph(n: int) -> ReachabilityGraph:
    """Return cycle on vertices 1, ..., n."""
    return ReachabilityGraph.from_edges(
        range(1, n + 1),
        [(i, i % n + 1) for i in range(1, n + 1)],
    )


def complete_graph(n: int) -> ReachabilityGraph:
    """Return complete graph on vertices 1, ..., n."""
    return ReachabilityGraph.from_edges(
        range(1, n + 1),
        itertools.combinations(range(1, n + 1), 2),
    )


def star_graph(leaves: int) -> ReachabilityGraph:
    """Return star with center 0 and leaves 1, ..., leaves."""
    return ReachabilityGraph.from_edges(
        range(leaves + 1),
        [(0, leaf) for leaf in range(1, leaves + 1)],
    )


def path_road_graph(lengths: Sequence[float]) -> RoadGraph:
    """Return road graph path 1 - 2 - ... with the given segment lengths."""
    return RoadGraph(
        vertices=[(i, 0.001 * i, 0.0) for i in range(1, len(lengths) + 2)],
        edges=[(i + 1, i + 2, length) for i, length in enumerate(lengths)],
    )


def random_road_graph(
    n: int,
    extra_edges: int,
    seed: int,
    max_length: int = 10,
    connected: bool = True,
) -> RoadGraph:
    """
    Return random road graph with integer edge lengths.

    Integer lengths make every sum of lengths exact, so results can be
    compared to independent shortest path implementations without slack.
    Vertex ids are sparse, i.e. 3 * index + 7.
    """
    generator = np.random.default_rng(seed)
    ids = [3 * i + 7 for i in range(n)]
    edges: Dict[Tuple[int, int], float] = {}

    def add(i: int, j: int) -> None:
        if i != j:
            key = (min(ids[i], ids[j]), max(ids[i], ids[j]))
            edges.setdefault(key, float(generator.integers(1, max_length + 1)))

    if connected:
        for i in range(1, n):
            add(i, int(generator.integers(0, i)))
    for _ in range(extra_edges):
        add(int(generator.integers(0, n)), int(generator.integers(0, n)))

    return RoadGraph(
        vertices=[
            (vertex, float(generator.random()), float(generator.random()))
            for vertex in ids
        ],
        edges=[(u, v, length) for (u, v), length in edges.items()],
    )


def random_graph(n: int, p: float, seed: int) -> ReachabilityGraph:
    """Return Erdos-Renyi random graph on vertices 0, ..., n - 1."""
    generator = np.random.default_rng(seed)
    return ReachabilityGraph.from_edges(
        range(n),
        [
            (u, v)
            for u, v in itertools.combinations(range(n), 2)
            if generator.random() < p
        ],
    )


def random_graph_with_min_degree(
    n: int,
    p: float,
    min_degree: int,
    seed: int,
) -> ReachabilityGraph:
    """Return first random graph of a seed sequence with minimum degree."""
    for attempt in itertools.count():
        graph = random_graph(n, p, seed=seed * 1000 + attempt)
        if graph.degree_stats.delta >= min_degree:
            return graph
    raise AssertionError('unreachable')  # pragma: no cover


def to_networkx(g: RoadGraph) -> nx.Graph:
    """Return road graph as weighted networkx graph."""
    graph = nx.Graph()
    graph.add_nodes_from(g.vertex_ids)
    graph.add_weighted_edges_from(g.edges, weight='length')
    return graph


def oracle_reachability_edges(g: RoadGraph, t: float) -> Set[Tuple[int, int]]:
    """Return reachability graph edges from all pairs Dijkstra of networkx."""
    distances = dict(nx.all_pairs_dijkstra_path_length(
        to_networkx(g),
        weight='length',
    ))
    return {
        (u, v)
        for u in g.vertex_ids
        for v, distance in distances[u].items()
        if u < v and distance <= t
    }


def neighbor_sets(r: ReachabilityGraph) -> Dict[int, Set[int]]:
    """Return neighbor set of every vertex id."""
    return {
        int(vertex): set(r.neighbors(int(vertex)))
        for vertex in r.vertex_ids
    }


def oracle_is_k_dominating(
    neighbors: Dict[int, Set[int]],
    members: Iterable[int],
    k: int,
) -> bool:
    """Return True if every non-member has k neighbors among members."""
    members = set(members)
    return all(
        len(neighbors[v] & members) >= k
        for v in neighbors
        if v not in members
    )


def oracle_domination_number(r: ReachabilityGraph, k: int) -> Optional[int]:
    """Return smallest k-dominating set size, by plain set enumeration."""
    neighbors = neighbor_sets(r)
    vertices = sorted(neighbors)
    for size in range(len(vertices) + 1):
        for subset in itertools.combinations(vertices, size):
            if oracle_is_k_dominating(neighbors, subset, k):
                return size
    return None


def probability_direct(delta: int, k: int) -> float:
    """Return inclusion probability evaluated without logarithms."""
    delta_prime = delta - k + 1
    b = math.comb(delta, k - 1)
    return 1 - 1 / (b * (1 + delta_prime)) ** (1 / delta_prime)


def bound_direct(n: int, delta: int, k: int) -> float:
    """Return k-domination bound evaluated without logarithms."""
    delta_prime = delta - k + 1
    b = math.comb(delta, k - 1)
    return (
        1
        - delta_prime
        / (b ** (1 / delta_prime) * (1 + delta_prime) ** (1 + 1 / delta_prime))
    ) * n

