"""
Verification and construction of k-dominating sets of reachability graphs.

A vertex set X is k-dominating if every vertex outside of X has at least k
neighbors inside of X. Placing charging stations at the members of X then
guarantees every location k stations within the reachability threshold.

All algorithms are deterministic functions of their arguments. Whenever a
choice between several vertices is to be made, the smallest vertex id wins.
"""

import heapq
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Tuple,
    Union,
)

import numpy as np
from mypy_extensions import TypedDict

from chargeplan.bounds import (
    alpha_requirements,
    compute_probability_p,
    tolerant_floor,
)
from chargeplan.exceptions import (
    NotDominatingError,
    OracleLimitError,
    PreconditionError,
)
from chargeplan.reachability import Fingerprint, ReachabilityGraph

logger = logging.getLogger(__name__)

ALGORITHMS = ('randomized', 'greedy', 'greedy-extension', 'exact', 'external')
DEGREE_MODES = ('min-degree', 'avg-degree')
PHASE_B_MODES = ('extension', 'sweep')
NOT_APPLICABLE = 'not-applicable'

# Largest graph the exhaustive oracle is allowed to enumerate
ORACLE_VERTEX_LIMIT = 25

MAX_SEED = 2 ** 64


class ProvenanceDict(TypedDict):
    """JSON representation of Provenance."""

    algorithm: str
    degree_mode: str
    seed: Optional[int]
    runs: int
    phase_b: str


class FingerprintDict(TypedDict):
    """JSON representation of a reachability graph fingerprint."""

    n: int
    m: int
    t_meters: float


class DominatingSetDict(TypedDict):
    """JSON representation of DominatingSet."""

    k: int
    members: List[int]
    provenance: ProvenanceDict
    minimal: bool
    graph_fingerprint: FingerprintDict
    exempt: List[int]


@dataclass(frozen=True)
class Provenance:
    """How a dominating set was computed."""

    algorithm: str
    degree_mode: str = NOT_APPLICABLE
    seed: Optional[int] = None
    runs: int = 1
    phase_b: str = NOT_APPLICABLE

    def as_dict(self) -> ProvenanceDict:
        """Return JSON serializable representation."""
        return {
            'algorithm': self.algorithm,
            'degree_mode': self.degree_mode,
            'seed': self.seed,
            'runs': self.runs,
            'phase_b': self.phase_b,
        }


@dataclass(frozen=True)
class DominatingSet:
    """
    A k-dominating vertex set together with its provenance.

    :param members: Sorted vertex ids of the set.
    :param k: Domination multiplicity.
    :param provenance: Algorithm, degree mode, seed and runs.
    :param fingerprint: (n, m, t) of the graph the set was computed on.
    :param minimal: True if removing any member breaks k-domination.
    :param exempt: Outliers which are not required to be dominated.
    """

    members: Tuple[int, ...]
    k: int
    provenance: Provenance
    fingerprint: Fingerprint
    minimal: bool = False
    exempt: Tuple[int, ...] = field(default=())

    def __iter__(self) -> Iterator[int]:
        """Iterate over member vertex ids in ascending order."""
        return iter(self.members)

    def __len__(self) -> int:
        """Return number of members."""
        return len(self.members)

    def __contains__(self, vertex: object) -> bool:
        """Return True if vertex is a member."""
        return vertex in self.members

    def as_dict(self) -> DominatingSetDict:
        """Return JSON serializable representation."""
        n, m, t = self.fingerprint
        return {
            'k': self.k,
            'members': list(self.members),
            'provenance': self.provenance.as_dict(),
            'minimal': self.minimal,
            'graph_fingerprint': {'n': n, 'm': m, 't_meters': t},
            'exempt': list(self.exempt),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DominatingSet':
        """
        Return dominating set from its JSON representation.

        Unknown keys, such as an embedded run configuration, are ignored.

        :raises KeyError: If a required key is missing.
        """
        provenance = data['provenance']
        fingerprint = data['graph_fingerprint']
        return cls(
            members=tuple(sorted(int(v) for v in data['members'])),
            k=int(data['k']),
            provenance=Provenance(
                algorithm=str(provenance['algorithm']),
                degree_mode=str(provenance.get('degree_mode', NOT_APPLICABLE)),
                seed=provenance.get('seed'),
                runs=int(provenance.get('runs', 1)),
                phase_b=str(provenance.get('phase_b', NOT_APPLICABLE)),
            ),
            fingerprint=(
                int(fingerprint['n']),
                int(fingerprint['m']),
                float(fingerprint['t_meters']),
            ),
            minimal=bool(data.get('minimal', False)),
            exempt=tuple(sorted(int(v) for v in data.get('exempt', ()))),
        )


VertexSet = Union[DominatingSet, Iterable[int]]


def _check_k(k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise PreconditionError(f'k must be a positive integer, got {k}.')


def _coverage(r: ReachabilityGraph, in_x: np.ndarray) -> np.ndarray:
    """Return |N(v) & X| for every vertex v, by dense index."""
    return np.bincount(
        r.rows,
        weights=in_x[r.indices],
        minlength=r.n,
    ).astype(np.int64)


def _requirements(
    r: ReachabilityGraph,
    k: int,
    exempt: Iterable[int] = (),
) -> np.ndarray:
    """Return number of required dominators per vertex, 0 if exempt."""
    required = np.full(r.n, k, dtype=np.int64)
    required[r.mask_of(exempt)] = 0
    return required


def _violations(
    r: ReachabilityGraph,
    in_x: np.ndarray,
    required: np.ndarray,
) -> Dict[int, int]:
    """Return vertex id -> achieved coverage of every undercovered vertex."""
    coverage = _coverage(r, in_x)
    violating = np.flatnonzero(~in_x & (coverage < required))
    return {
        int(r.vertex_ids[index]): int(coverage[index])
        for index
        in violating
    }


def is_k_dominating(
    r: ReachabilityGraph,
    X: VertexSet,
    k: int,
    exempt: Iterable[int] = (),
) -> Tuple[bool, Dict[int, int]]:
    """
    Return True if every vertex outside X has at least k neighbors in X.

    :param r: Reachability graph.
    :param X: Vertex ids.
    :param k: Domination multiplicity.
    :param exempt: Vertices which are not required to be dominated.
    :return: Tuple of verdict and a dictionary mapping every violating vertex
        to the number of neighbors it has in X.
    """
    _check_k(k)
    violations = _violations(r, r.mask_of(X), _requirements(r, k, exempt))
    return not violations, violations


def is_alpha_dominating(
    r: ReachabilityGraph,
    X: VertexSet,
    alpha: float,
) -> Tuple[bool, Dict[int, int]]:
    """
    Return True if every vertex v outside X has ceil(alpha d_v) neighbors in X.

    :param r: Reachability graph.
    :param X: Vertex ids.
    :param alpha: Proportional coverage requirement in (0, 1].
    """
    if not 0 < alpha <= 1:
        raise PreconditionError(f'alpha must be in (0, 1], got {alpha}.')
    required = alpha_requirements(r.degrees, alpha)
    violations = _violations(r, r.mask_of(X), required)
    return not violations, violations


def _check_outliers(
    r: ReachabilityGraph,
    k: int,
    excused: np.ndarray,
) -> None:
    """Raise if a vertex of degree < k is neither included nor exempt."""
    outliers = np.flatnonzero((r.degrees < k) & ~excused)
    if len(outliers):
        ids = [int(v) for v in r.vertex_ids[outliers[:20]]]
        raise PreconditionError(
            f'{len(outliers)} vertices have degree smaller than k={k} and can '
            f'not be dominated: {ids}{" ..." if len(outliers) > 20 else ""}. '
            'Force-include or exempt the outliers first.',
        )


def _extend(
    r: ReachabilityGraph,
    in_d: np.ndarray,
    required: np.ndarray,
) -> int:
    """
    Add undercovered vertices to in_d, least covered first.

    Coverage is updated as vertices join, so a vertex which becomes
    sufficiently covered by earlier additions is never added itself.

    :return: Number of vertices added.
    """
    coverage = _coverage(r, in_d)
    undercovered = np.flatnonzero(~in_d & (coverage < required))
    queue = [(int(coverage[v]), int(v)) for v in undercovered]
    heapq.heapify(queue)

    added = 0
    while queue:
        queued_coverage, vertex = heapq.heappop(queue)
        if in_d[vertex] or coverage[vertex] >= required[vertex]:
            continue
        if queued_coverage != coverage[vertex]:
            # Stale entry, coverage has increased since it was queued
            heapq.heappush(queue, (int(coverage[vertex]), vertex))
            continue

        in_d[vertex] = True
        coverage[r.dense_neighbors(vertex)] += 1
        added += 1

    return added


def _sweep(
    r: ReachabilityGraph,
    in_a: np.ndarray,
    required: np.ndarray,
) -> int:
    """
    Add every vertex which is undercovered by the set in_a.

    Coverage is computed once, against the initial set only.

    :return: Number of vertices added.
    """
    coverage = _coverage(r, in_a)
    undercovered = ~in_a & (coverage < required)
    in_a |= undercovered
    return int(undercovered.sum())


def _reduce(
    r: ReachabilityGraph,
    in_d: np.ndarray,
    required: np.ndarray,
) -> int:
    """
    Remove redundant members from in_d in a single pass.

    Members are scanned in ascending order of their number of neighbors
    outside the set, ties by vertex id. The order is fixed before the first
    removal. A member is removed if it is itself sufficiently covered by the
    remaining members, and every outside neighbor keeps enough coverage.

    :return: Number of vertices removed.
    """
    coverage = _coverage(r, in_d)
    members = np.flatnonzero(in_d)
    outside_neighbors = r.degrees[members] - coverage[members]
    order = members[np.lexsort((members, outside_neighbors))]

    removed = 0
    for vertex in order:
        if coverage[vertex] < required[vertex]:
            continue
        neighbors = r.dense_neighbors(vertex)
        outside = neighbors[~in_d[neighbors]]
        if np.any(coverage[outside] <= required[outside]):
            continue

        in_d[vertex] = False
        coverage[neighbors] -= 1
        removed += 1

    return removed


def _dominating_set(
    r: ReachabilityGraph,
    in_d: np.ndarray,
    k: int,
    provenance: Provenance,
    exempt: Iterable[int],
    minimal: bool = True,
) -> DominatingSet:
    return DominatingSet(
        members=r.ids_of(in_d),
        k=k,
        provenance=provenance,
        fingerprint=r.fingerprint,
        minimal=minimal,
        exempt=tuple(sorted(exempt)),
    )


def randomized_k_dominating(
    r: ReachabilityGraph,
    k: int,
    mode: str = 'min-degree',
    seed: int = 0,
    include: Iterable[int] = (),
    exempt: Iterable[int] = (),
    phase_b: str = 'extension',
) -> DominatingSet:
    """
    Return minimal k-dominating set from the randomized algorithm.

    Phase A adds every vertex independently with probability p, drawing one
    uniform number per vertex in ascending vertex id order. Phase B adds
    the vertices which remain undercovered, and the union is finally
    reduced to a minimal set.

    :param r: Reachability graph.
    :param k: Domination multiplicity.
    :param mode: 'min-degree' or 'avg-degree', the degree used for p.
    :param seed: Seed of the PCG64 generator, 0 <= seed < 2**64.
    :param include: Vertices which are added to the set before phase A.
    :param exempt: Vertices which are not required to be dominated.
    :param phase_b: 'extension' for least covered first processing with
        incremental coverage updates, or 'sweep' for adding all vertices
        undercovered by phase A.
    """
    _check_k(k)
    if mode not in DEGREE_MODES:
        raise PreconditionError(f'Unknown degree mode "{mode}".')
    if phase_b not in PHASE_B_MODES:
        raise PreconditionError(f'Unknown phase B variant "{phase_b}".')
    if not 0 <= seed < MAX_SEED:
        raise PreconditionError(f'Seed must be in [0, 2**64), got {seed}.')

    exempt = tuple(exempt)
    in_include = r.mask_of(include)
    required = _requirements(r, k, exempt)
    _check_outliers(r, k, in_include | (required == 0))

    demand = ~in_include & (required > 0)
    if mode == 'min-degree':
        delta_eff: float = k
        if demand.any():
            delta_eff = float(r.degrees[demand].min())
    else:
        delta_eff = r.degree_stats.dbar
        if tolerant_floor(delta_eff) < k:
            raise PreconditionError(
                f'Average degree {delta_eff:.2f} is smaller than k={k}.',
            )
    p = compute_probability_p(delta_eff, k)

    generator = np.random.Generator(np.random.PCG64(seed))
    in_d = (generator.random(r.n) < p) | in_include
    phase_a = int(in_d.sum())

    if phase_b == 'extension':
        added = _extend(r, in_d, required)
    else:
        added = _sweep(r, in_d, required)
    removed = _reduce(r, in_d, required)

    logger.debug(
        f'[randomized] seed={seed}, p={p:.5f}: |A|={phase_a}, |B|={added}, '
        f'removed {removed}, |D|={int(in_d.sum())}.',
    )
    return _dominating_set(
        r=r,
        in_d=in_d,
        k=k,
        provenance=Provenance(
            algorithm='randomized',
            degree_mode=mode,
            seed=seed,
            runs=1,
            phase_b=phase_b,
        ),
        exempt=exempt,
    )


def greedy_k_dominating(
    r: ReachabilityGraph,
    k: int,
    warm_start: Iterable[int] = (),
    exempt: Iterable[int] = (),
) -> DominatingSet:
    """
    Return minimal k-dominating set from the greedy algorithm.

    Repeatedly adds the vertex outside the set which is adjacent to the most
    undercovered vertices, ties by smallest vertex id, until no vertex is
    undercovered. The result is then reduced to a minimal set.

    :param r: Reachability graph.
    :param k: Domination multiplicity.
    :param warm_start: Vertices which are in the set from the start.
    :param exempt: Vertices which are not required to be dominated.
    """
    _check_k(k)
    exempt = tuple(exempt)
    in_d = r.mask_of(warm_start)
    required = _requirements(r, k, exempt)
    _check_outliers(r, k, in_d | (required == 0))

    coverage = _coverage(r, in_d)
    undercovered = ~in_d & (coverage < required)
    # Number of undercovered neighbors of every vertex
    score = np.bincount(
        r.rows,
        weights=undercovered[r.indices],
        minlength=r.n,
    ).astype(np.int64)

    iterations = 0
    while undercovered.any():
        candidates = np.where(in_d, -1, score)
        vertex = int(np.argmax(candidates))
        in_d[vertex] = True
        iterations += 1

        if undercovered[vertex]:
            undercovered[vertex] = False
            score[r.dense_neighbors(vertex)] -= 1

        neighbors = r.dense_neighbors(vertex)
        coverage[neighbors] += 1
        satisfied = neighbors[
            undercovered[neighbors]
            & (coverage[neighbors] >= required[neighbors])
        ]
        undercovered[satisfied] = False
        for covered_vertex in satisfied:
            score[r.dense_neighbors(covered_vertex)] -= 1

    removed = _reduce(r, in_d, required)
    logger.info(
        f'[greedy] k={k}: {iterations} iterations, removed {removed}, '
        f'|D|={int(in_d.sum())}.',
    )
    return _dominating_set(
        r=r,
        in_d=in_d,
        k=k,
        provenance=Provenance(algorithm='greedy'),
        exempt=exempt,
    )


def extend_greedily(
    r: ReachabilityGraph,
    k: int,
    initial: Iterable[int] = (),
    exempt: Iterable[int] = (),
) -> DominatingSet:
    """
    Return minimal k-dominating set by greedy extension of an initial set.

    Undercovered vertices are added least covered first, with coverage
    updated as vertices join. Starting from the empty set this is a fast
    stand-alone heuristic.

    :param r: Reachability graph.
    :param k: Domination multiplicity.
    :param initial: Vertices to be extended.
    :param exempt: Vertices which are not required to be dominated.
    """
    _check_k(k)
    exempt = tuple(exempt)
    in_d = r.mask_of(initial)
    required = _requirements(r, k, exempt)
    _check_outliers(r, k, in_d | (required == 0))

    added = _extend(r, in_d, required)
    removed = _reduce(r, in_d, required)
    logger.info(
        f'[greedy-extension] k={k}: added {added}, removed {removed}, '
        f'|D|={int(in_d.sum())}.',
    )
    return _dominating_set(
        r=r,
        in_d=in_d,
        k=k,
        provenance=Provenance(algorithm='greedy-extension'),
        exempt=exempt,
    )


def reduce_to_minimal(
    r: ReachabilityGraph,
    D: VertexSet,
    k: int,
    exempt: Optional[Iterable[int]] = None,
) -> DominatingSet:
    """
    Return minimal k-dominating subset of a k-dominating set.

    :param r: Reachability graph.
    :param D: DominatingSet, or plain vertex ids with provenance 'external'.
    :param k: Domination multiplicity.
    :param exempt: Vertices which are not required to be dominated. Taken
        from D if D is a DominatingSet and exempt is not given.
    :raises NotDominatingError: If D is not k-dominating.
    """
    _check_k(k)
    if isinstance(D, DominatingSet):
        provenance = D.provenance
        if exempt is None:
            exempt = D.exempt
    else:
        provenance = Provenance(algorithm='external')
    exempt = tuple(exempt or ())

    in_d = r.mask_of(D)
    required = _requirements(r, k, exempt)
    violations = _violations(r, in_d, required)
    if violations:
        raise NotDominatingError(
            f'Vertex set is not {k}-dominating, '
            f'{len(violations)} vertices are undercovered.',
        )

    removed = _reduce(r, in_d, required)
    logger.debug(f'[minimal] Removed {removed} redundant vertices.')
    return _dominating_set(
        r=r,
        in_d=in_d,
        k=k,
        provenance=provenance,
        exempt=exempt,
    )


def is_minimal(
    r: ReachabilityGraph,
    X: VertexSet,
    k: int,
    exempt: Iterable[int] = (),
) -> bool:
    """
    Return True if X is k-dominating and no member can be removed.

    Exhaustive check, one k-domination test per member.
    """
    exempt = tuple(exempt)
    members = sorted(set(X))
    if not is_k_dominating(r, members, k, exempt)[0]:
        return False
    return not any(
        is_k_dominating(r, [v for v in members if v != removed], k, exempt)[0]
        for removed
        in members
    )


def exact_min_k_dominating(
    r: ReachabilityGraph,
    k: int,
    size_limit: Optional[int] = None,
) -> DominatingSet:
    """
    Return a minimum cardinality k-dominating set by exhaustive enumeration.

    Subsets are enumerated in increasing cardinality, and lexicographically
    by vertex id within each cardinality.

    :param r: Reachability graph with at most 25 vertices.
    :param k: Domination multiplicity.
    :param size_limit: Largest subset cardinality to try, n by default.
    :raises OracleLimitError: If the graph is too large, or no k-dominating
        set of at most size_limit vertices exists.
    """
    _check_k(k)
    if r.n > ORACLE_VERTEX_LIMIT:
        raise OracleLimitError(
            f'Exhaustive search is limited to {ORACLE_VERTEX_LIMIT} vertices, '
            f'graph has {r.n}.',
        )
    _check_outliers(r, k, np.zeros(r.n, dtype=bool))

    neighbor_masks = [
        sum(1 << int(j) for j in r.dense_neighbors(i))
        for i in range(r.n)
    ]
    limit = r.n if size_limit is None else min(size_limit, r.n)
    for size in range(limit + 1):
        for subset in itertools.combinations(range(r.n), size):
            members = sum(1 << i for i in subset)
            if all(
                bin(neighbor_masks[v] & members).count('1') >= k
                for v in range(r.n)
                if not members >> v & 1
            ):
                in_d = np.zeros(r.n, dtype=bool)
                in_d[list(subset)] = True
                return _dominating_set(
                    r=r,
                    in_d=in_d,
                    k=k,
                    provenance=Provenance(algorithm='exact'),
                    exempt=(),
                )

    raise OracleLimitError(
        f'No {k}-dominating set with at most {limit} vertices exists.',
    )


def best_of_runs(
    r: ReachabilityGraph,
    k: int,
    mode: str = 'min-degree',
    runs: int = 10,
    base_seed: int = 0,
    threads: int = 1,
    include: Iterable[int] = (),
    exempt: Iterable[int] = (),
    phase_b: str = 'extension',
) -> DominatingSet:
    """
    Return the smallest set of several randomized runs.

    Run i uses seed base_seed + i. Ties are won by the lowest seed, so the
    result does not depend on the number of threads.

    :param runs: Number of randomized runs, at least 1.
    :param threads: Number of worker threads.
    """
    if runs < 1:
        raise PreconditionError(f'runs must be at least 1, got {runs}.')
    if not 0 <= base_seed or not base_seed + runs - 1 < MAX_SEED:
        raise PreconditionError(
            f'Seeds {base_seed}..{base_seed + runs - 1} exceed [0, 2**64).',
        )

    include, exempt = tuple(include), tuple(exempt)

    def run(seed: int) -> DominatingSet:
        return randomized_k_dominating(
            r=r,
            k=k,
            mode=mode,
            seed=seed,
            include=include,
            exempt=exempt,
            phase_b=phase_b,
        )

    seeds = range(base_seed, base_seed + runs)
    if threads > 1 and runs > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, seeds))
    else:
        results = [run(seed) for seed in seeds]

    best = min(results, key=lambda result: len(result))
    logger.info(
        f'[randomized] k={k}, {runs} runs: sizes '
        f'{min(map(len, results))}..{max(map(len, results))}, '
        f'best seed {best.provenance.seed}.',
    )
    return replace(best, provenance=replace(best.provenance, runs=runs))
