"""
Upper bounds on domination numbers and the randomized inclusion probability.

All binomial coefficients and powers are evaluated in log-space with the
log-gamma function, as reachability graphs of city sized road networks have
minimum degrees in the hundreds and average degrees in the thousands.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from chargeplan.exceptions import PreconditionError
from chargeplan.reachability import ReachabilityGraph

logger = logging.getLogger(__name__)

# Relative slack for rounding products such as alpha * degree
ROUNDING_TOLERANCE = 1e-12


def tolerant_ceil(x: float) -> int:
    """Return ceil(x), ignoring floating point excess such as 2.0000000001."""
    return math.ceil(x - abs(x) * ROUNDING_TOLERANCE - ROUNDING_TOLERANCE)


def tolerant_floor(x: float) -> int:
    """Return floor(x), ignoring floating point deficits such as 0.99999999."""
    return math.floor(x + abs(x) * ROUNDING_TOLERANCE + ROUNDING_TOLERANCE)


def log_binomial(n: int, r: int) -> float:
    """Return ln of the binomial coefficient (n choose r)."""
    if not 0 <= r <= n:
        raise ValueError(f'Invalid binomial coefficient ({n} choose {r}).')
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def _log_probability_complement(log_b: float, delta_prime: int) -> float:
    """Return ln(1 - p) for p = 1 - (b (1 + delta'))^(-1 / delta')."""
    return -(log_b + math.log1p(delta_prime)) / delta_prime


def _bound_fraction(log_b: float, delta_prime: int) -> float:
    """
    Return delta' / (b^(1 / delta') (1 + delta')^(1 + 1 / delta')).

    This is the guaranteed fraction of vertices which are left out of the
    dominating set in expectation.
    """
    log_fraction = (
        math.log(delta_prime)
        - log_b / delta_prime
        - (1 + 1 / delta_prime) * math.log1p(delta_prime)
    )
    return math.exp(log_fraction)


def _check_multiplicity(delta: float, k: int) -> None:
    if k < 1:
        raise PreconditionError(f'k must be a positive integer, got {k}.')
    if delta < k:
        raise PreconditionError(
            f'Minimum degree {delta} is smaller than k={k}. '
            'Remove or force-include outliers first.',
        )


def compute_probability_p(delta_eff: float, k: int) -> float:
    """
    Return the inclusion probability of the randomized algorithm.

    :param delta_eff: Minimum degree, or average degree which is floored.
    :param k: Domination multiplicity.
    :return: p = 1 - 1 / (b (1 + delta'))^(1 / delta'), where
        delta' = delta - k + 1 and b = (delta choose k - 1).
    """
    delta = tolerant_floor(delta_eff)
    _check_multiplicity(delta, k)
    delta_prime = delta - k + 1
    log_b = log_binomial(delta, k - 1)
    return -math.expm1(_log_probability_complement(log_b, delta_prime))


def bound_theorem1(n: int, delta: int, k: int) -> float:
    """
    Return upper bound of the k-domination number of a graph.

    :param n: Number of vertices.
    :param delta: Minimum degree.
    :param k: Domination multiplicity, at most delta.
    """
    _check_multiplicity(delta, k)
    delta_prime = delta - k + 1
    log_b = log_binomial(delta, k - 1)
    return (1 - _bound_fraction(log_b, delta_prime)) * n


def alpha_requirements(degrees: np.ndarray, alpha: float) -> np.ndarray:
    """Return ceil(alpha * d) for every degree d."""
    return np.array(
        [tolerant_ceil(alpha * int(degree)) for degree in degrees],
        dtype=np.int64,
    )


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha <= 1:
        raise PreconditionError(f'alpha must be in (0, 1], got {alpha}.')


def _theorem2_terms(
    degree_sequence: Sequence[int],
    alpha: float,
) -> Dict[str, float]:
    _check_alpha(alpha)
    degrees = np.asarray(degree_sequence, dtype=np.int64)
    if len(degrees) == 0:
        raise PreconditionError('Empty degree sequence.')
    if degrees.min() < 1:
        raise PreconditionError(
            'Degree sequence contains isolated vertices (degree 0).',
        )

    delta = int(degrees.min())
    delta_hat = tolerant_floor(delta * (1 - alpha)) + 1
    log_terms = [
        log_binomial(int(degree), int(required) - 1)
        for degree, required
        in zip(degrees, alpha_requirements(degrees, alpha))
    ]
    dhat_alpha = float(np.logaddexp.reduce(log_terms)) - math.log(len(degrees))
    fraction = _bound_fraction(dhat_alpha, delta_hat)
    return {
        'delta_hat': delta_hat,
        'dhat_alpha': dhat_alpha,
        'bound': (1 - fraction) * len(degrees),
    }


def bound_theorem2(degree_sequence: Sequence[int], alpha: float) -> float:
    """
    Return upper bound of the alpha-domination number of a graph.

    :param degree_sequence: Degrees of all vertices, each at least 1.
    :param alpha: Proportional coverage requirement in (0, 1].
    """
    return _theorem2_terms(degree_sequence, alpha)['bound']


@dataclass(frozen=True)
class BoundReport:
    """Bound calculations for a reachability graph."""

    n: int
    delta: int
    dbar: float
    k: int
    delta_prime: int
    b_k_minus_1: float
    p: float
    theorem1_bound: float
    p_avg_degree: Optional[float] = None
    alpha: Optional[float] = None
    delta_hat: Optional[int] = None
    dhat_alpha: Optional[float] = None
    theorem2_bound: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        """Return JSON serializable representation."""
        return asdict(self)


def bound_report(
    r: ReachabilityGraph,
    k: int,
    alpha: Optional[float] = None,
) -> BoundReport:
    """
    Return bounds for k-domination (and optionally alpha-domination) of r.

    :param r: Reachability graph.
    :param k: Domination multiplicity.
    :param alpha: Optional proportional coverage requirement.
    """
    stats = r.degree_stats
    delta = stats.delta
    _check_multiplicity(delta, k)

    p_avg_degree = None
    if tolerant_floor(stats.dbar) >= k:
        p_avg_degree = compute_probability_p(stats.dbar, k)

    theorem2: Dict[str, Any] = {}
    if alpha is not None:
        terms = _theorem2_terms(stats.degree_sequence, alpha)
        theorem2 = {
            'alpha': alpha,
            'delta_hat': int(terms['delta_hat']),
            'dhat_alpha': terms['dhat_alpha'],
            'theorem2_bound': terms['bound'],
        }

    report = BoundReport(
        n=r.n,
        delta=delta,
        dbar=stats.dbar,
        k=k,
        delta_prime=delta - k + 1,
        b_k_minus_1=log_binomial(delta, k - 1),
        p=compute_probability_p(delta, k),
        theorem1_bound=bound_theorem1(r.n, delta, k),
        p_avg_degree=p_avg_degree,
        **theorem2,
    )
    logger.info(
        f'[bounds] n={report.n}, delta={delta}, k={k}: '
        f'p={report.p:.5f}, bound={report.theorem1_bound:.2f}.',
    )
    return report
