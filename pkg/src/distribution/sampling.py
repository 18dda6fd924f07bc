"""
Exact sampling from the UGAT distribution.

Draws are made in two stages: the total T = X_1 + ... + X_r by inverse CDF on the
ordered totals series, then T is split across coordinates one at a time with

    P(X_j = a | remaining total T) ∝ alpha_j^a h_{T-a}(alpha_{j+1}, ..., alpha_r).

Unit weights (alpha = 1) are split off first: their block total follows a Hurwitz
zeta law that is inverted by bisection on its exact survival function, and it is
spread uniformly over compositions.
"""

import math

import numpy as np
from scipy.special import logsumexp

from src.distribution.params import UGATParams
from src.errors import DomainError
from src.logger import get_logger
from src.series.kernel import evaluate_series, log_homogeneous_table, log_unit_series

logger = get_logger(__name__)


def _inverse_cdf(log_terms: np.ndarray, u: np.ndarray) -> np.ndarray:
    weights = np.exp(log_terms - logsumexp(log_terms))
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, log_terms.size - 1)


def _allocate(alphas: tuple, totals: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Split each total over the given weights, sequentially from the first coordinate"""
    r = len(alphas)
    out = np.zeros((totals.size, r), dtype=np.int64)
    if r == 1:
        out[:, 0] = totals
        return out
    t_max = int(totals.max(initial=0))
    suffix = [log_homogeneous_table(alphas[j:], t_max) for j in range(r)]
    remaining = totals.astype(np.int64).copy()
    for j in range(r - 1):
        u = rng.random(totals.size)
        log_alpha = math.log(alphas[j])
        for total in np.unique(remaining):
            rows = np.flatnonzero(remaining == total)
            a = np.arange(total + 1)
            log_w = a * log_alpha + suffix[j + 1][total - a]
            out[rows, j] = _inverse_cdf(log_w, u[rows])
        remaining -= out[:, j]
    out[:, r - 1] = remaining
    return out


def _unit_block_totals(
    units: int, bases: np.ndarray, s: float, v: np.ndarray
) -> np.ndarray:
    """
    Smallest k with P(J > k) <= v, where P(J = j) ∝ C(j+units-1, units-1) (j+base)^(-s).
    Exponential search followed by bisection on the exact survival function.
    """

    def log_surv(k, base):
        start = log_unit_series(units, base, s, start=k)
        return start - log_unit_series(units, base, s)

    out = np.empty(bases.size, dtype=np.int64)
    for row, (base, target) in enumerate(zip(bases, np.log(v))):
        lo, hi = -1, 1
        while log_surv(hi + 1, base)[0] > target:
            lo, hi = hi, 2 * hi
        # invariant: P(J > lo) > v >= P(J > hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if log_surv(mid + 1, base)[0] > target:
                lo = mid
            else:
                hi = mid
        out[row] = hi
    return out


def _spread_uniform(
    totals: np.ndarray, units: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform composition of each total into `units` nonnegative parts (stars and bars)"""
    out = np.zeros((totals.size, units), dtype=np.int64)
    if units == 1:
        out[:, 0] = totals
        return out
    for row, total in enumerate(totals):
        bars = np.sort(rng.choice(int(total) + units - 1, size=units - 1, replace=False))
        edges = np.concatenate(([-1], bars, [int(total) + units - 1]))
        out[row] = np.diff(edges) - 1
    return out


def sample(p: UGATParams, n_samples: int, seed: int) -> np.ndarray:
    """
    Draw n_samples i.i.d. count vectors.

    Returns:
        np.ndarray: integer array of shape (n_samples, r); identical for identical seeds
    """
    if int(n_samples) != n_samples or n_samples < 1:
        raise DomainError(f"n_samples must be a positive integer, got {n_samples}")
    n_samples = int(n_samples)
    rng = np.random.default_rng(seed)
    alphas = p.alphas.values
    unit_idx = [k for k, a in enumerate(alphas) if a == 1.0]
    rest_idx = [k for k, a in enumerate(alphas) if a < 1.0]
    out = np.zeros((n_samples, p.r), dtype=np.int64)

    if not unit_idx:
        terms = evaluate_series(alphas, p.beta, p.s, p.accuracy).log_terms
        totals = _inverse_cdf(terms, rng.random(n_samples))
        logger.debug("sampled totals up to %d", int(totals.max()))
        return _allocate(alphas, totals, rng)

    rest = tuple(alphas[k] for k in rest_idx)
    if rest:
        # series terms of the mixed path are indexed by the total of the non-unit block
        terms = evaluate_series(alphas, p.beta, p.s, p.accuracy).log_terms
        rest_totals = _inverse_cdf(terms, rng.random(n_samples))
    else:
        rest_totals = np.zeros(n_samples, dtype=np.int64)
    v = 1.0 - rng.random(n_samples)
    unit_totals = _unit_block_totals(
        len(unit_idx), p.beta + rest_totals.astype(float), p.s, v
    )
    if rest:
        out[:, rest_idx] = _allocate(rest, rest_totals, rng)
    out[:, unit_idx] = _spread_uniform(unit_totals, len(unit_idx), rng)
    return out
