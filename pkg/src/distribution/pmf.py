"""
Joint, marginal and conditional probabilities of the UGAT distribution.

All probabilities are ratios of shifted normalizing series, so the common
prefactor of the generating polynomial never enters.

Usage:
    from src.distribution import UGATParams, joint_pmf, marginal_pmf

    p = UGATParams.build([0.3, 0.4], beta=1.0, s=2.0)
    joint_pmf(p, [1, 2])
    marginal_pmf(p, 1, 3)
"""

import math

import numpy as np
from scipy.special import logsumexp

from src.distribution.params import (
    UGATParams,
    as_counts,
    check_index,
    log_shifted_series,
)
from src.errors import (
    BoxTooLarge,
    DimensionMismatch,
    DomainError,
    IndexOutOfRange,
    ZeroProbabilityCondition,
)
from src.logger import get_logger
from src.series.kernel import (
    certified_log_sum,
    evaluate_series,
    log_homogeneous_table,
    log_nb_tail,
)

logger = get_logger(__name__)

DEFAULT_CELL_CAP = 1_000_000


def log_joint_pmf(p: UGATParams, x) -> float:
    """sum x_i log alpha_i - s log(sum x + beta) - log S"""
    counts = as_counts(p, x)
    weights = float(np.dot(counts.as_array(), p.log_alpha()))
    return weights - p.s * math.log(counts.total + p.beta) - p.log_normalizer


def joint_pmf(p: UGATParams, x) -> float:
    return math.exp(log_joint_pmf(p, x))


def totals_pmf(p: UGATParams, t: int) -> float:
    """P(X_1 + ... + X_r = t)"""
    if t < 0:
        return 0.0
    log_h = log_homogeneous_table(p.alphas.values, int(t))[int(t)]
    return math.exp(log_h - p.s * math.log(t + p.beta) - p.log_normalizer)


def _check_support_point(x, lowest: int) -> int:
    if float(x) != int(x) or int(x) < lowest:
        raise DomainError(f"x must be an integer >= {lowest}, got {x}")
    return int(x)


def log_marginal_ccdf(p: UGATParams, i: int, x: int) -> float:
    """log P(X_i > x) = (x+1) log alpha_i + log M(beta+x+1) - log M(beta)"""
    alpha = p.alpha(i)
    x = _check_support_point(x, -1)
    if x == -1:
        return 0.0
    return (x + 1) * math.log(alpha) + log_shifted_series(p, x + 1) - p.log_normalizer


def marginal_ccdf(p: UGATParams, i: int, x: int) -> float:
    """P(X_i > x); equals 1 at x = -1"""
    return math.exp(log_marginal_ccdf(p, i, x))


def marginal_cdf(p: UGATParams, i: int, x: int) -> float:
    """P(X_i <= x)"""
    return -math.expm1(log_marginal_ccdf(p, i, x))


def log_marginal_pmf(p: UGATParams, i: int, x: int) -> float:
    """
    log P(X_i = x) = x log alpha_i + log M_rest(beta + x) - log M(beta), where M_rest
    is the series over the other r - 1 weights. No differences of tail
    probabilities are taken, so deep unit-weight tails keep their relative accuracy.
    """
    alpha = p.alpha(i)
    x = _check_support_point(x, 0)
    skip = check_index(p, i) - 1
    others = tuple(a for k, a in enumerate(p.alphas.values) if k != skip)
    if others:
        log_rest = evaluate_series(others, p.beta + x, p.s, p.accuracy).log_value
    else:
        log_rest = -p.s * math.log(p.beta + x)
    return x * math.log(alpha) + log_rest - p.log_normalizer


def marginal_pmf(p: UGATParams, i: int, x: int) -> float:
    """P(X_i = x), equal to P(X_i > x - 1) - P(X_i > x)"""
    return math.exp(log_marginal_pmf(p, i, x))


def joint_cdf_product(p: UGATParams, x) -> float:
    """
    Product of the marginal CDFs.

    Equals P(X <= x) only when the coordinates are independent, which for UGAT
    means s = 0. Compare with joint_cdf_exact for the discrepancy.
    """
    counts = as_counts(p, x)
    return math.prod(marginal_cdf(p, i + 1, v) for i, v in enumerate(counts.coords))


def joint_cdf_exact(p: UGATParams, x, cell_cap: int = DEFAULT_CELL_CAP) -> float:
    """
    P(X_1 <= x_1, ..., X_r <= x_r) by summing every cell of the box.

    Cells are grouped by their total: the box-restricted homogeneous polynomial of
    degree t is the coefficient of z^t in prod_i (1 + alpha_i z + ... + (alpha_i z)^{x_i}).
    """
    counts = as_counts(p, x)
    cells = math.prod(v + 1 for v in counts.coords)
    if cells > cell_cap:
        raise BoxTooLarge(f"box has {cells} cells, cap is {cell_cap}")
    poly = np.array([1.0])
    for alpha, v in zip(p.alphas.values, counts.coords):
        poly = np.convolve(poly, alpha ** np.arange(v + 1))
    t = np.arange(poly.size, dtype=float)
    with np.errstate(divide="ignore"):
        log_cells = np.log(poly) - p.s * np.log(t + p.beta) - p.log_normalizer
    return min(1.0, math.exp(logsumexp(log_cells)))


def _conditional_pair(p: UGATParams, i: int, j: int) -> tuple[int, int]:
    if p.r != 2:
        raise DimensionMismatch(f"conditional distribution needs r = 2, got r = {p.r}")
    i, j = check_index(p, i), check_index(p, j)
    if i == j:
        raise IndexOutOfRange("conditioning coordinate must differ from the target")
    return i, j


def _log_conditioning_mass(p: UGATParams, j: int, x_j: int) -> float:
    mass = marginal_pmf(p, j, x_j)
    if not mass > 0:
        raise ZeroProbabilityCondition(f"P(X_{j} = {x_j}) underflows to zero")
    return math.log(mass)


def conditional_pmf(p: UGATParams, i: int, x_i: int, j: int, x_j: int) -> float:
    """P(X_i = x_i | X_j = x_j) for a bivariate distribution"""
    i, j = _conditional_pair(p, i, j)
    x_i = _check_support_point(x_i, 0)
    x_j = _check_support_point(x_j, 0)
    point = [0, 0]
    point[i - 1], point[j - 1] = x_i, x_j
    return math.exp(log_joint_pmf(p, point) - _log_conditioning_mass(p, j, x_j))


def conditional_expectation(p: UGATParams, i: int, j: int, x_j: int) -> float:
    """E(X_i | X_j = x_j), summed over x_i with a certified tail"""
    i, j = _conditional_pair(p, i, j)
    x_j = _check_support_point(x_j, 0)
    log_alpha_i = math.log(p.alpha(i))
    base = p.beta + x_j
    const = (
        x_j * math.log(p.alpha(j))
        - p.log_normalizer
        - _log_conditioning_mass(p, j, x_j)
    )

    def log_terms(n):
        v = np.arange(n, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(v) + v * log_alpha_i - p.s * np.log(v + base) + const

    def log_tail(k):
        # v alpha^v <= C(v+1, 1) alpha^v
        return log_nb_tail(2, p.alpha(i), base, p.s, k) + const

    return math.exp(
        certified_log_sum(log_terms, log_tail, p.accuracy, "conditional mean").log_value
    )
