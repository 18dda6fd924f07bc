"""
Multivariate survival, hazard and mean residual life of the UGAT distribution.

R(x) = P(X >= x) = prod alpha_i^{x_i} M(beta + sum x) / M(beta); every other
quantity here is a ratio of shifted series at B = beta + sum x.
"""

import math

import numpy as np

from src.distribution.params import (
    UGATParams,
    as_counts,
    check_index,
    log_shifted_series,
)
from src.errors import DivergentParameters, DomainError
from src.logger import get_logger
from src.series.kernel import (
    certified_log_sum,
    log_homogeneous_table,
    log_nb_tail,
    log_series_M_batch,
)

logger = get_logger(__name__)


def log_joint_survival(p: UGATParams, x) -> float:
    counts = as_counts(p, x)
    weights = float(np.dot(counts.as_array(), p.log_alpha()))
    return weights + log_shifted_series(p, counts.total) - p.log_normalizer


def joint_survival(p: UGATParams, x) -> float:
    """R(x) = P(X_1 >= x_1, ..., X_r >= x_r)"""
    return math.exp(log_joint_survival(p, x))


def residual_survival(p: UGATParams, i: int, t: int, x) -> float:
    """R_i(t, x) = alpha_i^t M(beta + sum x + t) / M(beta + sum x)"""
    alpha = p.alpha(i)
    if int(t) != t or t < 0:
        raise DomainError(f"t must be a nonnegative integer, got {t}")
    counts = as_counts(p, x)
    if t == 0:
        return 1.0
    log_ratio = log_shifted_series(p, counts.total + int(t)) - log_shifted_series(
        p, counts.total
    )
    return math.exp(int(t) * math.log(alpha) + log_ratio)


def hazard_component(p: UGATParams, i: int, x) -> float:
    """h_i(x) = P(X_i = x_i | X >= x) = 1 - R(x + e_i) / R(x)"""
    counts = as_counts(p, x)
    bumped = list(counts.coords)
    bumped[check_index(p, i) - 1] += 1
    return -math.expm1(log_joint_survival(p, bumped) - log_joint_survival(p, counts))


def hazard_vector(p: UGATParams, x) -> np.ndarray:
    return np.array([hazard_component(p, i, x) for i in range(1, p.r + 1)])


def _log_ratio_tail(p: UGATParams, total: int, m: int, q: float, k) -> np.ndarray:
    """
    Bound on sum_{u > k} C(u+m-1, m-1) q^u M(base + u) / M(base), base = beta + total.
    """
    k = np.asarray(k, dtype=float)
    base = p.beta + total
    if q < 1.0:
        # M(base+u)/M(base) <= 1
        return log_nb_tail(m, q, base, 0.0, k)
    r, s = p.r, p.s
    if not s > r + m:
        raise DivergentParameters(
            f"residual-life sum diverges unless s > {r + m} (s = {s})"
        )
    # C(u+m-1, m-1) <= c (u+base)^(m-1) and M(base+u) <= c' (u+base)^(r-s)
    log_c = (m - 1) * max(0.0, -math.log(base))
    log_c2 = (r - 1) * max(0.0, -math.log(base)) + math.log(1.0 / base + 1.0 / (s - r))
    return (
        log_c
        + log_c2
        + (m + r - s) * np.log(k + base)
        - math.log(s - r - m)
        - log_shifted_series(p, total)
    )


def _shift_ratio_sum(p: UGATParams, total: int, log_weights, m: int, q: float, label: str):
    """sum_u w_u M(beta + total + u) / M(beta + total), certified"""

    def log_terms(n):
        u = np.arange(n, dtype=float)
        log_m = log_series_M_batch(p.alphas, p.series_params, total + u, p.accuracy)
        # the u = 0 entry shares the batch truncation, so the leading ratio is exactly 1
        return log_weights(n) + log_m - log_m[0]

    return certified_log_sum(
        log_terms, lambda k: _log_ratio_tail(p, total, m, q, k), p.accuracy, label
    )


def mmrl_component(p: UGATParams, i: int, x) -> float:
    """m_i(x) = sum_{t >= 0} R_i(t, x)"""
    alpha = p.alpha(i)
    counts = as_counts(p, x)
    log_alpha = math.log(alpha)
    total = _shift_ratio_sum(
        p,
        counts.total,
        lambda n: np.arange(n, dtype=float) * log_alpha,
        1,
        alpha,
        label=f"mean residual life of X_{i}",
    )
    return math.exp(total.log_value)


def mmrl_vector(p: UGATParams, x) -> np.ndarray:
    return np.array([mmrl_component(p, i, x) for i in range(1, p.r + 1)])


def total_residual_survival(p: UGATParams, x) -> float:
    """
    sum over t in N^r of R(x + t) / R(x); the r-fold sum collapses to
    sum_u h_u(alpha) M(beta + sum x + u) / M(beta + sum x).
    """
    counts = as_counts(p, x)
    alphas = p.alphas.values
    total = _shift_ratio_sum(
        p,
        counts.total,
        lambda n: log_homogeneous_table(alphas, n - 1),
        p.r,
        max(alphas),
        label="total residual survival",
    )
    return math.exp(total.log_value)
