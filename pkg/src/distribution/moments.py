"""
Moments and generating functions of the UGAT distribution.

Raw moments come from the one-dimensional marginal through summation by parts,

    E X_i^l = sum_{x >= 0} ((x+1)^l - x^l) P(X_i > x),

so every summand is nonnegative and the truncation can be certified. Factorial
moments are linked to raw moments by signed Stirling numbers of the first kind.
"""

import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import stirling2

from src.distribution.params import UGATParams, check_index
from src.errors import DivergentParameters, DomainError, OutOfTabulatedRange
from src.logger import get_logger
from src.series.kernel import (
    certified_log_sum,
    direct_log_terms,
    evaluate_series,
    log_nb_tail,
    log_series_M,
    log_series_M_batch,
)
from src.series.params import AlphaVector, SeriesParams

logger = get_logger(__name__)

STIRLING_MAX = 20


@lru_cache(maxsize=1)
def _stirling_table() -> tuple:
    table = [[0] * (STIRLING_MAX + 1) for _ in range(STIRLING_MAX + 1)]
    table[0][0] = 1
    for n in range(STIRLING_MAX):
        for k in range(1, n + 2):
            table[n + 1][k] = table[n][k - 1] - n * table[n][k]
    return tuple(tuple(row) for row in table)


def stirling_first(n: int, k: int) -> int:
    """Signed Stirling number of the first kind s(n, k), 0 <= k <= n <= 20"""
    if not 0 <= k <= n <= STIRLING_MAX:
        raise OutOfTabulatedRange(
            f"s({n}, {k}) outside the tabulated range 0 <= k <= n <= {STIRLING_MAX}"
        )
    return _stirling_table()[n][k]


def _log_increment_tail(p: UGATParams, i: int, ell: int, k) -> np.ndarray:
    """
    Bound on sum_{x > k} ((x+1)^l - x^l) P(X_i > x) for alpha_i < 1, with y = x + 1
    and (y^l - (y-1)^l) <= l y^(l-1) <= l! C(y+l-1, l-1).
    """
    k = np.asarray(k, dtype=float)
    # M(beta+y)/M(beta) <= 1
    return math.lgamma(ell + 1) + log_nb_tail(ell, p.alpha(i), p.beta, 0.0, k + 1.0)


def raw_moment(p: UGATParams, i: int, ell: int) -> float:
    """
    E(X_i^l) for l >= 1.

    A unit weight has only polynomially decaying increments; its raw moments are
    assembled from the closed factorial moments with Stirling numbers of the
    second kind instead.
    """
    alpha = p.alpha(i)
    if int(ell) != ell or ell < 1:
        raise DomainError(f"moment order must be a positive integer, got {ell}")
    ell = int(ell)
    if alpha == 1.0:
        if not p.s > p.r + ell:
            raise DivergentParameters(
                f"E(X_{i}^{ell}) is infinite unless s > r + {ell} (s = {p.s})"
            )
        return math.fsum(
            stirling2(ell, j, exact=True) * factorial_moment_closed(p, i, j)
            for j in range(1, ell + 1)
        )
    log_alpha = math.log(alpha)

    def log_terms(n):
        x = np.arange(n, dtype=float)
        log_m = log_series_M_batch(
            p.alphas, p.series_params, x + 1.0, p.accuracy
        )
        increments = np.log((x + 1.0) ** ell - x**ell)
        return increments + (x + 1.0) * log_alpha + log_m - p.log_normalizer

    total = certified_log_sum(
        log_terms,
        lambda k: _log_increment_tail(p, i, ell, k),
        p.accuracy,
        label=f"moment {ell} of X_{i}",
    )
    return math.exp(total.log_value)


def factorial_moment(p: UGATParams, i: int, ell: int) -> float:
    """E[X_i (X_i - 1) ... (X_i - l + 1)] = sum_j s(l, j) E(X_i^j)"""
    check_index(p, i)
    if int(ell) != ell or ell < 1:
        raise DomainError(f"moment order must be a positive integer, got {ell}")
    return math.fsum(
        stirling_first(int(ell), j) * raw_moment(p, i, j) for j in range(1, int(ell) + 1)
    )


def factorial_moment_closed(p: UGATParams, i: int, ell: int) -> float:
    """
    E[(X_i)_l] = l! alpha_i^l M'(beta + l) / M(beta), where M' is the series over the
    weights with alpha_i repeated l more times (d^l h_t / d alpha_i^l = l! h_{t-l} of
    that alphabet). Unit weights stay on the exact zeta path.
    """
    alpha = p.alpha(i)
    if int(ell) != ell or ell < 1:
        raise DomainError(f"moment order must be a positive integer, got {ell}")
    ell = int(ell)
    augmented = AlphaVector(p.alphas.values + (alpha,) * ell)
    try:
        log_aug = log_series_M(augmented, p.series_params, p.accuracy, shift=ell)
    except DivergentParameters as e:
        raise DivergentParameters(
            f"E[(X_{i})_{ell}] is infinite unless s > r + {ell} (s = {p.s})"
        ) from e
    return math.exp(
        math.lgamma(ell + 1) + ell * math.log(alpha) + log_aug - p.log_normalizer
    )


def marginal_mean(p: UGATParams, i: int) -> float:
    """E(X_i) = alpha_i M'(beta + 1) / M(beta)"""
    return factorial_moment_closed(p, i, 1)


def marginal_means(p: UGATParams) -> np.ndarray:
    return np.array([marginal_mean(p, i) for i in range(1, p.r + 1)])


def variance(p: UGATParams, i: int) -> float:
    """E[(X_i)_2] + E(X_i) - E(X_i)^2"""
    mean = marginal_mean(p, i)
    return factorial_moment_closed(p, i, 2) + mean - mean**2


def expected_inverse_total(p: UGATParams) -> float:
    """E[1 / (X_1 + ... + X_r + beta)] = M_{s+1}(beta) / M_s(beta)"""
    log_next = evaluate_series(p.alphas.values, p.beta, p.s + 1.0, p.accuracy).log_value
    return math.exp(log_next - p.log_normalizer)


def expected_log_total(p: UGATParams) -> float:
    """E[log(X_1 + ... + X_r + beta)]"""
    alphas = p.alphas.values
    q = max(alphas)
    # log u <= u^delta / (e delta) for u > 0
    delta = 0.5 if q < 1.0 else (p.s - p.r) / 2.0
    base_terms = direct_log_terms(alphas, p.beta, p.s)

    def log_terms(n):
        t = np.arange(n, dtype=float)
        log_u = np.log(t + p.beta)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_log = np.where(log_u > 0, np.log(np.maximum(log_u, 1e-300)), -np.inf)
        return base_terms(n) + log_log - p.log_normalizer

    def log_tail(k):
        return (
            log_nb_tail(p.r, q, p.beta, p.s - delta, k)
            - 1.0
            - math.log(delta)
            - p.log_normalizer
        )

    positive = math.exp(
        certified_log_sum(log_terms, log_tail, p.accuracy, "E log total").log_value
    )
    if p.beta >= 1.0:
        return positive
    # only t = 0 has t + beta < 1
    p_zero = math.exp(-p.s * math.log(p.beta) - p.log_normalizer)
    return positive + p_zero * math.log(p.beta)


def pgf(p: UGATParams, t: Sequence[float]) -> float:
    """
    E(prod t_i^{X_i}) = M(beta; t * alpha) / M(beta; alpha).

    Coordinates with t_i = 0 contribute only through X_i = 0 and are dropped from the
    series; every t_i alpha_i must stay within the convergence region.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size != p.r:
        raise DomainError(f"pgf argument needs {p.r} entries, got {t.size}")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError(f"pgf argument must be finite and >= 0, got {t.tolist()}")
    if np.all(t == 1.0):
        return 1.0
    scaled = t * p.alphas.as_array()
    kept = tuple(float(v) for v in scaled if v > 0)
    if not kept:
        return math.exp(-p.s * math.log(p.beta) - p.log_normalizer)
    log_m = log_series_M(AlphaVector(kept), SeriesParams(p.beta, p.s), p.accuracy)
    return math.exp(log_m - p.log_normalizer)


def mgf(p: UGATParams, t: Sequence[float]) -> float:
    """E(exp(sum t_i X_i)) = pgf(exp(t))"""
    return pgf(p, np.exp(np.atleast_1d(np.asarray(t, dtype=float))))
