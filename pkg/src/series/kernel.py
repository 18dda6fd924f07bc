"""
Normalizing series of the UGAT family.

    M(beta) = sum_{l_1..l_r >= 0} prod alpha_i^{l_i} / (l_1 + ... + l_r + beta)^s
            = sum_{t >= 0} h_t(alpha) / (t + beta)^s

h_t is the complete homogeneous symmetric polynomial of degree t. Everything is
evaluated in the log domain; truncation is certified by a closed-form tail bound.
Unit weights (alpha_i = 1) are summed exactly through Hurwitz zeta values.
"""

import math
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import lfilter
from scipy.special import comb, logsumexp, zeta
from scipy.stats import nbinom

from src.errors import DomainError, NonConvergent
from src.logger import get_logger
from src.series.params import (
    DEFAULT_ACCURACY,
    AlphaVector,
    SeriesAccuracy,
    SeriesParams,
    check_convergence,
)

logger = get_logger(__name__)

INITIAL_TERMS = 64
# rows * terms per chunk when evaluating many shifts at once
BATCH_CELLS = 4_000_000


class CertifiedSum(NamedTuple):
    """Log of a certified positive sum and the terms that were kept"""

    log_value: float
    n_terms: int
    log_terms: np.ndarray


def homogeneous_table(alphas: Sequence[float], T: int) -> np.ndarray:
    """h_0 .. h_T by the prefix recurrence H[j][t] = H[j-1][t] + alpha_j H[j][t-1]"""
    h = np.zeros(T + 1)
    h[0] = 1.0
    for alpha in alphas:
        h = lfilter([1.0], [1.0, -float(alpha)], h)
    return h


def log_homogeneous_table(alphas: Sequence[float], T: int) -> np.ndarray:
    """log h_0 .. log h_T without underflow: h_t(alpha) = q^t h_t(alpha / q), q = max alpha"""
    q = max(alphas)
    scaled = homogeneous_table([a / q for a in alphas], T)
    return np.arange(T + 1) * math.log(q) + np.log(scaled)


def homogeneous_sym(t: int, alphas: Union[AlphaVector, Sequence[float]]) -> float:
    """Complete homogeneous symmetric polynomial h_t(alpha)"""
    if t < 0:
        raise DomainError(f"degree must be >= 0, got {t}")
    values = AlphaVector.of(alphas).values
    return float(homogeneous_table(values, int(t))[int(t)])


def log_nb_tail(m: int, q: float, beta: float, s: float, T) -> np.ndarray:
    """
    Log upper bound on sum_{t > T} C(t+m-1, m-1) q^t (t+beta)^(-s), vectorized over T.

    Nonincreasing in T. +inf where no finite bound is available yet.
    """
    T = np.asarray(T, dtype=float)
    if q < 1.0:
        log_nb = nbinom.logsf(T, m, 1.0 - q) - m * math.log1p(-q)
        return log_nb - s * np.log(T + 1.0 + beta)
    if not s > m:
        return np.full(T.shape, np.inf)
    # C(t+m-1, m-1) <= (t+1)^(m-1) <= kappa (t+beta)^(m-1); integral comparison
    log_kappa = (m - 1) * max(0.0, -math.log(beta))
    return log_kappa + (m - s) * np.log(T + beta) - math.log(s - m)


def certified_log_sum(
    log_terms: Callable[[int], np.ndarray],
    log_tail: Callable[[np.ndarray], np.ndarray],
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
    label: str = "series",
) -> CertifiedSum:
    """
    Sum nonnegative terms given in log form, doubling the number of terms until the
    tail bound after some index k is below abs_tol and below rel_tol times the
    partial sum through k.

    log_terms(n) returns the log of terms 0..n-1; log_tail(k) bounds the log of the
    sum of all terms after index k.
    """
    log_abs = math.log(accuracy.abs_tol)
    log_rel = math.log(accuracy.rel_tol)
    n = min(INITIAL_TERMS, accuracy.max_terms)
    while True:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.asarray(log_terms(n), dtype=float)
            partial = np.logaddexp.accumulate(terms)
        tail = np.asarray(log_tail(np.arange(n)), dtype=float)
        done = (tail <= log_abs) & (tail <= log_rel + partial)
        if done.any():
            k = int(np.argmax(done))
            kept = terms[: k + 1]
            logger.debug("%s certified after %d terms", label, k + 1)
            return CertifiedSum(float(logsumexp(kept)), k + 1, kept)
        if n >= accuracy.max_terms:
            raise NonConvergent(
                f"{label}: tail bound still above tolerance after {n} terms"
            )
        n = min(2 * n, accuracy.max_terms)


def _unit_coefficients(m: int, base: np.ndarray) -> np.ndarray:
    """
    Coefficients c_j(base) with C(t+m-1, m-1) = sum_j c_j(base) (t + base)^j.

    Returns an array of shape (m, len(base)).
    """
    if m == 1:
        poly_t = np.array([1.0])
    else:
        poly_t = npoly.polyfromroots(-np.arange(1, m, dtype=float)) / math.factorial(
            m - 1
        )
    coeffs = np.zeros((m, base.size))
    for k, a_k in enumerate(poly_t):
        for j in range(k + 1):
            coeffs[j] += a_k * comb(k, j) * (-base) ** (k - j)
    return coeffs


def log_unit_series(m: int, base, s: float, start=0) -> np.ndarray:
    """
    log sum_{t >= start} C(t+m-1, m-1) (t+base)^(-s) through Hurwitz zeta values.

    Requires s > m. Vectorized over base and start.
    """
    base = np.atleast_1d(np.asarray(base, dtype=float))
    start = np.broadcast_to(np.asarray(start, dtype=float), base.shape)
    coeffs = _unit_coefficients(m, base)
    total = np.zeros(base.shape)
    for j in range(m):
        total += coeffs[j] * zeta(s - j, base + start)
    if np.any(total <= 0):
        raise NonConvergent("unit-weight series lost all precision to cancellation")
    return np.log(total)


def _mixed_series(
    rest: Sequence[float], units: int, beta: float, s: float, accuracy: SeriesAccuracy
) -> CertifiedSum:
    """Unit block summed exactly, remaining weights summed as a certified outer series"""
    q_rest = max(rest)

    def log_terms(n):
        b = np.arange(n, dtype=float)
        log_h = log_homogeneous_table(rest, n - 1)
        return log_h + log_unit_series(units, beta + b, s)

    def log_tail(k):
        return log_unit_series(units, beta + k + 1.0, s) + log_nb_tail(
            len(rest), q_rest, 1.0, 0.0, k
        )

    return certified_log_sum(log_terms, log_tail, accuracy, label="mixed series")


def direct_log_terms(alphas: Sequence[float], beta: float, s: float):
    """Closure returning log(h_t) - s log(t + beta) for t = 0..n-1"""

    def log_terms(n):
        t = np.arange(n, dtype=float)
        return log_homogeneous_table(alphas, n - 1) - s * np.log(t + beta)

    return log_terms


def _direct_series(
    alphas: Sequence[float], beta: float, s: float, accuracy: SeriesAccuracy
) -> CertifiedSum:
    r, q = len(alphas), max(alphas)
    return certified_log_sum(
        direct_log_terms(alphas, beta, s),
        lambda k: log_nb_tail(r, q, beta, s, k),
        accuracy,
        label="series",
    )


def evaluate_series(
    alphas: Sequence[float], beta: float, s: float, accuracy: SeriesAccuracy
) -> CertifiedSum:
    """Dispatch to the direct, all-unit or mixed evaluation path"""
    alphas = tuple(alphas)
    units = sum(1 for a in alphas if a == 1.0)
    if units == 0:
        return _direct_series(alphas, beta, s, accuracy)
    if units == len(alphas):
        log_value = float(log_unit_series(units, beta, s)[0])
        return CertifiedSum(log_value, 0, np.array([log_value]))
    rest = tuple(a for a in alphas if a < 1.0)
    return _mixed_series(rest, units, beta, s, accuracy)


def _validate_shift(shift) -> float:
    if shift < 0 or float(shift) != int(shift):
        raise DomainError(f"shift must be a nonnegative integer, got {shift}")
    return float(shift)


def log_series_M(
    alphas: Union[AlphaVector, Sequence[float]],
    sp: SeriesParams,
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
    shift: int = 0,
) -> float:
    """log M(beta + shift)"""
    alphas = AlphaVector.of(alphas)
    check_convergence(alphas, sp)
    beta = sp.beta + _validate_shift(shift)
    return evaluate_series(alphas.values, beta, sp.s, accuracy).log_value


def series_M(
    alphas: Union[AlphaVector, Sequence[float]],
    sp: SeriesParams,
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
) -> float:
    """Bare normalizing series sum_t h_t(alpha) / (t + beta)^s"""
    return math.exp(log_series_M(alphas, sp, accuracy))


def series_M_shifted(
    alphas: Union[AlphaVector, Sequence[float]],
    sp: SeriesParams,
    shift: int,
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
) -> float:
    """Same series with beta replaced by beta + shift"""
    return math.exp(log_series_M(alphas, sp, accuracy, shift=shift))


def series_tail_bound(
    alphas: Union[AlphaVector, Sequence[float]], sp: SeriesParams, T: int
) -> float:
    """Upper bound on sum_{t > T} h_t(alpha) / (t + beta)^s"""
    if T < 0:
        raise DomainError(f"T must be >= 0, got {T}")
    alphas = AlphaVector.of(alphas)
    check_convergence(alphas, sp)
    log_bound = log_nb_tail(alphas.r, alphas.max_value, sp.beta, sp.s, [T])[0]
    return math.exp(log_bound)


def _batch_direct(
    alphas: tuple, beta: float, s: float, shifts: np.ndarray, accuracy: SeriesAccuracy
) -> np.ndarray:
    """All shifts summed to one common truncation index"""
    r, q = len(alphas), max(alphas)
    n = max(
        _direct_series(alphas, beta + shifts.min(), s, accuracy).n_terms,
        _direct_series(alphas, beta + shifts.max(), s, accuracy).n_terms,
    )
    log_abs = math.log(accuracy.abs_tol)
    log_rel = math.log(accuracy.rel_tol)
    while True:
        log_h = log_homogeneous_table(alphas, n - 1)
        t = np.arange(n, dtype=float)
        out = np.empty(shifts.size)
        rows = max(1, BATCH_CELLS // n)
        for lo in range(0, shifts.size, rows):
            chunk = shifts[lo : lo + rows]
            terms = log_h[None, :] - s * np.log(t[None, :] + beta + chunk[:, None])
            out[lo : lo + rows] = logsumexp(terms, axis=1)
        tails = np.array(
            [log_nb_tail(r, q, beta + a, s, [n - 1])[0] for a in shifts]
        )
        if np.all((tails <= log_abs) & (tails <= log_rel + out)):
            logger.debug("batch of %d shifts certified at %d terms", shifts.size, n)
            return out
        if n >= accuracy.max_terms:
            raise NonConvergent(f"shifted series batch not certified after {n} terms")
        n = min(2 * n, accuracy.max_terms)


def log_series_M_batch(
    alphas: Union[AlphaVector, Sequence[float]],
    sp: SeriesParams,
    shifts,
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
) -> np.ndarray:
    """
    log M(beta + a) for every shift a, sharing one truncation index so that ratios of
    shifted series carry correlated (cancelling) truncation error.
    """
    alphas = AlphaVector.of(alphas)
    check_convergence(alphas, sp)
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    for shift in shifts:
        _validate_shift(shift)
    units = alphas.unit_count
    if units == alphas.r:
        return log_unit_series(units, sp.beta + shifts, sp.s)
    if units > 0:
        return np.array(
            [evaluate_series(alphas.values, sp.beta + a, sp.s, accuracy).log_value for a in shifts]
        )
    return _batch_direct(alphas.values, sp.beta, sp.s, shifts, accuracy)


def log_series_ratio(
    alphas: Union[AlphaVector, Sequence[float]],
    sp: SeriesParams,
    shift_num: int,
    shift_den: int,
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
) -> float:
    """log [M(beta + shift_num) / M(beta + shift_den)] with shared truncation"""
    pair = log_series_M_batch(alphas, sp, [shift_num, shift_den], accuracy)
    return float(pair[0] - pair[1])
