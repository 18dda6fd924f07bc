"""
Log-likelihood of UGAT count data and its analytic gradient.

    L = sum_j sum_i x_ji log alpha_i - s sum_j log(T_j + beta) - N log S,  T_j = sum_i x_ji

Setting dL/dtheta = 0 gives the normal equations

    dL/d alpha_i = (sum_j x_ji - N E X_i) / alpha_i
    dL/d beta    = -s sum_j 1/(T_j + beta) + N s E[1/(T + beta)]
    dL/d s       = -sum_j log(T_j + beta) + N E[log(T + beta)]
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.special import expit, logit

from src.dataset.count_table import Dataset
from src.distribution.moments import (
    expected_inverse_total,
    expected_log_total,
    marginal_means,
)
from src.distribution.params import UGATParams
from src.errors import DimensionMismatch, DomainError, UGATError
from src.series.params import DEFAULT_ACCURACY, SeriesAccuracy

# box in the unconstrained coordinates; keeps the series away from overflow
LOGIT_BOUND = 30.0
LOG_BETA_BOUNDS = (-12.0, 14.0)
LOG_S_BOUNDS = (-12.0, math.log(60.0))


def _check_dimension(p: UGATParams, d: Dataset) -> None:
    if p.r != d.r:
        raise DimensionMismatch(f"parameters have r = {p.r}, data have r = {d.r}")


def neg_log_likelihood(p: UGATParams, d: Dataset) -> float:
    """-sum_j log P(X = x_j)"""
    _check_dimension(p, d)
    weights = float(np.dot(d.column_sums, p.log_alpha()))
    penalty = p.s * float(np.sum(np.log(d.totals + p.beta)))
    return -(weights - penalty - d.n * p.log_normalizer)


def score(p: UGATParams, d: Dataset) -> np.ndarray:
    """Gradient of the log-likelihood in natural coordinates [alpha_1..alpha_r, beta, s]"""
    _check_dimension(p, d)
    alphas = p.alphas.as_array()
    shifted = d.totals + p.beta
    grad_alpha = (d.column_sums - d.n * marginal_means(p)) / alphas
    grad_beta = p.s * (d.n * expected_inverse_total(p) - float(np.sum(1.0 / shifted)))
    grad_s = d.n * expected_log_total(p) - float(np.sum(np.log(shifted)))
    return np.concatenate([grad_alpha, [grad_beta, grad_s]])


@dataclass(frozen=True)
class ParameterLayout:
    """
    Which parameters are free and how they map to unconstrained coordinates:
    logit for alpha, log for beta and s. s = 0 is a boundary and is only reachable
    by holding s fixed.
    """

    r: int
    estimate_beta: bool = True
    estimate_s: bool = False
    fixed_beta: float = 1.0
    fixed_s: float = 0.0

    @property
    def names(self) -> List[str]:
        names = [f"alpha{i}" for i in range(1, self.r + 1)]
        if self.estimate_beta:
            names.append("beta")
        if self.estimate_s:
            names.append("s")
        return names

    @property
    def n_free(self) -> int:
        return len(self.names)

    def _mask(self) -> np.ndarray:
        return np.array([True] * self.r + [self.estimate_beta, self.estimate_s])

    def to_unconstrained(self, p: UGATParams) -> np.ndarray:
        if self.estimate_s and not p.s > 0:
            raise DomainError(f"s must be > 0 to be estimated, got {p.s}")
        log_s = math.log(p.s) if p.s > 0 else -math.inf
        full = np.concatenate([logit(p.alphas.as_array()), [math.log(p.beta), log_s]])
        return full[self._mask()]

    def to_params(
        self, u: np.ndarray, accuracy: SeriesAccuracy = DEFAULT_ACCURACY
    ) -> UGATParams:
        u = np.asarray(u, dtype=float)
        alphas = expit(u[: self.r])
        k = self.r
        beta, s = self.fixed_beta, self.fixed_s
        if self.estimate_beta:
            beta = math.exp(u[k])
            k += 1
        if self.estimate_s:
            s = math.exp(u[k])
        return UGATParams.build(alphas, beta, s, accuracy)

    def natural(self, p: UGATParams) -> np.ndarray:
        full = np.concatenate([p.alphas.as_array(), [p.beta, p.s]])
        return full[self._mask()]

    def jacobian(self, p: UGATParams) -> np.ndarray:
        """d theta / d u for each free parameter"""
        alphas = p.alphas.as_array()
        full = np.concatenate([alphas * (1.0 - alphas), [p.beta, p.s]])
        return full[self._mask()]

    def from_unconstrained_interval(self, lo: np.ndarray, hi: np.ndarray):
        """Map per-coordinate intervals in u back to natural scale"""
        transforms = [expit] * self.r
        if self.estimate_beta:
            transforms.append(np.exp)
        if self.estimate_s:
            transforms.append(np.exp)
        return (
            np.array([f(v) for f, v in zip(transforms, lo)], dtype=float),
            np.array([f(v) for f, v in zip(transforms, hi)], dtype=float),
        )

    def bounds(self) -> List[tuple]:
        bounds = [(-LOGIT_BOUND, LOGIT_BOUND)] * self.r
        if self.estimate_beta:
            bounds.append(LOG_BETA_BOUNDS)
        if self.estimate_s:
            bounds.append(LOG_S_BOUNDS)
        return bounds

    def unconstrained_score(self, p: UGATParams, d: Dataset) -> np.ndarray:
        """dL/du by the chain rule"""
        return (score(p, d)[self._mask()]) * self.jacobian(p)


class Objective:
    """
    Negative log-likelihood and its gradient on the unconstrained coordinates.

    Points where the series cannot be evaluated map to +inf so that line searches
    back off instead of failing.
    """

    def __init__(
        self,
        d: Dataset,
        layout: ParameterLayout,
        accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
    ):
        self.d = d
        self.layout = layout
        self.accuracy = accuracy
        self.evaluations = 0

    def params(self, u: np.ndarray) -> Optional[UGATParams]:
        try:
            return self.layout.to_params(u, self.accuracy)
        except (UGATError, OverflowError, ValueError):
            return None

    def value(self, u: np.ndarray) -> float:
        self.evaluations += 1
        p = self.params(u)
        if p is None:
            return math.inf
        try:
            value = neg_log_likelihood(p, self.d)
        except (UGATError, OverflowError, FloatingPointError):
            return math.inf
        return value if math.isfinite(value) else math.inf

    def value_and_grad(self, u: np.ndarray):
        self.evaluations += 1
        p = self.params(u)
        bad = (math.inf, np.zeros(len(u)))
        if p is None:
            return bad
        try:
            value = neg_log_likelihood(p, self.d)
            grad = -self.layout.unconstrained_score(p, self.d)
        except (UGATError, OverflowError, FloatingPointError):
            return bad
        if not math.isfinite(value) or not np.all(np.isfinite(grad)):
            return bad
        return value, grad
