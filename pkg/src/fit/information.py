"""Observed information, asymptotic covariance and information criteria"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.dataset.count_table import Dataset
from src.distribution.params import UGATParams
from src.errors import DomainError, SingularInformation
from src.fit.likelihood import ParameterLayout
from src.logger import get_logger

logger = get_logger(__name__)

CONDITION_LIMIT = 1e10
Z_95 = 1.959963984540054


@dataclass(frozen=True, eq=False)
class InformationMatrix:
    """Symmetrized negative Hessian in unconstrained coordinates"""

    matrix: np.ndarray
    asymmetry: float
    names: Tuple[str, ...]


@dataclass(eq=False)
class Covariance:
    unconstrained: np.ndarray
    natural: np.ndarray
    condition_number: float
    warnings: List[str] = field(default_factory=list)


def information_criteria(neg_loglik: float, p: int, n: int) -> Tuple[float, float]:
    """AIC = 2p + 2(-L); BIC = p ln N + 2(-L)"""
    if p < 0 or n < 1:
        raise DomainError(f"need p >= 0 and N >= 1, got p = {p}, N = {n}")
    return 2.0 * p + 2.0 * neg_loglik, p * math.log(n) + 2.0 * neg_loglik


def observed_information(
    p: UGATParams,
    d: Dataset,
    layout: Optional[ParameterLayout] = None,
    rel_step: float = 1e-5,
) -> InformationMatrix:
    """
    -d^2 L / du^2 by central differences of the analytic score in the
    unconstrained coordinates u of the free parameters.
    """
    if layout is None:
        free = p.s > 0
        layout = ParameterLayout(
            p.r, estimate_beta=free, estimate_s=free, fixed_beta=p.beta, fixed_s=p.s
        )
    u0 = layout.to_unconstrained(p)
    k = u0.size
    hessian = np.empty((k, k))
    for j in range(k):
        h = rel_step * max(1.0, abs(u0[j]))
        up, down = u0.copy(), u0.copy()
        up[j] += h
        down[j] -= h
        g_up = layout.unconstrained_score(layout.to_params(up, p.accuracy), d)
        g_down = layout.unconstrained_score(layout.to_params(down, p.accuracy), d)
        hessian[:, j] = (g_up - g_down) / (2.0 * h)
    info = -hessian
    asymmetry = float(np.max(np.abs(info - info.T)) / 2.0) if k else 0.0
    return InformationMatrix(0.5 * (info + info.T), asymmetry, tuple(layout.names))


def covariance_from_information(
    info: InformationMatrix, p: UGATParams, layout: ParameterLayout
) -> Covariance:
    """
    Invert the information matrix and carry it to the natural scale with the
    delta method.

    Raises:
        SingularInformation: when the matrix is not positive definite
    """
    eigenvalues = np.linalg.eigvalsh(info.matrix)
    if eigenvalues.size == 0 or eigenvalues.min() <= 0:
        raise SingularInformation(
            f"observed information is not positive definite (smallest eigenvalue "
            f"{eigenvalues.min() if eigenvalues.size else float('nan'):.3g})"
        )
    condition = float(eigenvalues.max() / eigenvalues.min())
    warnings = []
    if condition > CONDITION_LIMIT:
        message = f"observed information is ill-conditioned (condition number {condition:.3g})"
        logger.warning(message)
        warnings.append(message)
        cov_u = np.linalg.pinv(info.matrix, hermitian=True)
    else:
        cov_u = np.linalg.inv(info.matrix)
    cov_u = 0.5 * (cov_u + cov_u.T)
    jac = layout.jacobian(p)
    natural = cov_u * np.outer(jac, jac)
    return Covariance(cov_u, natural, condition, warnings)


def confidence_intervals(
    p: UGATParams, layout: ParameterLayout, cov: Covariance, z: float = Z_95
):
    """u +/- z se(u), mapped back through the inverse transforms"""
    u0 = layout.to_unconstrained(p)
    se_u = np.sqrt(np.clip(np.diag(cov.unconstrained), 0.0, None))
    return layout.from_unconstrained_interval(u0 - z * se_u, u0 + z * se_u)
