"""
Maximum-likelihood fitting of UGAT parameters.

The exponent s is profiled over a grid (optionally refined continuously). For each
grid value a batch of multistarts is optimized with L-BFGS-B in unconstrained
coordinates, falling back to a bounded Nelder-Mead simplex when the line search
fails, then polished. The reported fit is the best local optimum with ties broken
by the lowest (grid index, start index).

Usage:
    from src.dataset.count_table import load_count_table
    from src.fit.mle import FitConfig, fit_mle

    result = fit_mle(load_count_table("data/table1.csv"), FitConfig(n_jobs=4))
    result.to_dict()
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize
from scipy.special import logit
from tqdm import tqdm

from src.dataset.count_table import Dataset
from src.distribution.params import UGATParams
from src.errors import DegenerateData, DidNotConverge, DomainError, SingularInformation
from src.fit.information import (
    Covariance,
    confidence_intervals,
    covariance_from_information,
    information_criteria,
    observed_information,
)
from src.fit.likelihood import Objective, ParameterLayout
from src.logger import get_logger
from src.series.params import DEFAULT_ACCURACY, SeriesAccuracy

logger = get_logger(__name__)

DEFAULT_S_GRID = (0.5, 1.0, 2.0, 3.0, 5.0, 8.0)
BETA_STARTS = (1.0, 10.0, 100.0, 1000.0)
START_JITTER = 0.25
# standard error of log(beta) above which the likelihood is reported as flat in beta
FLAT_LOG_BETA_SE = 1.0


@dataclass(frozen=True)
class FitConfig:
    """Fitting options; every field is echoed in the run manifest"""

    estimate_s: bool = False
    s_fixed: Optional[float] = None
    s_grid: Tuple[float, ...] = DEFAULT_S_GRID
    include_boundary: bool = False
    tol: float = 1e-6
    ftol_rel: float = 1e-10
    max_iter: int = 500
    multistart: int = 8
    seed: int = 2024
    n_jobs: int = 1
    strict: bool = True
    progress: bool = False
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError(f"tolerance must be > 0, got {self.tol}")
        if self.multistart < 1:
            raise DomainError(f"multistart must be >= 1, got {self.multistart}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.s_fixed is None and not self.s_grid:
            raise DomainError("s grid is empty")
        for s in self.grid():
            if not math.isfinite(s) or s < 0:
                raise DomainError(f"s values must be finite and >= 0, got {s}")

    def grid(self) -> Tuple[float, ...]:
        """s values to profile; the s = 0 boundary only with include_boundary"""
        if self.s_fixed is not None:
            return (float(self.s_fixed),)
        grid = tuple(float(s) for s in self.s_grid)
        if self.include_boundary and 0.0 not in grid:
            grid = (0.0,) + grid
        return grid

    def to_dict(self) -> dict:
        out = asdict(self)
        out["s_grid"] = list(self.grid())
        return out


@dataclass
class LocalFit:
    grid_index: int
    start_index: int
    layout: ParameterLayout
    u: np.ndarray
    neg_loglik: float
    start_neg_loglik: float
    converged: bool
    iterations: int
    grad_norm: float


@dataclass
class FitResult:
    params: UGATParams
    neg_loglik: float
    aic: float
    bic: float
    n_params: int
    n_obs: int
    free_names: List[str]
    estimates: Dict[str, float]
    std_errors: Optional[Dict[str, float]]
    intervals: Optional[Dict[str, Tuple[float, float]]]
    covariance: Optional[np.ndarray]
    converged: bool
    iterations: int
    grad_norm: float
    s_profile: List[Tuple[float, float]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    singular_information: bool = False
    condition_number: Optional[float] = None
    information_asymmetry: Optional[float] = None

    @property
    def log_likelihood(self) -> float:
        return -self.neg_loglik

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "neg_loglik": self.neg_loglik,
            "log_likelihood": self.log_likelihood,
            "aic": self.aic,
            "bic": self.bic,
            "n_params": self.n_params,
            "n_obs": self.n_obs,
            "free_parameters": self.free_names,
            "estimates": self.estimates,
            "std_errors": self.std_errors,
            "intervals": (
                {k: list(v) for k, v in self.intervals.items()}
                if self.intervals is not None
                else None
            ),
            "covariance": self.covariance,
            "converged": self.converged,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "s_profile": [{"s": s, "neg_loglik": v} for s, v in self.s_profile],
            "warnings": self.warnings,
            "information": {
                "singular": self.singular_information,
                "condition_number": self.condition_number,
                "asymmetry": self.information_asymmetry,
            },
        }


def check_dataset(d: Dataset) -> None:
    zero = [i + 1 for i, total in enumerate(d.column_sums) if total == 0]
    if zero:
        raise DegenerateData(
            f"coordinate(s) {zero} are identically zero; drop them before fitting"
        )


def layout_for(r: int, s: float, estimate_s: bool = False) -> ParameterLayout:
    """beta is not identifiable when s is held at exactly 0"""
    estimate_beta = estimate_s or s != 0.0
    return ParameterLayout(r, estimate_beta=estimate_beta, estimate_s=estimate_s, fixed_s=s)


def initial_points(d: Dataset, cfg: FitConfig) -> List[Tuple[np.ndarray, float]]:
    """Moment-matched alpha = xbar / (1 + xbar) over beta decades, jittered after the first pass"""
    rng = np.random.default_rng(cfg.seed)
    base = np.clip(d.means / (1.0 + d.means), 1e-3, 1.0 - 1e-3)
    starts = []
    for k in range(cfg.multistart):
        logits = logit(base)
        if k >= len(BETA_STARTS):
            logits = logits + rng.normal(0.0, START_JITTER, size=d.r)
        starts.append((logits, BETA_STARTS[k % len(BETA_STARTS)]))
    return starts


def _start_vector(layout: ParameterLayout, logits: np.ndarray, beta0: float, s0: float):
    u = list(logits)
    if layout.estimate_beta:
        u.append(math.log(beta0))
    if layout.estimate_s:
        u.append(math.log(s0))
    return np.array(u, dtype=float)


def _projected_grad_norm(u: np.ndarray, grad: np.ndarray, bounds) -> float:
    """Inf-norm of the gradient with components pushing into an active bound removed"""
    g = grad.copy()
    for k, (lo, hi) in enumerate(bounds):
        if u[k] <= lo + 1e-12 and g[k] > 0:
            g[k] = 0.0
        if u[k] >= hi - 1e-12 and g[k] < 0:
            g[k] = 0.0
    return float(np.max(np.abs(g))) if g.size else 0.0


def _local_fit(
    d: Dataset,
    layout: ParameterLayout,
    u0: np.ndarray,
    cfg: FitConfig,
    grid_index: int,
    start_index: int,
) -> LocalFit:
    objective = Objective(d, layout, cfg.accuracy)
    bounds = layout.bounds()
    u0 = np.clip(u0, [b[0] for b in bounds], [b[1] for b in bounds])
    f0 = objective.value(u0)
    options = {"maxiter": cfg.max_iter, "gtol": cfg.tol, "ftol": cfg.ftol_rel}

    res = minimize(
        objective.value_and_grad, u0, jac=True, method="L-BFGS-B", bounds=bounds, options=options
    )
    u, f, iterations = np.asarray(res.x), float(res.fun), int(res.nit)
    if not res.success or not math.isfinite(f):
        logger.debug("L-BFGS-B stopped (%s); simplex restart", res.message)
        simplex = minimize(
            objective.value,
            u if math.isfinite(f) else u0,
            method="Nelder-Mead",
            bounds=bounds,
            options={"maxiter": 40 * cfg.max_iter, "xatol": 1e-9, "fatol": 1e-12},
        )
        iterations += int(simplex.nit)
        if not math.isfinite(f) or simplex.fun < f:
            u, f = np.asarray(simplex.x), float(simplex.fun)

    # polish ends on the gradient norm; ftol sits at machine precision
    polish_options = {**options, "ftol": float(np.finfo(float).eps)}
    polish = minimize(
        objective.value_and_grad,
        u,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options=polish_options,
    )
    iterations += int(polish.nit)
    rel_change = abs(f - polish.fun) / max(1.0, abs(f)) if math.isfinite(f) else math.inf
    if polish.fun <= f:
        u, f = np.asarray(polish.x), float(polish.fun)
    if not f <= f0:
        u, f = u0, f0

    value, grad = objective.value_and_grad(u)
    grad_norm = _projected_grad_norm(u, grad, bounds) if math.isfinite(value) else math.inf
    converged = math.isfinite(f) and grad_norm < cfg.tol
    if not converged and rel_change < cfg.ftol_rel:
        logger.debug(
            "start %d/%d stalled: objective change %.3g, grad norm %.3g",
            grid_index,
            start_index,
            rel_change,
            grad_norm,
        )
    return LocalFit(
        grid_index, start_index, layout, u, f, f0, converged, iterations, grad_norm
    )


def _run_batch(d: Dataset, tasks: list, cfg: FitConfig) -> List[LocalFit]:
    jobs = (
        delayed(_local_fit)(d, layout, u0, cfg, gi, si)
        for gi, si, layout, u0 in tqdm(
            tasks, desc="Multistart fits", disable=not cfg.progress
        )
    )
    return Parallel(n_jobs=cfg.n_jobs, prefer="threads")(jobs)


def _best(fits: List[LocalFit]) -> LocalFit:
    return min(fits, key=lambda f: (f.neg_loglik, f.grid_index, f.start_index))


def summarize_fit(
    d: Dataset,
    best: LocalFit,
    cfg: FitConfig,
    s_profile: List[Tuple[float, float]],
) -> FitResult:
    """Information matrix, covariance, intervals and criteria at the chosen optimum"""
    layout = best.layout
    p = layout.to_params(best.u, cfg.accuracy)
    names = layout.names
    estimates = dict(zip(names, layout.natural(p).tolist()))
    aic, bic = information_criteria(best.neg_loglik, layout.n_free, d.n)
    warnings: List[str] = []
    if not math.isfinite(best.neg_loglik):
        raise DidNotConverge("no start produced a finite likelihood")

    std_errors = intervals = covariance = None
    singular = False
    condition = asymmetry = None
    try:
        info = observed_information(p, d, layout)
        asymmetry = info.asymmetry
        cov: Covariance = covariance_from_information(info, p, layout)
        condition = cov.condition_number
        warnings.extend(cov.warnings)
        covariance = cov.natural
        std_errors = dict(zip(names, np.sqrt(np.clip(np.diag(cov.natural), 0, None)).tolist()))
        lo, hi = confidence_intervals(p, layout, cov)
        intervals = {n: (float(a), float(b)) for n, a, b in zip(names, lo, hi)}
        if layout.estimate_beta:
            k = names.index("beta")
            if math.sqrt(max(cov.unconstrained[k, k], 0.0)) > FLAT_LOG_BETA_SE:
                message = "likelihood is flat in beta; its interval is wide"
                logger.warning(message)
                warnings.append(message)
    except SingularInformation as e:
        singular = True
        logger.warning("%s; covariance omitted", e)
        warnings.append(f"{e}; covariance omitted")

    for name, u_k, (lo_b, hi_b) in zip(names, best.u, layout.bounds()):
        if u_k <= lo_b + 1e-9 or u_k >= hi_b - 1e-9:
            warnings.append(f"{name} is at the boundary of the search box")

    return FitResult(
        params=p,
        neg_loglik=best.neg_loglik,
        aic=aic,
        bic=bic,
        n_params=layout.n_free,
        n_obs=d.n,
        free_names=names,
        estimates=estimates,
        std_errors=std_errors,
        intervals=intervals,
        covariance=covariance,
        converged=best.converged,
        iterations=best.iterations,
        grad_norm=best.grad_norm,
        s_profile=s_profile,
        warnings=warnings,
        singular_information=singular,
        condition_number=condition,
        information_asymmetry=asymmetry,
    )


def fit_mle(d: Dataset, cfg: FitConfig = FitConfig()) -> FitResult:
    """
    Fit (alpha, beta) on each s of the grid and return the best optimum.

    With estimate_s the grid-best point is refined with s free.

    Raises:
        DegenerateData: a coordinate is identically zero
        DidNotConverge: with cfg.strict, when the chosen optimum fails the
            convergence criterion; the result is attached to the exception
    """
    check_dataset(d)
    grid = cfg.grid()
    starts = initial_points(d, cfg)
    tasks = []
    for gi, s in enumerate(grid):
        layout = layout_for(d.r, s)
        for si, (logits, beta0) in enumerate(starts):
            tasks.append((gi, si, layout, _start_vector(layout, logits, beta0, s)))
    min_free = min(t[2].n_free for t in tasks) + (1 if cfg.estimate_s else 0)
    if d.n < min_free:
        raise DegenerateData(f"need at least {min_free} observations, got {d.n}")

    logger.info("Fitting r=%d, N=%d over %d s values x %d starts", d.r, d.n, len(grid), len(starts))
    fits = _run_batch(d, tasks, cfg)
    s_profile = []
    for gi, s in enumerate(grid):
        best_here = _best([f for f in fits if f.grid_index == gi])
        s_profile.append((s, best_here.neg_loglik))
        logger.info("s=%s: -L=%.6f", s, best_here.neg_loglik)
    best = _best(fits)

    if cfg.estimate_s and grid[best.grid_index] == 0.0:
        logger.info("grid optimum is the s = 0 boundary; s is not refined")
    elif cfg.estimate_s:
        s0 = grid[best.grid_index]
        layout = layout_for(d.r, s0, estimate_s=True)
        p0 = best.layout.to_params(best.u, cfg.accuracy)
        u0 = layout.to_unconstrained(p0)
        # the refined fit never ends above its start, the grid optimum
        best = _local_fit(d, layout, u0, cfg, best.grid_index, best.start_index)
        logger.info("s refined to %s: -L=%.6f", math.exp(best.u[-1]), best.neg_loglik)

    result = summarize_fit(d, best, cfg, s_profile)
    if not result.converged:
        message = (
            "optimizer did not meet the convergence criterion "
            f"(grad norm {result.grad_norm:.3g})"
        )
        logger.warning(message)
        result.warnings.append(message)
        if cfg.strict:
            raise DidNotConverge(message, result)
    return result
