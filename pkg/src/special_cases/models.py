"""
One-dimensional special cases realized as UGAT instances.

Each catalogue model is a UGAT with r = 1 evaluated at x - support_offset, so the
models printed on x in N are shifted copies of a base that starts at 0:

    model                 alpha   beta    s       offset
    Lerch                 p       a + 1   c       1
    Hurwitz-Lerch zeta    theta   a + 1   s + 1   1
    Good                  theta   1       s + 1   1
    Hurwitz zeta          1       b       sigma   0
    Zipf-Mandelbrot       1       a + 1   c       1
    discrete Pareto       1       1       c       1
    geometric             p       1       0       1 (N) or 0 (N0)
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Union

import numpy as np
from scipy.special import zeta

from src.distribution.moments import marginal_mean, variance
from src.distribution.params import UGATParams
from src.distribution.pmf import joint_pmf, marginal_ccdf, marginal_cdf
from src.distribution.sampling import sample
from src.errors import DivergentParameters, DomainError
from src.reliability.survival import hazard_component
from src.series.params import DEFAULT_ACCURACY, SeriesAccuracy
from src.special_cases.model_config import MODEL_PARAMETERS, ModelName, Support

# direct summation length for the catalogue normalizers with geometric decay
DISPLAY_TERMS = 20_000


@dataclass(frozen=True)
class ShiftedDistribution:
    """UGAT with r = 1 moved onto {support_offset, support_offset + 1, ...}"""

    base: UGATParams
    support_offset: int
    name: str = "ugat"

    def __post_init__(self):
        if self.base.r != 1:
            raise DomainError(f"shifted models are one-dimensional, got r = {self.base.r}")
        if self.support_offset < 0:
            raise DomainError(f"support offset must be >= 0, got {self.support_offset}")

    def _local(self, x: int) -> int:
        if float(x) != int(x):
            raise DomainError(f"x must be an integer, got {x}")
        return int(x) - self.support_offset

    def pmf(self, x: int) -> float:
        y = self._local(x)
        return joint_pmf(self.base, [y]) if y >= 0 else 0.0

    def cdf(self, x: int) -> float:
        y = self._local(x)
        return marginal_cdf(self.base, 1, y) if y >= 0 else 0.0

    def sf(self, x: int) -> float:
        """P(X > x)"""
        y = self._local(x)
        return marginal_ccdf(self.base, 1, y) if y >= 0 else 1.0

    def hazard(self, x: int) -> float:
        """P(X = x | X >= x)"""
        y = self._local(x)
        if y < 0:
            return 0.0
        return hazard_component(self.base, 1, [y])

    def mean(self) -> float:
        return self.support_offset + marginal_mean(self.base, 1)

    def variance(self) -> float:
        return variance(self.base, 1)

    def sample(self, n_samples: int, seed: int) -> np.ndarray:
        return sample(self.base, n_samples, seed)[:, 0] + self.support_offset

    def to_dict(self) -> dict:
        return {
            "model": self.name,
            "support_offset": self.support_offset,
            **self.base.to_dict(),
        }


def _require(condition: bool, message: str, error=DomainError):
    if not condition:
        raise error(message)


def make_lerch(
    p_: float, a: float, c: float, accuracy: SeriesAccuracy = DEFAULT_ACCURACY
) -> ShiftedDistribution:
    """P(X = x) ∝ p^x / (x + a)^c on x = 1, 2, ..."""
    _require(0 < p_, f"p must be in (0, 1), got {p_}")
    _require(p_ < 1, f"p must be in (0, 1), got {p_}", DivergentParameters)
    _require(a > 0, f"a must be > 0, got {a}")
    base = UGATParams.build([p_], beta=a + 1.0, s=c, accuracy=accuracy)
    return ShiftedDistribution(base, 1, ModelName.LERCH.value)


def make_hurwitz_lerch_zeta(
    theta: float, a: float, s_: float, accuracy: SeriesAccuracy = DEFAULT_ACCURACY
) -> ShiftedDistribution:
    """P(X = x) ∝ theta^x / (x + a)^(s+1) on x = 1, 2, ..."""
    _require(0 < theta <= 1, f"theta must be in (0, 1], got {theta}")
    _require(a >= 0, f"a must be >= 0, got {a}")
    _require(s_ >= 0, f"s must be >= 0, got {s_}")
    if theta == 1:
        _require(s_ > 0, "theta = 1 needs s > 0", DivergentParameters)
    base = UGATParams.build([theta], beta=a + 1.0, s=s_ + 1.0, accuracy=accuracy)
    return ShiftedDistribution(base, 1, ModelName.HURWITZ_LERCH_ZETA.value)


def make_good(
    theta: float, s_: float, accuracy: SeriesAccuracy = DEFAULT_ACCURACY
) -> ShiftedDistribution:
    """P(X = x) ∝ theta^x / x^(s+1) on x = 1, 2, ..."""
    _require(0 < theta, f"theta must be in (0, 1), got {theta}")
    _require(theta < 1, f"theta must be in (0, 1), got {theta}", DivergentParameters)
    base = UGATParams.build([theta], beta=1.0, s=s_ + 1.0, accuracy=accuracy)
    return ShiftedDistribution(base, 1, ModelName.GOOD.value)


def make_hurwitz_zeta(
    b: float, sigma: float, accuracy: SeriesAccuracy = DEFAULT_ACCURACY
) -> ShiftedDistribution:
    """P(X = x) ∝ 1 / (x + b)^sigma on x = 0, 1, ..."""
    _require(b > 0, f"b must be > 0, got {b}")
    _require(sigma > 1, f"sigma must be > 1, got {sigma}", DivergentParameters)
    base = UGATParams.build([1.0], beta=b, s=sigma, accuracy=accuracy)
    return ShiftedDistribution(base, 0, ModelName.HURWITZ_ZETA.value)


def make_zipf_mandelbrot(
    a: float, c: float, accuracy: SeriesAccuracy = DEFAULT_ACCURACY
) -> ShiftedDistribution:
    """P(X = x) ∝ 1 / (x + a)^c on x = 1, 2, ..."""
    _require(a > 0, f"a must be > 0, got {a}")
    _require(c > 1, f"c must be > 1, got {c}", DivergentParameters)
    base = UGATParams.build([1.0], beta=a + 1.0, s=c, accuracy=accuracy)
    return ShiftedDistribution(base, 1, ModelName.ZIPF_MANDELBROT.value)


def make_discrete_pareto(
    c: float, accuracy: SeriesAccuracy = DEFAULT_ACCURACY
) -> ShiftedDistribution:
    """P(X = x) = x^(-c) / zeta(c) on x = 1, 2, ..."""
    _require(c > 1, f"c must be > 1, got {c}", DivergentParameters)
    base = UGATParams.build([1.0], beta=1.0, s=c, accuracy=accuracy)
    return ShiftedDistribution(base, 1, ModelName.DISCRETE_PARETO.value)


def make_geometric(
    p_: float,
    support: Union[Support, str] = Support.N,
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
) -> ShiftedDistribution:
    """P(X = x) = p^(x-1) (1 - p) on N, or p^x (1 - p) on N0"""
    _require(0 < p_, f"p must be in (0, 1), got {p_}")
    _require(p_ < 1, f"p must be in (0, 1), got {p_}", DivergentParameters)
    support = Support(support)
    base = UGATParams.build([p_], beta=1.0, s=0.0, accuracy=accuracy)
    return ShiftedDistribution(base, 1 if support is Support.N else 0, ModelName.GEOMETRIC.value)


CONSTRUCTORS: Dict[ModelName, Callable[..., ShiftedDistribution]] = {
    ModelName.LERCH: make_lerch,
    ModelName.HURWITZ_LERCH_ZETA: make_hurwitz_lerch_zeta,
    ModelName.GOOD: make_good,
    ModelName.HURWITZ_ZETA: make_hurwitz_zeta,
    ModelName.ZIPF_MANDELBROT: make_zipf_mandelbrot,
    ModelName.DISCRETE_PARETO: make_discrete_pareto,
    ModelName.GEOMETRIC: make_geometric,
}


def make_model(
    model: Union[ModelName, str],
    params: Dict[str, float],
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
    support: Union[Support, str] = Support.N,
) -> ShiftedDistribution:
    """Build a named sub-model from a mapping of its parameter names to values"""
    model = ModelName(model)
    if model is ModelName.UGAT:
        raise DomainError("ugat is not a one-dimensional catalogue model")
    names = MODEL_PARAMETERS[model]
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise DomainError(f"model {model.value} needs parameters: {', '.join(missing)}")
    args = [float(params[name]) for name in names]
    if model is ModelName.GEOMETRIC:
        return make_geometric(*args, support=support, accuracy=accuracy)
    return CONSTRUCTORS[model](*args, accuracy=accuracy)


def _geometric_sum(ratio: float, exponent: float, shift: float) -> float:
    """sum_{l >= 1} ratio^l / (l + shift)^exponent by direct summation"""
    ell = np.arange(1, DISPLAY_TERMS + 1, dtype=float)
    return math.fsum(np.exp(ell * math.log(ratio) - exponent * np.log(ell + shift)))


def display_pmf(model: Union[ModelName, str], params: Dict[str, float], x: int) -> float:
    """
    The catalogue formula evaluated directly, independent of the UGAT machinery.
    Normalizers use Hurwitz zeta for unit weights and direct summation otherwise.
    """
    model = ModelName(model)
    x = int(x)
    if model is ModelName.LERCH:
        p_, a, c = params["p"], params["a"], params["c"]
        return p_**x / (x + a) ** c / _geometric_sum(p_, c, a) if x >= 1 else 0.0
    if model is ModelName.HURWITZ_LERCH_ZETA:
        theta, a, s_ = params["theta"], params["a"], params["s"]
        if x < 1:
            return 0.0
        if theta == 1:
            return (x + a) ** -(s_ + 1) / float(zeta(s_ + 1, a + 1))
        return theta**x / (x + a) ** (s_ + 1) / _geometric_sum(theta, s_ + 1, a)
    if model is ModelName.GOOD:
        theta, s_ = params["theta"], params["s"]
        return theta**x / x ** (s_ + 1) / _geometric_sum(theta, s_ + 1, 0.0) if x >= 1 else 0.0
    if model is ModelName.HURWITZ_ZETA:
        b, sigma = params["b"], params["sigma"]
        return (x + b) ** -sigma / float(zeta(sigma, b)) if x >= 0 else 0.0
    if model is ModelName.ZIPF_MANDELBROT:
        a, c = params["a"], params["c"]
        return (x + a) ** -c / float(zeta(c, a + 1)) if x >= 1 else 0.0
    if model is ModelName.DISCRETE_PARETO:
        c = params["c"]
        return float(x) ** -c / float(zeta(c, 1)) if x >= 1 else 0.0
    if model is ModelName.GEOMETRIC:
        p_ = params["p"]
        support = Support(params.get("support", Support.N.value))
        lowest = 1 if support is Support.N else 0
        return p_ ** (x - lowest) * (1 - p_) if x >= lowest else 0.0
    raise DomainError(f"no catalogue formula for {model.value}")
