"""Parameter vector and count vectors of the UGAT distribution"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from src.errors import DimensionMismatch, DomainError, IndexOutOfRange
from src.series.kernel import evaluate_series
from src.series.params import (
    DEFAULT_ACCURACY,
    AlphaVector,
    SeriesAccuracy,
    SeriesParams,
    check_convergence,
)


@dataclass(frozen=True)
class UGATParams:
    """
    UGAT parameters (alpha, beta, s) with the log normalizer cached at construction.

    P(X = x) = prod alpha_i^{x_i} / ((x_1 + ... + x_r + beta)^s * S)
    """

    alphas: AlphaVector
    beta: float
    s: float
    accuracy: SeriesAccuracy = DEFAULT_ACCURACY
    log_normalizer: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alphas = AlphaVector.of(self.alphas)
        sp = SeriesParams(self.beta, self.s)
        check_convergence(alphas, sp)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "beta", sp.beta)
        object.__setattr__(self, "s", sp.s)
        log_s = evaluate_series(alphas.values, sp.beta, sp.s, self.accuracy).log_value
        if not np.isfinite(log_s):
            raise DomainError("normalizing series is not finite and positive")
        object.__setattr__(self, "log_normalizer", log_s)

    @classmethod
    def build(
        cls,
        alphas: Union[AlphaVector, Sequence[float], str],
        beta: float,
        s: float,
        accuracy: SeriesAccuracy = DEFAULT_ACCURACY,
    ) -> "UGATParams":
        return cls(AlphaVector.of(alphas), beta, s, accuracy)

    @property
    def r(self) -> int:
        return self.alphas.r

    @property
    def series_params(self) -> SeriesParams:
        return SeriesParams(self.beta, self.s)

    @property
    def normalizer(self) -> float:
        return float(np.exp(self.log_normalizer))

    def log_alpha(self) -> np.ndarray:
        return np.log(self.alphas.as_array())

    def alpha(self, i: int) -> float:
        """Weight of coordinate i (1-based)"""
        return self.alphas[check_index(self, i) - 1]

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "alpha": list(self.alphas.values),
            "beta": self.beta,
            "s": self.s,
        }


@dataclass(frozen=True)
class CountVector:
    """Nonnegative integer counts (x_1, ..., x_r)"""

    coords: tuple

    def __post_init__(self):
        coords = tuple(int(v) for v in self.coords)
        if any(float(v) != int(v) for v in self.coords):
            raise DomainError(f"counts must be integers, got {self.coords}")
        if any(v < 0 for v in coords):
            raise DomainError(f"counts must be >= 0, got {coords}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, x: Union["CountVector", Sequence[int], str]) -> "CountVector":
        if isinstance(x, CountVector):
            return x
        if isinstance(x, str):
            try:
                return cls(tuple(int(v) for v in x.split(",") if v.strip()))
            except ValueError as e:
                raise DomainError(f"counts must be comma-separated integers, got {x!r}") from e
        return cls(tuple(np.atleast_1d(x).tolist()))

    @property
    def total(self) -> int:
        return sum(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.coords)


def as_counts(p: UGATParams, x) -> CountVector:
    """Validate x against the dimension of p"""
    counts = CountVector.of(x)
    if len(counts) != p.r:
        raise DimensionMismatch(f"expected {p.r} counts, got {len(counts)}")
    return counts


def check_index(p: UGATParams, i: int) -> int:
    if not 1 <= int(i) <= p.r:
        raise IndexOutOfRange(f"coordinate index {i} outside 1..{p.r}")
    return int(i)


@lru_cache(maxsize=8192)
def log_shifted_series(p: UGATParams, shift: int) -> float:
    """log M(beta + shift) for the weights of p; shift 0 returns the cached normalizer"""
    if shift == 0:
        return p.log_normalizer
    if shift < 0:
        raise DomainError(f"shift must be >= 0, got {shift}")
    return evaluate_series(p.alphas.values, p.beta + shift, p.s, p.accuracy).log_value
