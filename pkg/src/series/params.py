"""Parameter containers for the normalizing series"""

import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from src.errors import DivergentParameters, DomainError


@dataclass(frozen=True)
class AlphaVector:
    """Geometric weights alpha_0 .. alpha_{r-1}, each in (0, 1]"""

    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise DomainError("alpha vector must have at least one entry")
        for idx, value in enumerate(values):
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"alpha[{idx}] = {value} is not a positive real")
            if value == 0:
                raise DomainError(
                    f"alpha[{idx}] = 0 collapses coordinate {idx + 1}; "
                    "drop that coordinate instead"
                )
            if value > 1:
                raise DivergentParameters(
                    f"alpha[{idx}] = {value} > 1: the normalizing series diverges"
                )

    @classmethod
    def of(cls, alphas: Union["AlphaVector", Sequence[float], str]) -> "AlphaVector":
        if isinstance(alphas, AlphaVector):
            return alphas
        if isinstance(alphas, str):
            return cls(tuple(float(v) for v in alphas.split(",") if v.strip()))
        return cls(tuple(alphas))

    @property
    def r(self) -> int:
        return len(self.values)

    @property
    def max_value(self) -> float:
        return max(self.values)

    @property
    def unit_count(self) -> int:
        return sum(1 for v in self.values if v == 1.0)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, idx):
        return self.values[idx]


@dataclass(frozen=True)
class SeriesParams:
    """Shift beta > 0 and denominator exponent s (s = rk - n)"""

    beta: float
    s: float

    def __post_init__(self):
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "s", float(self.s))
        if not math.isfinite(self.beta) or self.beta <= 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        if not math.isfinite(self.s) or self.s < 0:
            raise DomainError(f"s must be a finite real >= 0, got {self.s}")


@dataclass(frozen=True)
class SeriesAccuracy:
    """Truncation policy: certified tail <= abs_tol and <= rel_tol * partial sum"""

    abs_tol: float = 1e-12
    max_terms: int = 1_000_000
    rel_tol: float = 1e-13

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be > 0, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if int(self.max_terms) < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        object.__setattr__(self, "max_terms", int(self.max_terms))


DEFAULT_ACCURACY = SeriesAccuracy()


def check_convergence(alphas: AlphaVector, sp: SeriesParams) -> None:
    """Any s >= 0 converges when every alpha < 1; a unit alpha needs s > r"""
    if alphas.max_value >= 1.0 and not sp.s > alphas.r:
        raise DivergentParameters(
            f"max alpha = 1 requires s > r = {alphas.r}, got s = {sp.s}"
        )
