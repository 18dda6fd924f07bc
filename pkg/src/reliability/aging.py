"""
Numerical aging-class predicates over user grids.

Each check computes a signed difference d = lhs - rhs at every grid pair; d <= 0
everywhere means the "better" class holds (MNBU, MNBUE, MIFR), d >= 0 everywhere
means its mirror (MNWU, MNWUE, MDFR).

    MNBU:  d = R(x + t) - R(x) R(t)
    MNBUE: d = sum_t R(x + t) / R(x) - sum_t R(t)
    MIFR:  d = h_i(x) - h_i(x + t) for every coordinate i

MNBUE is undefined when sum_t R(t) diverges (unit weights with s <= 2r).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.distribution.params import CountVector, UGATParams, as_counts
from src.errors import DivergentParameters
from src.logger import get_logger
from src.reliability.survival import (
    hazard_vector,
    joint_survival,
    total_residual_survival,
)

logger = get_logger(__name__)

EQUALITY_TOL = 1e-10


class AgingKind(Enum):
    """Aging classes with their (holds <=, holds >=) names"""

    MNBU = ("MNBU", "MNWU")
    MNBUE = ("MNBUE", "MNWUE")
    MIFR = ("MIFR", "MDFR")

    @classmethod
    def parse(cls, name: str) -> "AgingKind":
        for kind in cls:
            if name.upper() in kind.value:
                return kind
        raise ValueError(f"unknown aging class {name!r}")


class Verdict(Enum):
    HOLDS_LE = "holds-as-<="
    HOLDS_GE = "holds-as->="
    EQUALITY = "equality"
    MIXED = "mixed"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class AgingVerdict:
    kind: AgingKind
    verdict: Verdict
    max_diff: float
    min_diff: float
    worst_point: Optional[tuple]
    n_checks: int

    @property
    def class_name(self) -> str:
        better, worse = self.kind.value
        if self.verdict is Verdict.HOLDS_LE:
            return better
        if self.verdict is Verdict.HOLDS_GE:
            return worse
        if self.verdict is Verdict.EQUALITY:
            return f"{better}+{worse}"
        if self.verdict is Verdict.UNDEFINED:
            return "undefined"
        return "none"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.name,
            "verdict": self.verdict.value,
            "class": self.class_name,
            "max_diff": self.max_diff if math.isfinite(self.max_diff) else None,
            "min_diff": self.min_diff if math.isfinite(self.min_diff) else None,
            "worst_point": list(self.worst_point) if self.worst_point else None,
            "n_checks": self.n_checks,
        }


def _add(a: CountVector, b: CountVector) -> tuple:
    return tuple(u + v for u, v in zip(a.coords, b.coords))


def _mnbu_row(p: UGATParams, x: CountVector, t_grid: Sequence[CountVector]) -> List[tuple]:
    r_x = joint_survival(p, x)
    return [
        (joint_survival(p, _add(x, t)) - r_x * joint_survival(p, t), (x.coords, t.coords))
        for t in t_grid
    ]


def _mnbue_row(p: UGATParams, x: CountVector, baseline: float) -> List[tuple]:
    return [(total_residual_survival(p, x) - baseline, (x.coords,))]


def _mifr_row(p: UGATParams, x: CountVector, t_grid: Sequence[CountVector]) -> List[tuple]:
    h_x = hazard_vector(p, x)
    rows = []
    for t in t_grid:
        h_xt = hazard_vector(p, _add(x, t))
        for i, diff in enumerate(h_x - h_xt, start=1):
            rows.append((float(diff), (x.coords, t.coords, i)))
    return rows


def classify(diffs: np.ndarray, scale: float = 1.0, tol: float = EQUALITY_TOL) -> Verdict:
    bound = tol * max(1.0, scale)
    if np.all(np.abs(diffs) <= bound):
        return Verdict.EQUALITY
    if np.all(diffs <= bound):
        return Verdict.HOLDS_LE
    if np.all(diffs >= -bound):
        return Verdict.HOLDS_GE
    return Verdict.MIXED


def aging_class_check(
    p: UGATParams,
    kind: AgingKind,
    x_grid: Sequence,
    t_grid: Sequence,
    n_jobs: int = 1,
    tol: float = EQUALITY_TOL,
) -> AgingVerdict:
    """
    Evaluate one aging predicate at every grid pair.

    Grid rows run in parallel threads; results come back in grid order, so the
    verdict and its extremes do not depend on n_jobs.
    """
    xs = [as_counts(p, x) for x in x_grid]
    ts = [as_counts(p, t) for t in t_grid]
    scale = 1.0
    if kind is AgingKind.MNBU:
        jobs = (delayed(_mnbu_row)(p, x, ts) for x in xs)
    elif kind is AgingKind.MNBUE:
        try:
            baseline = total_residual_survival(p, [0] * p.r)
        except DivergentParameters as e:
            logger.warning("MNBUE is undefined: %s", e)
            return AgingVerdict(kind, Verdict.UNDEFINED, math.nan, math.nan, None, 0)
        scale = baseline
        jobs = (delayed(_mnbue_row)(p, x, baseline) for x in xs)
    else:
        jobs = (delayed(_mifr_row)(p, x, ts) for x in xs)
    rows = Parallel(n_jobs=n_jobs, prefer="threads")(jobs)
    checks = [item for row in rows for item in row]
    if not checks:
        return AgingVerdict(kind, Verdict.EQUALITY, 0.0, 0.0, None, 0)
    diffs = np.array([d for d, _ in checks])
    worst = int(np.argmax(np.abs(diffs)))
    verdict = classify(diffs, scale, tol)
    logger.debug("%s over %d checks: %s", kind.name, diffs.size, verdict.value)
    return AgingVerdict(
        kind,
        verdict,
        float(diffs.max()),
        float(diffs.min()),
        checks[worst][1],
        int(diffs.size),
    )
