"""Reliability report: survival, hazard and MMRL over a grid plus aging verdicts"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

from joblib import Parallel, delayed

from src.distribution.params import UGATParams, as_counts
from src.errors import DivergentParameters, GridTooLarge
from src.logger import get_logger
from src.reliability.aging import AgingKind, AgingVerdict, aging_class_check
from src.reliability.survival import hazard_vector, joint_survival, mmrl_component

logger = get_logger(__name__)

DEFAULT_GRID_CAP = 10_000


@dataclass
class ReliabilityReport:
    params: UGATParams
    grid: List[tuple]
    survival: List[float]
    hazard: List[List[float]]
    mmrl: List[List[float]]
    aging_verdicts: Dict[str, AgingVerdict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "grid": [list(x) for x in self.grid],
            "survival": self.survival,
            "hazard": self.hazard,
            "mmrl": [[m if math.isfinite(m) else None for m in row] for row in self.mmrl],
            "aging": {name: v.to_dict() for name, v in self.aging_verdicts.items()},
        }

    def rows(self) -> List[dict]:
        """One flat record per grid point, for tabular rendering"""
        out = []
        for x, surv, haz, mrl in zip(self.grid, self.survival, self.hazard, self.mmrl):
            record = {"x": ",".join(str(v) for v in x), "R(x)": surv}
            for i, (h, m) in enumerate(zip(haz, mrl), start=1):
                record[f"h{i}"] = h
                record[f"m{i}"] = m
            out.append(record)
        return out


def box_grid(r: int, upper: int) -> List[tuple]:
    """All count vectors with every coordinate in 0..upper, in lexicographic order"""
    return list(itertools.product(range(upper + 1), repeat=r))


def _mmrl_or_inf(p: UGATParams, i: int, x: tuple) -> float:
    try:
        return mmrl_component(p, i, x)
    except DivergentParameters:
        return math.inf


def _point(p: UGATParams, x: tuple, with_mmrl: bool) -> tuple:
    if with_mmrl:
        mrl = [_mmrl_or_inf(p, i, x) for i in range(1, p.r + 1)]
    else:
        mrl = [math.nan] * p.r
    return joint_survival(p, x), hazard_vector(p, x).tolist(), mrl


def build_reliability_report(
    p: UGATParams,
    x_grid: Sequence,
    t_grid: Sequence,
    kinds: Sequence[AgingKind] = tuple(AgingKind),
    n_jobs: int = 1,
    grid_cap: int = DEFAULT_GRID_CAP,
    with_mmrl: bool = True,
) -> ReliabilityReport:
    """
    Evaluate R, h and m at every point of x_grid and the requested aging predicates
    over x_grid x t_grid. A divergent residual life is inf (null in to_dict).

    Raises:
        GridTooLarge: when the number of grid pairs exceeds grid_cap
    """
    xs = [as_counts(p, x).coords for x in x_grid]
    ts = [as_counts(p, t).coords for t in t_grid]
    pairs = len(xs) * max(1, len(ts))
    if pairs > grid_cap:
        raise GridTooLarge(f"{pairs} grid pairs exceed the cap of {grid_cap}")
    logger.info("Reliability report over %d points, %d shifts", len(xs), len(ts))
    values = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_point)(p, x, with_mmrl) for x in xs
    )
    verdicts = {
        kind.name: aging_class_check(p, kind, xs, ts, n_jobs=n_jobs) for kind in kinds
    }
    return ReliabilityReport(
        params=p,
        grid=xs,
        survival=[v[0] for v in values],
        hazard=[v[1] for v in values],
        mmrl=[v[2] for v in values],
        aging_verdicts=verdicts,
    )


def hazard_consistency(report: ReliabilityReport) -> float:
    """
    Largest |h_i(x) - (1 - R(x + e_i) / R(x))| over grid points whose neighbour is
    also on the grid.
    """
    index = {x: k for k, x in enumerate(report.grid)}
    worst = 0.0
    for x, surv, haz in zip(report.grid, report.survival, report.hazard):
        for i in range(len(x)):
            bumped = tuple(v + (1 if j == i else 0) for j, v in enumerate(x))
            if bumped in index:
                expected = 1.0 - report.survival[index[bumped]] / surv
                worst = max(worst, abs(haz[i] - expected))
    return worst
