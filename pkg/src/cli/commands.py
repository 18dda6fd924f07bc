"""
Command implementations behind src.cli.main.

Each command turns parsed flags into library calls and returns a CommandOutput:
the JSON document, a human-readable table and the exit code. No numerics live
here; every value comes straight from the library.
"""

import argparse
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from src.cli.manifest import RunManifest
from src.cli.reference import load_reference_rows
from src.dataset.count_table import load_count_table, write_count_table
from src.distribution.moments import marginal_mean, variance
from src.distribution.params import UGATParams, as_counts
from src.distribution.pmf import joint_pmf, log_joint_pmf, marginal_ccdf, marginal_cdf
from src.distribution.sampling import sample
from src.errors import DidNotConverge, DomainError, NonConvergent, UsageError
from src.fit.mle import DEFAULT_S_GRID, FitConfig, FitResult, fit_mle
from src.logger import get_logger
from src.reliability.aging import AgingKind
from src.reliability.report import box_grid, build_reliability_report, hazard_consistency
from src.reliability.survival import hazard_vector, joint_survival
from src.series.params import SeriesAccuracy
from src.special_cases.model_config import MODEL_PARAMETERS, ModelName, Support
from src.special_cases.models import ShiftedDistribution, display_pmf, make_model
from src.utils import file_checksum

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

Model = Union[UGATParams, ShiftedDistribution]


@dataclass
class CommandOutput:
    document: dict
    table: str
    exit_code: int = EXIT_OK


def parse_floats(text: str, flag: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from e


def accuracy_from(args: argparse.Namespace) -> SeriesAccuracy:
    return SeriesAccuracy(abs_tol=args.tol, max_terms=args.max_terms)


def model_parameters(args: argparse.Namespace) -> Dict[str, float]:
    model = ModelName(args.model)
    params = {name: getattr(args, name, None) for name in MODEL_PARAMETERS[model]}
    if model is ModelName.UGAT:
        return params
    missing = [name for name, value in params.items() if value is None]
    if missing:
        flags = " ".join(f"--{name}" for name in missing)
        raise UsageError(f"--model {model.value} requires {flags}")
    return params


def build_model(args: argparse.Namespace) -> Model:
    """UGATParams for --model ugat, a ShiftedDistribution for the named sub-models"""
    model = ModelName(args.model)
    accuracy = accuracy_from(args)
    if model is ModelName.UGAT:
        if args.alpha is None:
            raise UsageError("--model ugat requires --alpha")
        alphas = parse_floats(args.alpha, "--alpha")
        beta = 1.0 if args.beta is None else args.beta
        s = 0.0 if args.s is None else args.s
        return UGATParams.build(alphas, beta, s, accuracy)
    return make_model(model, model_parameters(args), accuracy, support=args.support)


def base_params(model: Model) -> UGATParams:
    return model.base if isinstance(model, ShiftedDistribution) else model


def _moment_or_none(fn, *args) -> Optional[float]:
    """Infinite or uncertifiable moments are reported as null"""
    try:
        return fn(*args)
    except (DomainError, NonConvergent) as e:
        logger.info("Moment not finite: %s", e)
        return None


def _frame_text(frame: pd.DataFrame) -> str:
    return frame.to_string(index=False, float_format=lambda v: f"{v:.10g}")


def _eval_ugat(p: UGATParams, points: List[str]) -> tuple:
    rows = []
    for text in points or [",".join(["0"] * p.r)]:
        x = as_counts(p, text)
        rows.append(
            {
                "x": list(x.coords),
                "pmf": joint_pmf(p, x),
                "log_pmf": log_joint_pmf(p, x),
                "survival": joint_survival(p, x),
                "hazard": hazard_vector(p, x).tolist(),
                "marginal_cdf": [marginal_cdf(p, i, v) for i, v in enumerate(x.coords, 1)],
                "marginal_ccdf": [marginal_ccdf(p, i, v) for i, v in enumerate(x.coords, 1)],
            }
        )
    moments = {
        "mean": [_moment_or_none(marginal_mean, p, i) for i in range(1, p.r + 1)],
        "variance": [_moment_or_none(variance, p, i) for i in range(1, p.r + 1)],
    }
    return rows, moments, p.to_dict()


def _eval_shifted(
    dist: ShiftedDistribution, args: argparse.Namespace, points: List[str]
) -> tuple:
    params = model_parameters(args)
    if dist.name == ModelName.GEOMETRIC.value:
        params = {**params, "support": Support(args.support).value}
    rows = []
    for text in points or [str(dist.support_offset)]:
        try:
            x = int(text)
        except ValueError as e:
            raise UsageError(f"--x expects an integer for --model {dist.name}, got {text!r}") from e
        rows.append(
            {
                "x": [x],
                "pmf": dist.pmf(x),
                "catalogue_pmf": display_pmf(dist.name, params, x),
                "cdf": dist.cdf(x),
                "sf": dist.sf(x),
                "hazard": [dist.hazard(x)],
            }
        )
    moments = {
        "mean": [_moment_or_none(dist.mean)],
        "variance": [_moment_or_none(dist.variance)],
    }
    return rows, moments, dist.to_dict()


async def cmd_eval(args: argparse.Namespace) -> CommandOutput:
    """pmf, cdf, survival, hazard and moments at the requested points"""
    model = build_model(args)
    if isinstance(model, ShiftedDistribution):
        rows, moments, described = _eval_shifted(model, args, args.x)
    else:
        rows, moments, described = _eval_ugat(model, args.x)
    document = {
        "command": "eval",
        "manifest": RunManifest.for_run(args).to_dict(),
        "result": {
            "model": {"name": args.model, **described},
            "log_normalizer": base_params(model).log_normalizer,
            "points": rows,
            "moments": moments,
        },
    }
    table = pd.DataFrame(
        [{**row, "x": ",".join(str(v) for v in row["x"])} for row in rows]
    )
    return CommandOutput(document, _frame_text(table))


def fit_config_from(args: argparse.Namespace) -> FitConfig:
    grid = tuple(parse_floats(args.s_grid, "--s-grid")) if args.s_grid else DEFAULT_S_GRID
    return FitConfig(
        estimate_s=args.estimate_s,
        s_fixed=args.s_fixed,
        s_grid=grid,
        include_boundary=args.include_s0,
        tol=args.opt_tol,
        max_iter=args.max_iter,
        multistart=args.multistart,
        seed=args.seed,
        n_jobs=args.n_jobs,
        strict=True,
        progress=args.verbose,
        accuracy=accuracy_from(args),
    )


def run_fit(args: argparse.Namespace) -> tuple:
    """(FitResult, exit code); a non-converged fit still yields its result"""
    d = load_count_table(args.csv)
    cfg = fit_config_from(args)
    try:
        return fit_mle(d, cfg), EXIT_OK
    except DidNotConverge as e:
        if e.result is None:
            raise
        logger.warning("Reporting the non-converged fit: %s", e)
        return e.result, EXIT_NUMERIC


def _estimates_frame(result: FitResult) -> pd.DataFrame:
    rows = []
    for name in result.free_names:
        lo, hi = (result.intervals or {}).get(name, (math.nan, math.nan))
        rows.append(
            {
                "parameter": name,
                "estimate": result.estimates[name],
                "std_error": (result.std_errors or {}).get(name, math.nan),
                "ci95_low": lo,
                "ci95_high": hi,
            }
        )
    return pd.DataFrame(rows)


def _fit_summary(result: FitResult) -> str:
    lines = [
        f"-L = {result.neg_loglik:.6f}  AIC = {result.aic:.6f}  BIC = {result.bic:.6f}",
        f"p = {result.n_params}  N = {result.n_obs}  s = {result.params.s:g}  "
        f"converged = {result.converged}",
    ]
    lines += [f"warning: {w}" for w in result.warnings]
    return "\n".join(lines)


async def cmd_fit(args: argparse.Namespace) -> CommandOutput:
    """Maximum-likelihood fit of a count table"""
    result, exit_code = run_fit(args)
    document = {
        "command": "fit",
        "manifest": RunManifest.for_run(args, args.csv).to_dict(),
        "result": result.to_dict(),
    }
    table = _fit_summary(result) + "\n\n" + _frame_text(_estimates_frame(result))
    return CommandOutput(document, table, exit_code)


async def cmd_compare(args: argparse.Namespace) -> CommandOutput:
    """Live UGAT fit alongside the transcribed comparison rows"""
    reference = await load_reference_rows()
    result, exit_code = run_fit(args)
    rows = [
        {
            "model": "UGAT",
            "n_params": result.n_params,
            "neg_loglik": result.neg_loglik,
            "aic": result.aic,
            "bic": result.bic,
            "source": "computed",
        }
    ]
    rows += [
        {**{k: row[k] for k in ("model", "n_params", "neg_loglik", "aic", "bic")},
         "source": reference["provenance"]}
        for row in reference["rows"]
    ]
    document = {
        "command": "compare",
        "manifest": RunManifest.for_run(args, args.csv).to_dict(),
        "result": {
            "rows": rows,
            "reference_version": reference["version"],
            "reference_note": reference.get("note", ""),
            "fit": result.to_dict(),
        },
    }
    return CommandOutput(document, _frame_text(pd.DataFrame(rows)), exit_code)


async def cmd_sample(args: argparse.Namespace) -> CommandOutput:
    """Draw a seeded sample and write it as a count table"""
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    model = build_model(args)
    if isinstance(model, ShiftedDistribution):
        draws = model.sample(args.n, args.seed)[:, None]
    else:
        draws = sample(model, args.n, args.seed)
    write_count_table(args.csv, draws)
    document = {
        "command": "sample",
        "manifest": RunManifest.for_run(args).to_dict(),
        "result": {
            "path": args.csv,
            "n": int(draws.shape[0]),
            "r": int(draws.shape[1]),
            "sha256": file_checksum(args.csv),
            "column_sums": np.sum(draws, axis=0).tolist(),
        },
    }
    table = f"wrote {draws.shape[0]} rows x {draws.shape[1]} columns to {args.csv}"
    return CommandOutput(document, table)


def _parse_kinds(text: str) -> List[AgingKind]:
    try:
        return [AgingKind.parse(name.strip()) for name in text.split(",") if name.strip()]
    except ValueError as e:
        raise UsageError(str(e)) from e


async def cmd_reliability(args: argparse.Namespace) -> CommandOutput:
    """
    Survival, hazard and MMRL on the box 0..x_max and aging verdicts over shifts
    in 0..t_max. Sub-models are reported in their zero-based coordinates.
    """
    model = build_model(args)
    p = base_params(model)
    kinds = _parse_kinds(args.kinds)
    report = build_reliability_report(
        p,
        box_grid(p.r, args.x_max),
        box_grid(p.r, args.t_max),
        kinds=kinds,
        n_jobs=args.n_jobs,
        grid_cap=args.grid_cap,
        with_mmrl=not args.no_mmrl,
    )
    offset = model.support_offset if isinstance(model, ShiftedDistribution) else 0
    document = {
        "command": "reliability",
        "manifest": RunManifest.for_run(args).to_dict(),
        "result": {
            **report.to_dict(),
            "model": args.model,
            "support_offset": offset,
            "hazard_consistency": hazard_consistency(report),
        },
    }
    verdicts = "\n".join(
        f"{v.kind.name}: {v.class_name} ({v.verdict.name}, max diff {v.max_diff:.3g}, "
        f"min diff {v.min_diff:.3g})"
        for v in report.aging_verdicts.values()
    )
    table = _frame_text(pd.DataFrame(report.rows())) + "\n\n" + verdicts
    return CommandOutput(document, table)
