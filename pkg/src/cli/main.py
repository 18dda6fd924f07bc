"""
Command-line interface for UGAT evaluation, fitting, sampling and reliability.

Usage:
    python -m src.cli.main eval --model geom --p 0.5 --x 3
    python -m src.cli.main eval --model ugat --alpha 0.3,0.4 --beta 1 --s 2 --x 0,0 --json
    python -m src.cli.main fit data/table1.csv --n-jobs 4 --out output/fit.json
    python -m src.cli.main compare data/table1.csv --json
    python -m src.cli.main sample --model ugat --alpha 0.3,0.4 --s 2 --n 500 --csv output/sample.csv
    python -m src.cli.main reliability --model ugat --alpha 0.3,0.4 --s 2 --x-max 4 --t-max 2

Exit codes: 0 success, 1 usage or input error, 2 numeric or convergence failure, 3 I/O.
"""

import argparse
import asyncio
import logging
import sys
from typing import Optional, Sequence

from src.cli.commands import (
    EXIT_IO,
    EXIT_NUMERIC,
    EXIT_USAGE,
    cmd_compare,
    cmd_eval,
    cmd_fit,
    cmd_reliability,
    cmd_sample,
)
from src.cli.schema import check_document, load_schema
from src.errors import (
    DegenerateData,
    DimensionMismatch,
    DomainError,
    GridTooLarge,
    IndexOutOfRange,
    MalformedTable,
    UGATError,
    UsageError,
)
from src.logger import enable_file_logging, get_logger, set_console_level
from src.reliability.report import DEFAULT_GRID_CAP
from src.series.params import DEFAULT_ACCURACY
from src.special_cases.model_config import ModelName, Support
from src.utils import dumps_canonical, save_json

logger = get_logger(__name__)

DEFAULT_SEED = 2024
INPUT_ERRORS = (
    UsageError,
    MalformedTable,
    DomainError,
    GridTooLarge,
    DimensionMismatch,
    IndexOutOfRange,
    DegenerateData,
)


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common_flags() -> argparse.ArgumentParser:
    common = CommandParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the JSON document on stdout")
    common.add_argument("--out", help="Also write the JSON document to this path")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    common.add_argument(
        "--tol", type=float, default=DEFAULT_ACCURACY.abs_tol, help="Absolute series tolerance"
    )
    common.add_argument(
        "--max-terms",
        type=int,
        default=DEFAULT_ACCURACY.max_terms,
        help="Maximum number of series terms",
    )
    common.add_argument("--n-jobs", type=int, default=1, help="Worker threads")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
    return common


def _model_flags() -> argparse.ArgumentParser:
    flags = CommandParser(add_help=False)
    flags.add_argument(
        "--model",
        choices=[m.value for m in ModelName],
        default=ModelName.UGAT.value,
        help="Model family",
    )
    flags.add_argument("--alpha", help="Comma-separated weights alpha_1..alpha_r (ugat)")
    flags.add_argument("--beta", type=float, help="Shift beta > 0 (ugat, default 1)")
    flags.add_argument("--s", type=float, help="Exponent s (ugat, default 0; also hlz)")
    for name in ("p", "a", "c", "theta", "b", "sigma"):
        flags.add_argument(f"--{name}", type=float, help=f"Sub-model parameter {name}")
    flags.add_argument(
        "--support",
        choices=[s.value for s in Support],
        default=Support.N0.value,
        help="Support of the geometric model",
    )
    return flags


def _fit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("csv", help="Count table with header x1,...,xr")
    parser.add_argument("--estimate-s", action="store_true", help="Refine s continuously")
    parser.add_argument("--s-fixed", type=float, help="Hold s at this value")
    parser.add_argument("--s-grid", help="Comma-separated grid of s values (each >= 0)")
    parser.add_argument(
        "--include-s0", action="store_true", help="Add the s = 0 boundary to the grid"
    )
    parser.add_argument("--opt-tol", type=float, default=1e-6, help="Gradient-norm tolerance")
    parser.add_argument("--max-iter", type=int, default=500, help="Iterations per local fit")
    parser.add_argument("--multistart", type=int, default=8, help="Starts per grid value")


def build_parser() -> CommandParser:
    common, model = _common_flags(), _model_flags()
    parser = CommandParser(
        prog="ugat", description="UGAT multivariate discrete distribution toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[common, model], help="Evaluate a model")
    p_eval.add_argument(
        "--x", action="append", help="Point, e.g. 3 or 0,1,2 (repeatable)"
    )
    p_eval.set_defaults(handler=cmd_eval)

    p_fit = sub.add_parser("fit", parents=[common], help="Fit UGAT to a count table")
    _fit_flags(p_fit)
    p_fit.set_defaults(handler=cmd_fit)

    p_compare = sub.add_parser(
        "compare", parents=[common], help="Fit and compare with reference rows"
    )
    _fit_flags(p_compare)
    p_compare.set_defaults(handler=cmd_compare)

    p_sample = sub.add_parser("sample", parents=[common, model], help="Draw a sample")
    p_sample.add_argument("--n", type=int, required=True, help="Number of draws")
    p_sample.add_argument("--csv", required=True, help="Output count table")
    p_sample.set_defaults(handler=cmd_sample)

    p_rel = sub.add_parser(
        "reliability", parents=[common, model], help="Reliability report"
    )
    p_rel.add_argument("--x-max", type=int, default=3, help="Grid is the box 0..x_max")
    p_rel.add_argument("--t-max", type=int, default=2, help="Shifts are the box 0..t_max")
    p_rel.add_argument("--kinds", default="MNBU,MNBUE,MIFR", help="Aging classes to check")
    p_rel.add_argument(
        "--grid-cap", type=int, default=DEFAULT_GRID_CAP, help="Maximum grid pairs"
    )
    p_rel.add_argument("--no-mmrl", action="store_true", help="Skip mean residual life")
    p_rel.set_defaults(handler=cmd_reliability)
    return parser


async def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)
    if args.verbose:
        set_console_level(logging.DEBUG)

    try:
        output = await args.handler(args)
        check_document(output.document, await load_schema())
        if args.json:
            sys.stdout.write(dumps_canonical(output.document))
        else:
            print(output.table)
        if args.out:
            await save_json(args.out, output.document)
            logger.info("Wrote %s document to %s", args.command, args.out)
        return output.exit_code
    except INPUT_ERRORS as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (UGATError, ArithmeticError) as e:
        logger.error("%s", e)
        return EXIT_NUMERIC
    except OSError as e:
        logger.error("%s", e)
        return EXIT_IO


if __name__ == "__main__":
    enable_file_logging()
    sys.exit(asyncio.run(main()))
