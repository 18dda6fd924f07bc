"""
Count-table ingestion.

A count table is a comma-separated file whose header is x1,...,xr followed by N
rows of nonnegative integers. Validation errors carry the 1-based file line.

Usage:
    from src.dataset.count_table import load_count_table

    data = load_count_table("data/table1.csv")
    data.n, data.r, data.column_sums
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from src.errors import DimensionMismatch, MalformedTable
from src.logger import get_logger

logger = get_logger(__name__)

INTEGER_PATTERN = re.compile(r"^\s*\d+\s*$")
PARSER_LINE_PATTERN = re.compile(r"line (\d+)")


@dataclass(frozen=True, eq=False)
class Dataset:
    """N observations of r-dimensional nonnegative integer counts"""

    counts: np.ndarray
    source: str = "memory"
    columns: tuple = field(default=())

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim == 1:
            counts = counts[:, None]
        if counts.ndim != 2 or counts.shape[0] < 1 or counts.shape[1] < 1:
            raise MalformedTable(f"expected an N x r table, got shape {counts.shape}")
        if not np.all(np.equal(np.mod(counts, 1), 0)) or np.any(counts < 0):
            raise MalformedTable("counts must be nonnegative integers")
        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        if not self.columns:
            columns = tuple(f"x{i}" for i in range(1, counts.shape[1] + 1))
            object.__setattr__(self, "columns", columns)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], source: str = "memory") -> "Dataset":
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise DimensionMismatch(f"rows have different lengths: {sorted(widths)}")
        return cls(np.asarray(rows), source)

    @property
    def n(self) -> int:
        return int(self.counts.shape[0])

    @property
    def r(self) -> int:
        return int(self.counts.shape[1])

    @property
    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def column_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def column_max(self) -> np.ndarray:
        return self.counts.max(axis=0)

    @property
    def means(self) -> np.ndarray:
        return self.counts.mean(axis=0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.counts, columns=list(self.columns))


def _check_header(columns: Sequence[str]) -> None:
    expected = [f"x{i}" for i in range(1, len(columns) + 1)]
    actual = [str(c).strip() for c in columns]
    if actual != expected:
        raise MalformedTable(
            f"header must be {','.join(expected)}, got {','.join(actual)}", line=1
        )


def _is_blank(value) -> bool:
    return not isinstance(value, str) or not value.strip()


def load_count_table(file_path: str) -> Dataset:
    """Read and validate a count table"""
    path = Path(file_path)
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, skip_blank_lines=False
        )
    except pd.errors.EmptyDataError as e:
        raise MalformedTable(f"{file_path} is empty") from e
    except pd.errors.ParserError as e:
        match = PARSER_LINE_PATTERN.search(str(e))
        raise MalformedTable(
            f"row/column mismatch: {e}", line=int(match.group(1)) if match else None
        ) from e
    _check_header(frame.columns)
    if frame.empty:
        raise MalformedTable(f"{file_path} has a header but no data rows")
    # blank lines stay in the frame, so data index k sits on file line k + 2
    kept = []
    for k, row in enumerate(frame.itertuples(index=False)):
        if all(_is_blank(value) for value in row):
            continue
        for column, value in zip(frame.columns, row):
            if not isinstance(value, str) or not INTEGER_PATTERN.match(value):
                raise MalformedTable(
                    f"column {column}: {value!r} is not a nonnegative integer",
                    line=k + 2,
                )
        kept.append(k)
    if not kept:
        raise MalformedTable(f"{file_path} has a header but no data rows")
    counts = frame.iloc[kept].apply(pd.to_numeric).to_numpy(dtype=np.int64)
    logger.info("Loaded %d rows x %d columns from %s", counts.shape[0], counts.shape[1], file_path)
    return Dataset(counts, str(file_path), tuple(frame.columns))


def write_count_table(file_path: str, counts: np.ndarray) -> None:
    """Write counts with an x1..xr header"""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.ndim == 1:
        counts = counts[:, None]
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
    columns = [f"x{i}" for i in range(1, counts.shape[1] + 1)]
    pd.DataFrame(counts, columns=columns).to_csv(file_path, index=False, lineterminator="\n")
    logger.info("Wrote %d rows to %s", counts.shape[0], file_path)
