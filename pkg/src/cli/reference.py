"""
Transcribed comparison rows for the bundled bacterial-counts data.

The rows are reference metadata only; none of them is recomputed here.
"""

from pathlib import Path
from typing import List

from src.errors import MalformedTable
from src.utils import load_json

DATA_DIR = Path(__file__).resolve().parents[2] / "data"
REFERENCE_FILE = DATA_DIR / "comparison_reference.json"
REFERENCE_COLUMNS = ("model", "n_params", "neg_loglik", "aic", "bic")


async def load_reference_rows(file_path: Path = REFERENCE_FILE) -> dict:
    """Rows plus provenance; raises MalformedTable when a row lacks a column"""
    data = await load_json(str(file_path))
    if data is None or "rows" not in data:
        raise MalformedTable(f"{file_path} is not a reference table")
    rows: List[dict] = data["rows"]
    for k, row in enumerate(rows):
        missing = [c for c in REFERENCE_COLUMNS if c not in row]
        if missing:
            raise MalformedTable(f"{file_path}: row {k} lacks {', '.join(missing)}")
    return data
