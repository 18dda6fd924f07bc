"""Required-key check of CLI documents against data/output_schema.json"""

from pathlib import Path
from typing import List

from src.cli.reference import DATA_DIR
from src.errors import InvalidDocument
from src.utils import load_json

SCHEMA_FILE = DATA_DIR / "output_schema.json"


async def load_schema(file_path: Path = SCHEMA_FILE) -> dict:
    schema = await load_json(str(file_path))
    if schema is None:
        raise InvalidDocument(f"{file_path} is not valid JSON")
    return schema


def missing_keys(document: dict, schema: dict) -> List[str]:
    """Dotted paths of required keys absent from the document"""
    missing = [key for key in schema["document"] if key not in document]
    missing += [
        f"manifest.{key}"
        for key in schema["manifest"]
        if key not in document.get("manifest", {})
    ]
    required = schema["results"].get(document.get("command"), [])
    result = document.get("result", {})
    missing += [f"result.{key}" for key in required if key not in result]
    return missing


def check_document(document: dict, schema: dict) -> None:
    missing = missing_keys(document, schema)
    if missing:
        raise InvalidDocument(f"document lacks required keys: {', '.join(missing)}")
