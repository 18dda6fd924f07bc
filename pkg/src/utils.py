import hashlib
import json
import math
from pathlib import Path
from typing import Any

import aiofiles
import numpy as np


def to_jsonable(data: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and non-finite floats to plain JSON types"""
    if isinstance(data, dict):
        return {str(key): to_jsonable(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_jsonable(item) for item in data]
    if isinstance(data, np.ndarray):
        return to_jsonable(data.tolist())
    if isinstance(data, np.integer):
        return int(data)
    if isinstance(data, (float, np.floating)):
        value = float(data)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return data


def dumps_canonical(data: Any) -> str:
    """Serialize with sorted keys so identical inputs give identical bytes"""
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


def file_checksum(file_path: str) -> str:
    """sha256 of a file's bytes"""
    digest = hashlib.sha256()
    with open(file_path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


async def load_json(file_path: str):
    async with aiofiles.open(file_path, "r", encoding="utf-8") as f:
        try:
            data = await f.read()
            return json.loads(data)
        except json.JSONDecodeError:
            return None


async def save_json(file_path: str, data):
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(file_path, "w", encoding="utf-8") as f:
        await f.write(dumps_canonical(data))
