"""On-disk float formatting shared by every CSV/JSON writer (9 significant digits)."""

from __future__ import annotations

import json
import math
from pathlib import Path

FLOAT_FMT = "{:.9g}"


def fmt(v: float) -> str:
    return FLOAT_FMT.format(v)


def round_floats(obj):
    """Recursively round floats to the precision written to disk."""
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(round_floats(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path
