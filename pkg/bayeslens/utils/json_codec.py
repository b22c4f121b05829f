"""Deterministic JSON emission.

Floats use Python's shortest round-trip repr (at most 17 significant digits),
so every double reloads bit for bit. Non-finite floats become the strings
"Infinity", "-Infinity" and "NaN".
"""

import json
import math
from typing import Any

import numpy as np
from pydantic import BaseModel

_NON_FINITE = {math.inf: "Infinity", -math.inf: "-Infinity"}


def to_plain(value: Any) -> Any:
    """Convert models, numpy values and non-finite floats into JSON-ready values."""
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump())
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.generic):
        return to_plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return "NaN" if math.isnan(value) else _NON_FINITE[value]
    if isinstance(value, dict):
        return {str(key): to_plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(item) for item in value]
    return value


def dumps(value: Any, pretty: bool = False) -> str:
    """Encode value (dicts, lists, numbers, numpy arrays, pydantic models)."""
    if pretty:
        return json.dumps(to_plain(value), indent=2, allow_nan=False)
    return json.dumps(to_plain(value), separators=(",", ":"), allow_nan=False)
