"""Sweep configuration: a JSON document validated against ``CONFIG_SCHEMA``."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

_num_list = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 1},
        {"type": "string", "pattern": r"^[0-9.eE+-]+(:[0-9.eE+-]+){0,2}(,[0-9.eE+-]+(:[0-9.eE+-]+){0,2})*$"},
    ]
}

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "oco_frugal sweep configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "settings": {
            "type": "array",
            "items": {"enum": ["fresh", "stale", "noisy", "noisy-fresh", "noisy-stale"]},
            "minItems": 1,
        },
        "M": _num_list,
        "L": _num_list,
        "T": {"type": "integer", "minimum": 1},
        "seeds": {
            "oneOf": [
                {"type": "integer", "minimum": 1},
                {"type": "array", "items": {"type": "integer"}, "minItems": 1},
            ]
        },
        "alpha": {"type": "number", "minimum": 0},
        "G": {"type": "number", "exclusiveMinimum": 0},
        "grid_n": {"type": "integer", "minimum": 2},
        "x0": {"type": "number", "minimum": 0, "maximum": 1},
        "out": {"type": "string"},
        "fresh_mode": {"enum": ["paper", "balanced"]},
        "stale_mode": {"enum": ["corrected", "literal"]},
        "workers": {"type": "integer", "minimum": 1},
    },
}

DEFAULTS = {
    "settings": ["fresh", "stale", "noisy"],
    "M": "2:50:8",
    "L": None,
    "T": 100,
    "seeds": 5,
    "alpha": 0.5,
    "G": None,
    "grid_n": 2001,
    "x0": 0.0,
    "out": "out",
    "fresh_mode": "paper",
    "stale_mode": "corrected",
    "workers": None,
}


def parse_values(spec) -> list[float]:
    """Numbers from ``5``, ``[2, 4]`` or ``"2:50:8,60"`` (start:stop:step, stop inclusive)."""
    if spec is None:
        return []
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    out = []
    for part in str(spec).split(","):
        bits = [float(b) for b in part.split(":")]
        if len(bits) == 1:
            out.append(bits[0])
            continue
        start, stop = bits[0], bits[1]
        step = bits[2] if len(bits) == 3 else 1.0
        if step <= 0:
            raise ValueError(f"range step must be > 0 in {part!r}")
        k = 0
        while start + k * step <= stop + 1e-9 * abs(step):
            out.append(round(start + k * step, 12))
            k += 1
    return out


def parse_seeds(spec) -> list[int]:
    if isinstance(spec, int):
        return list(range(spec))
    if isinstance(spec, (list, tuple)):
        return [int(s) for s in spec]
    s = str(spec)
    if "," in s or ":" in s:
        return [int(v) for v in parse_values(s)]
    return list(range(int(s)))


def load_config(path) -> dict:
    doc = json.loads(Path(path).read_text())
    jsonschema.validate(doc, CONFIG_SCHEMA)
    return doc


def merged(config: dict, overrides: dict) -> dict:
    """Defaults, then config keys, then non-None CLI overrides."""
    out = dict(DEFAULTS)
    out.update(config)
    out.update({k: v for k, v in overrides.items() if v is not None})
    return out
