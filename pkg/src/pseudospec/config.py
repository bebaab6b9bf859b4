"""Run configuration: per-command parameter schemas and validation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .errors import InputError

COMMANDS = (
    "flat-spectrum",
    "stability-scan",
    "oppenheim-scan",
    "cartan",
    "properness",
    "sharpness",
    "ads3-stable",
    "orbit-count",
    "poincare",
)

DEFAULT_SEED = 0
_SEED_MAX = 2**64 - 1


def _int(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (isinstance(v, float) and not v.is_integer()):
        raise InputError(f"parameter {name!r} must be an integer, got {v!r}")
    return int(v)


def _float(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InputError(f"parameter {name!r} must be a finite number, got {v!r}")
    return float(v)


def _opt_float(name, v):
    return None if v is None else _float(name, v)


def _bool(name, v):
    if not isinstance(v, bool):
        raise InputError(f"parameter {name!r} must be true or false, got {v!r}")
    return v


def _str(name, v):
    if not isinstance(v, str):
        raise InputError(f"parameter {name!r} must be a string, got {v!r}")
    return v


def _list_of(conv):
    def parse(name, v):
        if not isinstance(v, list) or not v:
            raise InputError(f"parameter {name!r} must be a non-empty list, got {v!r}")
        return [conv(f"{name}[{i}]", x) for i, x in enumerate(v)]

    return parse


def _matrix(name, v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [[v]]
    rows = _list_of(_list_of(_float))(name, v)
    if any(len(r) != len(rows) for r in rows):
        raise InputError(f"parameter {name!r} must be a square matrix, got {v!r}")
    return rows


def _opt(conv):
    def parse(name, v):
        return None if v is None else conv(name, v)

    return parse


_floats = _list_of(_float)
_ints = _list_of(_int)
_vectors = _list_of(_list_of(_float))
_pairs = _list_of(_list_of(_list_of(_list_of(_float))))


def _element(name, v):
    if not isinstance(v, list):
        raise InputError(f"parameter {name!r} must be a nested list, got {v!r}")
    try:
        return json.loads(json.dumps(v, allow_nan=False))
    except ValueError:
        raise InputError(f"parameter {name!r} has non-finite entries") from None


_GROUP = {
    "presentation": (_str, "standard"),
    "translation": (_float, 2.0),
    "generators": (_opt(_pairs), None),
}

SCHEMAS: dict[str, dict[str, tuple[Callable[[str, Any], Any], Any]]] = {
    "flat-spectrum": {
        "g": (_matrix, None),
        "p": (_int, None),
        "q": (_int, None),
        "box_radius": (_int, None),
        "lambda_min": (_float, None),
        "lambda_max": (_float, None),
        "dedupe_tol": (_float, 1e-9),
    },
    "stability-scan": {
        "g0": (_matrix, None),
        "p": (_int, None),
        "q": (_int, None),
        "radius": (_float, None),
        "samples": (_int, 100),
        "box_radius": (_int, None),
        "lambda_min": (_float, None),
        "lambda_max": (_float, None),
        "match_tol": (_float, 1e-6),
    },
    "oppenheim-scan": {
        "g": (_matrix, None),
        "p": (_int, None),
        "q": (_int, None),
        "box_radii": (_ints, None),
        "lambda_min": (_float, None),
        "lambda_max": (_float, None),
        "shrink_factor": (_float, 4.0),
        "search_bound": (_int, 1000),
        "tol": (_float, 1e-9),
    },
    "cartan": {
        "group": (_str, "SL2xSL2"),
        "element": (_element, None),
    },
    "properness": {
        "muL": (_vectors, None),
        "muH": (_vectors, None),
        "probe_count": (_int, 64),
    },
    "sharpness": {
        **_GROUP,
        "word_radius": (_int, 6),
        "muH": (_vectors, [[1.0, 1.0]]),
        "c_prime": (_float, 0.0),
    },
    "ads3-stable": {
        "C": (_opt_float, None),
        "l_max": (_int, None),
        **_GROUP,
        "perturbation_scale": (_float, 1e-3),
        "samples": (_int, 20),
        "word_radius": (_int, 6),
    },
    "orbit-count": {
        **_GROUP,
        "word_radius": (_int, 8),
        "radii": (_floats, None),
        "complete_only": (_bool, False),
    },
    "poincare": {
        **_GROUP,
        "decay_rate": (_float, None),
        "schedule": (_ints, None),
    },
}


# parameters whose default of None is meaningful
_NULLABLE = {
    "sharpness": ("generators",),
    "ads3-stable": ("C", "generators"),
    "orbit-count": ("generators",),
    "poincare": ("generators",),
}


def parse_value(raw: str) -> Any:
    """``--set`` values: JSON if it parses, the bare string otherwise."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def validate(command: str, params: dict) -> dict:
    if command not in SCHEMAS:
        raise InputError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    schema = SCHEMAS[command]
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise InputError(f"unknown parameter(s) for {command}: {', '.join(unknown)}")
    out = {}
    for name, (conv, default) in schema.items():
        if name in params:
            out[name] = conv(name, params[name])
        elif default is None and name not in _NULLABLE.get(command, ()):
            raise InputError(f"missing required parameter {name!r} for {command}")
        else:
            out[name] = default
    return out


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    output_path: str = "."

    def __post_init__(self):
        self.parameters = validate(self.command, dict(self.parameters))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= _SEED_MAX:
            raise InputError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        self.output_path = str(self.output_path)

    def to_dict(self) -> dict:
        return {"command": self.command, "parameters": self.parameters, "seed": self.seed, "output_path": self.output_path}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(d["command"], d.get("parameters", {}), d.get("seed", DEFAULT_SEED), d.get("output_path", "."))

    @classmethod
    def from_manifest(cls, manifest: dict) -> "RunConfig":
        return cls.from_dict(manifest["config"])


def load_config_file(path: str | Path) -> dict:
    """Flat key/value JSON, or a manifest written by a previous run."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"config file {path} must hold a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        cfg = data["config"]
        return {**cfg.get("parameters", {}), "seed": cfg.get("seed", DEFAULT_SEED)}
    return data
