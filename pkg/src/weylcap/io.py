"""Spec-file loading and report serialization."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .weyl import WeylChannelSpec


class SpecParseError(ValueError):
    """The spec file is not well-formed JSON of the expected shape."""


def parse_spec(text: str) -> WeylChannelSpec:
    """Parse ``{"n": int, "pi": [[...]], "label": str?}``; rows of ``pi`` are indexed by j."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SpecParseError("spec must be a JSON object")
    if "n" not in data or "pi" not in data:
        raise SpecParseError('spec needs keys "n" and "pi"')
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise SpecParseError('"n" must be an integer')
    pi = data["pi"]
    if not isinstance(pi, list) or not all(isinstance(row, list) for row in pi):
        raise SpecParseError('"pi" must be a list of rows')
    for row in pi:
        for x in row:
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise SpecParseError('"pi" entries must be numbers')
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise SpecParseError('"label" must be a string')
    if len(pi) != n or any(len(row) != n for row in pi):
        raise ValidationError(f'"pi" must be {n}x{n}')
    return WeylChannelSpec(n, np.array(pi, dtype=float), label)


def load_spec(path: str | Path) -> WeylChannelSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}") from exc
    return parse_spec(text)


def spec_to_dict(spec: WeylChannelSpec) -> dict:
    out = {"n": spec.n, "pi": [[float(x) for x in row] for row in spec.pi]}
    if spec.label is not None:
        out["label"] = spec.label
    return out


def dump_spec(spec: WeylChannelSpec) -> str:
    # json writes floats with repr, the shortest string that round-trips exactly
    return json.dumps(spec_to_dict(spec), indent=2)


def save_spec(spec: WeylChannelSpec, path: str | Path) -> None:
    Path(path).write_text(dump_spec(spec) + "\n")


def to_jsonable(obj):
    """Convert dataclasses, numpy scalars and arrays to JSON-ready values.

    Non-finite floats become ``None`` so reports only carry finite numbers.
    """
    if isinstance(obj, WeylChannelSpec):
        return spec_to_dict(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def digest(payload) -> str:
    blob = json.dumps(to_jsonable(payload), sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
