"""Canonical JSON for certificates and reports.

The stock ``json`` module lets float formatting drift with the platform's
``repr``; the emitters here pin the representation so identical inputs
yield byte-identical documents:

* object keys are emitted in sorted order,
* floats are printed with 17 significant digits (lossless round-trip),
* integers stay integers.

Only the JSON subset actually used by this package is supported: dicts with
string keys, lists, strings, bools, None, ints and finite floats.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .core import PseudoShiftError

__all__ = ["SchemaError", "canonical_dumps", "dump_path", "load_path", "format_float"]


class SchemaError(PseudoShiftError):
    """An input document does not match the expected schema."""


def format_float(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"non-finite float {value!r} cannot be serialized")
    text = f"{value:.17g}"
    # normalize '1e+05' style exponents are fine for json; ensure parseability
    return text


def canonical_dumps(obj: Any, pretty: bool = False) -> str:
    """Serialize to canonical JSON text (no trailing newline)."""
    pieces: list[str] = []
    _write(obj, pieces, 0, pretty)
    return "".join(pieces)


def _write(obj: Any, out: list[str], depth: int, pretty: bool) -> None:
    indent = "  " * (depth + 1) if pretty else ""
    close_indent = "  " * depth if pretty else ""
    sep = ",\n" if pretty else ", "
    if obj is None or isinstance(obj, (bool, str)):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n" if pretty else "[")
        for i, item in enumerate(obj):
            if i:
                out.append(sep)
            out.append(indent)
            _write(item, out, depth + 1, pretty)
        out.append(f"\n{close_indent}]" if pretty else "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n" if pretty else "{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if i:
                out.append(sep)
            out.append(indent)
            out.append(json.dumps(key))
            out.append(": ")
            _write(obj[key], out, depth + 1, pretty)
        out.append(f"\n{close_indent}}}" if pretty else "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


def dump_path(obj: Any, path: str, pretty: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(obj, pretty=pretty))
        fh.write("\n")


def load_path(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
