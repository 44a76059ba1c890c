"""Deterministic text serialization for machine-readable outputs.

JSON floats are rendered with 17 significant digits so parsed values
round-trip exactly; two runs with the same inputs produce byte-identical
files.
"""

from __future__ import annotations

import math

__all__ = ["format_float", "dumps_json", "dump_json"]


def format_float(x: float) -> str:
    """17-significant-digit decimal form; round-trips to the same double."""
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value {x} cannot be serialized")
    return format(x, ".17g")


def _encode(obj, pieces: list, indent: int) -> None:
    pad = "  " * indent
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, int):
        pieces.append(str(obj))
    elif isinstance(obj, float):
        pieces.append(format_float(obj))
    elif isinstance(obj, str):
        escaped = (
            obj.replace("\\", "\\\\")
            .replace('"', '\\"')
            .replace("\n", "\\n")
            .replace("\r", "\\r")
            .replace("\t", "\\t")
        )
        pieces.append(f'"{escaped}"')
    elif isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            pieces.append(f'{pad}  "{key}": ')
            _encode(value, pieces, indent + 1)
            pieces.append(",\n" if i < len(obj) - 1 else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not len(obj):
            pieces.append("[]")
            return
        pieces.append("[\n")
        for i, value in enumerate(obj):
            pieces.append(pad + "  ")
            _encode(value, pieces, indent + 1)
            pieces.append(",\n" if i < len(obj) - 1 else "\n")
        pieces.append(pad + "]")
    else:
        # numpy scalars and anything float-like
        if hasattr(obj, "item"):
            _encode(obj.item(), pieces, indent)
        else:
            raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    pieces: list = []
    _encode(obj, pieces, 0)
    pieces.append("\n")
    return "".join(pieces)


def dump_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(obj))
