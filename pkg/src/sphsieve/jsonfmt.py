"""Deterministic JSON emission with floats at 17 significant digits.

The standard json module prints shortest-roundtrip floats; reports here pin
the textual form so identical configurations produce byte-identical output.
"""

from __future__ import annotations

import math
import numbers

__all__ = ["dumps"]


def _fmt_scalar(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, numbers.Integral):
        return str(int(obj))
    if isinstance(obj, numbers.Real):
        x = float(obj)
        if math.isnan(x):
            return '"NaN"'
        if math.isinf(x):
            return '"Infinity"' if x > 0 else '"-Infinity"'
        return format(x, ".17g")
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    closepad = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f'{pad}"{k}": {_emit(v, level + 1, indent)}'
                 for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + closepad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (bool, numbers.Real)) or v is None for v in seq):
            return "[" + ", ".join(_fmt_scalar(v) for v in seq) + "]"
        items = (pad + _emit(v, level + 1, indent) for v in seq)
        return "[\n" + ",\n".join(items) + "\n" + closepad + "]"
    return _fmt_scalar(obj)


def dumps(obj, indent: int = 2) -> str:
    """Serialize dicts/lists/scalars; floats printed with 17 digits."""
    return _emit(obj, 0, indent)
