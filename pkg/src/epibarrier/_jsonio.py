"""Deterministic JSON emission with full-precision floats.

Floats print with 17 significant digits so artifacts round-trip exactly and
repeated runs are byte-identical; insertion order of dict keys is preserved.
"""
from __future__ import annotations

import math


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    return _emit(obj, indent, 0) + ("\n" if indent else "")


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1)) if indent else ""
    close_pad = " " * (indent * level) if indent else ""
    sep = ",\n" if indent else ","
    colon = ": " if indent else ":"
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return _escape(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = sep.join(pad + _emit(v, indent, level + 1) for v in obj)
        return ("[\n" + inner + "\n" + close_pad + "]") if indent else "[" + inner + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = sep.join(
            pad + _escape(str(k)) + colon + _emit(v, indent, level + 1)
            for k, v in obj.items()
        )
        return ("{\n" + inner + "\n" + close_pad + "}") if indent else "{" + inner + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)
