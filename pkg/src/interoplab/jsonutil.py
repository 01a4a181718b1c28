"""JSON helpers that keep numbers as exact decimals.

The stock json module round-trips numbers through float, which silently
rewrites digit strings.  Area values here are contractual down to the last
digit, so parsing maps every numeric literal to Decimal and serialization
writes Decimals back out verbatim.
"""

from __future__ import annotations

import json
from decimal import Decimal

__all__ = ["DuplicateKeyError", "loads", "dumps"]


class DuplicateKeyError(ValueError):
    """A JSON object literal repeated a key."""


def _reject_duplicates(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise DuplicateKeyError(f"duplicate key: {key!r}")
        obj[key] = value
    return obj


def loads(text: str):
    """Parse JSON with every number as Decimal and duplicate keys rejected."""
    return json.loads(
        text,
        parse_float=Decimal,
        parse_int=Decimal,
        object_pairs_hook=_reject_duplicates,
    )


def dumps(doc, indent: int = 2) -> str:
    """Serialize like json.dumps(indent=...) but emit Decimals digit for digit."""
    out: list[str] = []
    _write(doc, out, indent, 0)
    return "".join(out)


def _write(node, out: list[str], indent: int, depth: int) -> None:
    pad = " " * (indent * depth)
    child_pad = " " * (indent * (depth + 1))
    if isinstance(node, bool):
        # bool subclasses int, so this check must come first
        out.append("true" if node else "false")
    elif node is None:
        out.append("null")
    elif isinstance(node, Decimal):
        out.append(format(node, "f"))
    elif isinstance(node, int):
        out.append(str(node))
    elif isinstance(node, float):
        raise TypeError("refusing to serialize float; use Decimal to keep digits exact")
    elif isinstance(node, str):
        out.append(json.dumps(node))
    elif isinstance(node, dict):
        if not node:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(node.items()):
            out.append(child_pad)
            out.append(json.dumps(str(key)))
            out.append(": ")
            _write(value, out, indent, depth + 1)
            out.append(",\n" if i < len(node) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(node, (list, tuple)):
        if not node:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(node):
            out.append(child_pad)
            _write(value, out, indent, depth + 1)
            out.append(",\n" if i < len(node) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"unsupported JSON type: {type(node).__name__}")
