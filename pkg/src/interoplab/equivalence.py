"""Semantic JSON equality with exact-decimal numerics.

Two documents are equivalent when they carry the same data: object key order
and whitespace never matter, array order always does, and numbers compare as
exact decimals (0.10 equals 0.1) unless a tolerance loosens them.
"""

from __future__ import annotations

import json
from decimal import Decimal, localcontext

from . import jsonutil
from .core import ClassifiedError, FailureCause

ROOT_PATH = "$"


class JsonSyntaxError(ClassifiedError):
    """Document is not valid JSON (or repeats an object key)."""

    cause = FailureCause.JSON_SYNTAX

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


def canonicalize(text: str):
    """Parse text into a canonical tree: keys sorted, numbers as Decimal."""
    try:
        doc = jsonutil.loads(text)
    except jsonutil.DuplicateKeyError as err:
        raise JsonSyntaxError(str(err)) from err
    except json.JSONDecodeError as err:
        raise JsonSyntaxError(f"{err.msg} at offset {err.pos}", offset=err.pos) from err
    return _canon(doc)


def _canon(node):
    if isinstance(node, dict):
        return {key: _canon(node[key]) for key in sorted(node)}
    if isinstance(node, list):
        return [_canon(item) for item in node]
    if isinstance(node, bool) or node is None or isinstance(node, (str, Decimal)):
        return node
    if isinstance(node, int):
        return Decimal(node)
    raise TypeError(f"unsupported JSON node: {type(node).__name__}")


def _kind(node) -> str:
    if isinstance(node, bool):
        return "boolean"
    if node is None:
        return "null"
    if isinstance(node, Decimal):
        return "number"
    if isinstance(node, str):
        return "string"
    if isinstance(node, dict):
        return "object"
    return "array"


def _numbers_equal(a: Decimal, b: Decimal, tolerance: Decimal | None) -> bool:
    if tolerance is None:
        return a == b
    with localcontext() as ctx:
        ctx.prec = 50
        return abs(a - b) <= tolerance


def first_difference(a, b, tolerance: Decimal | None = None, _path: str = "") -> str | None:
    """JSON path of the first difference between two canonical trees, or None.

    Paths look like features[0].properties.area_ha; a difference at the very
    root is reported as "$".
    """
    here = _path or ROOT_PATH
    kind_a, kind_b = _kind(a), _kind(b)
    if kind_a != kind_b:
        return here
    if kind_a == "object":
        for key in sorted(set(a) | set(b)):
            child = f"{_path}.{key}" if _path else key
            if key not in a or key not in b:
                return child
            diff = first_difference(a[key], b[key], tolerance, child)
            if diff is not None:
                return diff
        return None
    if kind_a == "array":
        if len(a) != len(b):
            return f"{_path}[{min(len(a), len(b))}]"
        for i, (item_a, item_b) in enumerate(zip(a, b)):
            diff = first_difference(item_a, item_b, tolerance, f"{_path}[{i}]")
            if diff is not None:
                return diff
        return None
    if kind_a == "number":
        return None if _numbers_equal(a, b, tolerance) else here
    return None if a == b else here


def equivalent(a_text: str, b_text: str, tolerance: Decimal | None = None) -> bool:
    """Whether two JSON texts carry the same data (see module docstring)."""
    return first_difference(canonicalize(a_text), canonicalize(b_text), tolerance) is None
