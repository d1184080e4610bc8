"""Verification reports and deterministic JSON output."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

__all__ = ["Report", "format_defect", "dumps"]


def format_defect(defect) -> str | float:
    """Exact defects are rendered as strings, numeric ones stay floats."""
    if isinstance(defect, (int, float)):
        return float(defect)
    if isinstance(defect, complex):
        return abs(defect)
    return str(defect)


@dataclass
class Report:
    """Outcome of one identity check.

    ``extension`` holds additional top-level keys (used by the realization
    suite); ``details`` holds free-form diagnostics.
    """

    identity: str
    mode: str
    q: float | None
    N: int
    margin: int
    holds: bool
    max_defect: str | float
    details: dict = field(default_factory=dict)
    extension: dict = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "identity": self.identity,
            "mode": self.mode,
            "q": self.q,
            "N": self.N,
            "margin": self.margin,
            "holds": self.holds,
            "max_defect": self.max_defect,
            "details": self.details,
        }
        out.update(self.extension)
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            # JSON has no inf/nan; keep the document valid and explicit
            return json.dumps(repr(obj))
        text = format(obj, ".17g")
        if "e" not in text and "." not in text and "n" not in text:
            text += ".0"
        return text
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict(), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent, 0)
