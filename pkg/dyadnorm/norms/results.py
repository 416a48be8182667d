"""Norm result records."""

from __future__ import annotations

import math
from typing import Any, Literal

from pydantic import BaseModel

Exactness = Literal["exact", "truncated", "quadrature"]


class NormResult(BaseModel):
    """A computed norm with how it was obtained and what realises it."""

    norm: str
    value: float
    exactness: Exactness = "exact"
    witness: list[str] = []
    details: dict[str, Any] = {}

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def record(self, digits: int = 17) -> dict[str, Any]:
        """JSON-ready form; floats keep ``digits`` significant digits, infinity is "+inf"."""
        return {
            "norm": self.norm,
            "value": format_float(self.value, digits),
            "exactness": self.exactness,
            "witness": list(self.witness),
            "details": {k: plain_value(v, digits) for k, v in sorted(self.details.items())},
        }


def format_float(x: float, digits: int = 17) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return f"{x:.{digits}g}"


def plain_value(value: Any, digits: int) -> Any:
    if isinstance(value, float):
        return format_float(value, digits)
    if isinstance(value, dict):
        return {str(k): plain_value(v, digits) for k, v in sorted(value.items())}
    if isinstance(value, list | tuple):
        return [plain_value(v, digits) for v in value]
    return value
