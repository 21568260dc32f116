"""JSON helpers: complex numbers travel as [re, im] pairs."""

from __future__ import annotations

import enum
import math
from typing import Any, List, Sequence, Union

from .errors import SchemaError


class Infinity(enum.Enum):
    """The point at infinity of the Riemann sphere."""

    POINT = "inf"

    def __repr__(self) -> str:
        return "Infinity.POINT"


SpherePoint = Union[complex, Infinity]


def complex_to_pair(z: complex) -> List[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def pair_to_complex(value: Any, *, field: str = "value") -> complex:
    """Accept [re, im], a bare real, or a (re, im) tuple."""
    if isinstance(value, bool):
        raise SchemaError(f"{field}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, complex):
        return value
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            return complex(float(re), float(im))
    raise SchemaError(f"{field}: expected a number or [re, im], got {value!r}")


def point_to_json(p: SpherePoint) -> Any:
    if isinstance(p, Infinity):
        return p.value
    return complex_to_pair(p)


def complex_list_to_json(values: Sequence[complex]) -> List[List[float]]:
    return [complex_to_pair(v) for v in values]


def complex_list_from_json(values: Any, *, field: str = "values") -> List[complex]:
    if not isinstance(values, (list, tuple)):
        raise SchemaError(f"{field}: expected a list, got {values!r}")
    return [pair_to_complex(v, field=f"{field}[{i}]") for i, v in enumerate(values)]


def real_to_json(x: float) -> Any:
    """Floats with infinity spelled as the string "inf" (JSON has no inf)."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x
