"""Small numeric helpers that keep exact types (int, Fraction) exact."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

from .errors import ValidationError

_EXACT = (int, Fraction)


def coerce(x, what: str = "value"):
    """Return ``x`` as int, Fraction or float; reject non-finite values."""
    t = type(x)
    if t is float:
        if not math.isfinite(x):
            raise ValidationError(f"{what} must be finite, got {x!r}")
        return x
    if t is int or t is Fraction:
        return x
    if isinstance(x, bool):
        raise ValidationError(f"{what} must be a real number, got bool")
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, str):
        x = x.strip()
        try:
            return int(x)
        except ValueError:
            pass
        if "/" in x:
            try:
                return Fraction(x)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"cannot parse {what} {x!r}") from exc
    if not isinstance(x, Real):
        try:
            x = float(x)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{what} must be a real number, got {x!r}") from exc
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"{what} must be finite, got {x!r}")
    return x


def is_exact(x) -> bool:
    return isinstance(x, _EXACT) and not isinstance(x, bool)


def total(values: Iterable):
    """Sum that is exact for int/Fraction input and correctly rounded for floats."""
    values = list(values)
    for v in values:
        t = type(v)
        if t is float or not (t is int or t is Fraction or is_exact(v)):
            return math.fsum(values)
    return sum(values, 0)


def dot(x: Sequence, u: Sequence):
    if len(x) == 1:
        return x[0] * u[0]
    return total(a * b for a, b in zip(x, u))


def norm(u: Sequence) -> float:
    return math.sqrt(float(total(c * c for c in u)))


def positive_part(x):
    if x > 0:
        return x
    return 0.0 if isinstance(x, float) else 0
