"""Small helpers shared by the numerical modules."""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

from .errors import DomainError


def as_fraction(value) -> Fraction:
    """Exact rational for a user-supplied parameter.

    Floats go through their shortest repr, so ``0.3`` becomes ``3/10`` and
    ``floor(0.3 * 10)`` is 3, as a reader of the literal expects.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Real) and not isinstance(value, numbers.Rational):
        value = float(value)
        if not math.isfinite(value):
            raise DomainError(f"non-finite parameter {value!r}")
        return Fraction(repr(value))
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a real parameter: {value!r}") from exc


def rank_for(alpha, n: int) -> int:
    """``floor(alpha * n)`` evaluated exactly."""
    return math.floor(as_fraction(alpha) * n)
