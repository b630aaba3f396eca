"""Exact-number helpers used by predicates with closed-interval thresholds."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

Real = int | float | Fraction


def as_fraction(value) -> Fraction:
    """Read ``value`` exactly.

    Floats are read through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def floor_times(fraction_like, n: int) -> int:
    """Exact floor of ``fraction_like * n``."""
    return math.floor(as_fraction(fraction_like) * n)


def log2_int(value: int) -> float:
    """log2 of a (possibly huge) positive integer without float overflow."""
    if value <= 0:
        return -math.inf
    shift = max(value.bit_length() - 64, 0)
    return math.log2(value >> shift) + shift
