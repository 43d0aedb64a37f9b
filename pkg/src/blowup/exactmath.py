"""Exact integer comparisons against square-root bounds.

Certified inequalities of the form x <= sqrt(m) + c are always evaluated by
squaring integers, never through floating point.
"""

from __future__ import annotations

import math


def ceil_sqrt(n: int) -> int:
    if n < 0:
        raise ValueError("negative radicand")
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def le_sqrt(value: int, radicand: int) -> bool:
    """value <= sqrt(radicand), exactly."""
    if value <= 0:
        return True
    return value * value <= radicand


def ge_sqrt(value: int, radicand: int) -> bool:
    """value >= sqrt(radicand), exactly."""
    if value < 0:
        return False
    return value * value >= radicand


def le_sqrt_plus(value: int, radicand: int, offset: int) -> bool:
    """value <= sqrt(radicand) + offset, exactly."""
    return le_sqrt(value - offset, radicand)
