"""Exact rational helpers shared by the layout and the counters."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

# above this denominator k**(p/q) is compared in floating point
_MAX_EXACT_DENOMINATOR = 64


def as_fraction(value) -> Fraction:
    """Convert ints, floats, decimal strings and "p/q" strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(str(value).strip())


def decimal_fraction(value) -> Fraction:
    """Rational read of a user-facing real, 2.7 -> 27/10 rather than the binary float."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return as_fraction(value)


def fraction_str(value) -> str:
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@lru_cache(maxsize=None)
def floor_pow(k: int, exponent: Fraction) -> int:
    """Largest integer m >= 0 with m <= k**exponent, for k >= 0."""
    if k <= 0:
        return 0
    p, q = exponent.numerator, exponent.denominator
    if p < 0:
        raise ValueError("negative exponent")
    m = int(float(k) ** (p / q))
    if q > _MAX_EXACT_DENOMINATOR:
        return m
    target = k**p
    while m > 0 and m**q > target:
        m -= 1
    while (m + 1) ** q <= target:
        m += 1
    return m


def ceil_pow(k: int, exponent: Fraction) -> int:
    m = floor_pow(k, exponent)
    p, q = exponent.numerator, exponent.denominator
    if q <= _MAX_EXACT_DENOMINATOR and m**q == k**p:
        return m
    if q > _MAX_EXACT_DENOMINATOR and float(m) == float(k) ** (p / q):
        return m
    return m + 1


def floor_log2(value: Fraction) -> int:
    """floor(log2(value)) for a positive rational."""
    if value <= 0:
        raise ValueError("log of non-positive value")
    p, q = value.numerator, value.denominator
    e = p.bit_length() - q.bit_length()
    # want q * 2**e <= p < q * 2**(e+1)
    if e >= 0:
        if (q << e) > p:
            e -= 1
    else:
        if q > (p << -e):
            e -= 1
    return e


def ceil_int(value) -> int:
    value = as_fraction(value)
    return -((-value.numerator) // value.denominator)


def floor_int(value) -> int:
    value = as_fraction(value)
    return value.numerator // value.denominator
