"""Exact arithmetic helpers shared by the engines and compilers."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Rational = Union[Fraction, int, str]


def as_fraction(value: Rational) -> Fraction:
    """Parse ``"num/den"`` strings, ints and Fractions; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"expected a rational, got {type(value).__name__}")


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def iroot_ceil(value: int, k: int) -> int:
    """Smallest integer r >= 0 with r**k >= value."""
    if value < 0 or k < 1:
        raise ValueError("iroot_ceil needs value >= 0 and k >= 1")
    if value < 2 or k == 1:
        return value
    r = math.isqrt(value) if k == 2 else int(round(value ** (1.0 / k)))
    while r > 0 and (r - 1) ** k >= value:
        r -= 1
    while r**k < value:
        r += 1
    return r


def ceil_power(n: int, exponent: Rational) -> int:
    """Exact ceil(n ** exponent) for integer n >= 0 and rational exponent >= 0."""
    e = as_fraction(exponent)
    if e < 0:
        raise ValueError("negative exponent")
    if n < 0:
        raise ValueError("negative base")
    if e == 0:
        return 1
    if n <= 1:
        return n
    return iroot_ceil(n**e.numerator, e.denominator)


def ceil_log2(n: int) -> int:
    """ceil(log2 n) for n >= 1; 0 for n <= 1."""
    if n <= 1:
        return 0
    return (n - 1).bit_length()


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h
