"""Exact rational helpers and the repo-wide string encoding of rationals."""

import re
from fractions import Fraction
from typing import Union

from .errors import MalformedInputError

Rational = Fraction
RationalLike = Union[int, Fraction, str]

_RATIONAL_PATTERN = re.compile(r'^-?\d+(/\d+)?$')


def parse_rational(text: str) -> Fraction:
    """Parse "3", "-1/2" style strings; decimals and exponents are rejected."""
    if not isinstance(text, str) or not _RATIONAL_PATTERN.match(text.strip()):
        raise MalformedInputError(f"not a rational string: {text!r}")
    value = text.strip()
    if '/' in value:
        numerator, denominator = value.split('/')
        if int(denominator) == 0:
            raise MalformedInputError(f"zero denominator in {text!r}")
        return Fraction(int(numerator), int(denominator))
    return Fraction(int(value))


def format_rational(value: Fraction) -> str:
    """Reduced decimal-free form: "3", "-1/2"."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise MalformedInputError("floating point values are not exact rationals")
    return Fraction(value)


def rational_sqrt(value: Fraction):
    """Exact square root of a non-negative rational, or None when irrational."""
    value = Fraction(value)
    if value < 0:
        return None
    num_root = _isqrt_exact(value.numerator)
    den_root = _isqrt_exact(value.denominator)
    if num_root is None or den_root is None:
        return None
    return Fraction(num_root, den_root)


def _isqrt_exact(n: int):
    from math import isqrt
    root = isqrt(n)
    return root if root * root == n else None


def sign(value) -> int:
    return (value > 0) - (value < 0)
