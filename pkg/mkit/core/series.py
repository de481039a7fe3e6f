"""
Truncated univariate power series with exact coefficients.

A SeriesT of order N carries coefficients t^0 .. t^N; every operation
returns a result of the same order as its inputs (the smaller one when
orders differ).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple

import numpy as np

from .errors import MalformedInputError, PreconditionError
from .poly import Poly
from .rational import as_rational, format_rational, parse_rational
from .weights import WeightSystem


@dataclass(frozen=True)
class SeriesT:
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise MalformedInputError("a series needs at least one coefficient")
        object.__setattr__(self, 'coeffs', tuple(as_rational(c) for c in self.coeffs))

    @classmethod
    def of(cls, values: Iterable) -> "SeriesT":
        return cls(tuple(values))

    @classmethod
    def zero(cls, order: int) -> "SeriesT":
        return cls((Fraction(0),) * (order + 1))

    @classmethod
    def one(cls, order: int) -> "SeriesT":
        return cls((Fraction(1),) + (Fraction(0),) * order)

    @classmethod
    def identity(cls, order: int) -> "SeriesT":
        """The series t."""
        return cls.zero(order).with_coeff(1, 1) if order >= 1 else cls.zero(order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def with_coeff(self, k: int, value) -> "SeriesT":
        coeffs = list(self.coeffs)
        coeffs[k] = as_rational(value)
        return SeriesT(tuple(coeffs))

    def truncate(self, order: int) -> "SeriesT":
        return SeriesT(self.coeffs[:order + 1])

    def pad(self, order: int) -> "SeriesT":
        """Extend with zeros (or cut) to the given order."""
        if order <= self.order:
            return self.truncate(order)
        return SeriesT(self.coeffs + (Fraction(0),) * (order - self.order))

    def trimmed(self) -> "SeriesT":
        """Drop trailing zero coefficients, keeping at least one."""
        coeffs = list(self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return SeriesT(tuple(coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "SeriesT") -> "SeriesT":
        n = min(self.order, other.order)
        return SeriesT(tuple(self[k] + other[k] for k in range(n + 1)))

    def __sub__(self, other: "SeriesT") -> "SeriesT":
        n = min(self.order, other.order)
        return SeriesT(tuple(self[k] - other[k] for k in range(n + 1)))

    def __neg__(self) -> "SeriesT":
        return SeriesT(tuple(-c for c in self.coeffs))

    def scale(self, factor) -> "SeriesT":
        factor = as_rational(factor)
        return SeriesT(tuple(c * factor for c in self.coeffs))

    def __mul__(self, other) -> "SeriesT":
        if not isinstance(other, SeriesT):
            return self.scale(other)
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[:n + 1]):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * other[j]
        return SeriesT(tuple(out))

    def derivative(self) -> "SeriesT":
        """Derivative; the order drops by one (stays 0 for constants)."""
        if self.order == 0:
            return SeriesT((Fraction(0),))
        return SeriesT(tuple(k * self.coeffs[k] for k in range(1, len(self.coeffs))))

    def shift(self) -> "SeriesT":
        """Multiply by t keeping the order."""
        return SeriesT((Fraction(0),) + self.coeffs[:-1])

    def integral(self) -> "SeriesT":
        """Primitive vanishing at 0; the order grows by one."""
        return SeriesT((Fraction(0),) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def substitute_scale(self, factor) -> "SeriesT":
        """s(factor * t)"""
        factor = as_rational(factor)
        return SeriesT(tuple(c * factor ** k for k, c in enumerate(self.coeffs)))

    def evaluate(self, t) -> Fraction:
        total = Fraction(0)
        for c in reversed(self.coeffs):
            total = total * t + c
        return total

    def evaluate_float(self, t):
        """Floating point Horner evaluation; t may be a numpy array."""
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for c in reversed(self.coeffs):
            total = total * t + float(c)
        return total

    def to_json(self) -> List[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "SeriesT":
        if isinstance(data, dict):
            for key in ("c", "coeffs", "series"):
                if key in data:
                    data = data[key]
                    break
        if not isinstance(data, list) or not data:
            raise MalformedInputError("series must be a non-empty list of rational strings")
        if isinstance(data[0], list):
            if len(data) != 1:
                raise MalformedInputError("expected a single series")
            data = data[0]
        return cls(tuple(parse_rational(c) if isinstance(c, str) else _integer(c) for c in data))

    def __str__(self) -> str:
        return "[" + ", ".join(format_rational(c) for c in self.coeffs) + "]"


def _integer(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedInputError(f"series coefficient must be a rational string, got {value!r}")
    return Fraction(value)


def series_power(s: SeriesT, p) -> SeriesT:
    """s^p for s(0) = 1 by the binomial recurrence s r' = p s' r."""
    if s[0] != 1:
        raise PreconditionError("unnormalized leading term")
    p = as_rational(p)
    n = s.order
    r = [Fraction(0)] * (n + 1)
    r[0] = Fraction(1)
    for m in range(1, n + 1):
        acc = Fraction(0)
        for k in range(1, m + 1):
            if s[k]:
                acc += (p * k - (m - k)) * s[k] * r[m - k]
        r[m] = acc / m
    return SeriesT(tuple(r))


def reciprocal(s: SeriesT) -> SeriesT:
    if s[0] == 0:
        raise PreconditionError("series is not a unit")
    n = s.order
    inv = [Fraction(0)] * (n + 1)
    inv[0] = 1 / s[0]
    for m in range(1, n + 1):
        inv[m] = -sum((s[k] * inv[m - k] for k in range(1, m + 1)), Fraction(0)) * inv[0]
    return SeriesT(tuple(inv))


def compose_univariate(outer: SeriesT, inner: SeriesT) -> SeriesT:
    """outer(inner(t)) for inner(0) = 0."""
    if inner[0] != 0:
        raise PreconditionError("inner series must vanish at 0")
    n = min(outer.order, inner.order)
    inner = inner.truncate(n)
    result = SeriesT.zero(n).with_coeff(0, outer[n])
    for k in range(n - 1, -1, -1):
        result = (result * inner).with_coeff(0, outer[k])
    return result


def revert(s: SeriesT) -> SeriesT:
    """Compositional inverse of s with s(0) = 0 and s'(0) != 0."""
    if s[0] != 0 or s[1] == 0:
        raise PreconditionError("series is not invertible under composition")
    n = s.order
    inverse = SeriesT.zero(n).with_coeff(1, 1 / s[1])
    ident = SeriesT.identity(n)
    # g <- g - (s(g) - t) / s1 gains one order per pass
    for _ in range(n):
        defect = compose_univariate(s, inverse) - ident
        if defect.is_zero():
            break
        inverse = inverse - defect.scale(1 / s[1])
    return inverse


def compose_series(c: SeriesT, f: Poly, cap: int, weights: WeightSystem) -> Poly:
    """sum_k c_k f^k truncated at level cap (Horner scheme)."""
    result = Poly.const(c[c.order])
    for k in range(c.order - 1, -1, -1):
        result = result.mul_truncated(f, weights, cap) + c[k]
    return result.truncate(weights, cap)


def series_from_poly(p: Poly) -> SeriesT:
    """Read a polynomial in y only as a series."""
    coeffs = p.at_x_zero()
    return SeriesT(tuple(coeffs) if coeffs else (Fraction(0),))


def series_to_poly(s: SeriesT, var: str = 'y') -> Poly:
    return Poly.from_univariate(s.coeffs, var)
