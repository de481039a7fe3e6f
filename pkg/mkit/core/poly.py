"""
Exact sparse bivariate polynomials over the rationals.

A Poly is an immutable map (i, j) -> Fraction for x^i y^j with no stored
zeros. Iteration through terms() follows the canonical order: total degree
ascending, and within a degree larger x-powers first.

Graded operations take a WeightSystem and an integer level cap; every
intermediate product is truncated at the cap, which is exact because no
monomial has negative level.
"""

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import MalformedInputError, VerificationError
from .rational import as_rational, format_rational, parse_rational
from .weights import WeightSystem


class Monomial(NamedTuple):
    """x^ex y^ey"""
    ex: int
    ey: int


def monomial_order_key(mono) -> Tuple[int, int]:
    return (mono[0] + mono[1], -mono[0])


class Poly:
    """Immutable exact polynomial in x and y."""

    __slots__ = ('_terms', '_hash', '_graded')

    def __init__(self, terms: Optional[Dict] = None):
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                ex, ey = int(mono[0]), int(mono[1])
                if ex < 0 or ey < 0:
                    raise MalformedInputError(f"negative exponent in monomial ({ex}, {ey})")
                value = as_rational(coeff)
                if value:
                    key = (ex, ey)
                    value = clean.get(key, 0) + value
                    if value:
                        clean[key] = value
                    else:
                        clean.pop(key, None)
        self._terms = clean
        self._hash = None
        self._graded = {}

    @classmethod
    def _raw(cls, terms: Dict[Tuple[int, int], Fraction]) -> "Poly":
        """Wrap an already clean dict without copying."""
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._hash = None
        poly._graded = {}
        return poly

    # construction

    @classmethod
    def zero(cls) -> "Poly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "Poly":
        return cls._raw({(0, 0): Fraction(1)})

    @classmethod
    def const(cls, value) -> "Poly":
        value = as_rational(value)
        return cls._raw({(0, 0): value} if value else {})

    @classmethod
    def x(cls) -> "Poly":
        return cls._raw({(1, 0): Fraction(1)})

    @classmethod
    def y(cls) -> "Poly":
        return cls._raw({(0, 1): Fraction(1)})

    @classmethod
    def monomial(cls, ex: int, ey: int, coeff=1) -> "Poly":
        return cls({(ex, ey): coeff})

    @classmethod
    def from_univariate(cls, coeffs: Iterable, var: str = 'y') -> "Poly":
        """sum_k coeffs[k] * var^k"""
        terms = {}
        for k, c in enumerate(coeffs):
            if c:
                terms[(k, 0) if var == 'x' else (0, k)] = Fraction(c)
        return cls._raw(terms)

    # inspection

    def terms(self) -> List[Tuple[Monomial, Fraction]]:
        return [(Monomial(*m), self._terms[m]) for m in sorted(self._terms, key=monomial_order_key)]

    def items(self):
        return self._terms.items()

    def support(self) -> List[Monomial]:
        return [Monomial(*m) for m in sorted(self._terms, key=monomial_order_key)]

    def coefficient(self, ex: int, ey: int) -> Fraction:
        return self._terms.get((ex, ey), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0, 0), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.terms())

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((i + j for i, j in self._terms), default=-1)

    def ord_x(self) -> int:
        """Largest k with x^k dividing self (0 for the zero polynomial)."""
        return min((i for i, _ in self._terms), default=0)

    def divisible_by_x(self, k: int = 1) -> bool:
        return all(i >= k for i, _ in self._terms)

    def div_x(self, k: int = 1) -> "Poly":
        """Exact division by x^k."""
        if not self.divisible_by_x(k):
            raise VerificationError(f"polynomial is not divisible by x^{k}")
        return Poly._raw({(i - k, j): c for (i, j), c in self._terms.items()})

    def mul_x(self, k: int = 1) -> "Poly":
        return Poly._raw({(i + k, j): c for (i, j), c in self._terms.items()})

    def at_x_zero(self) -> List[Fraction]:
        """Coefficients of f(0, y) by power of y."""
        top = max((j for i, j in self._terms if i == 0), default=-1)
        coeffs = [Fraction(0)] * (top + 1)
        for (i, j), c in self._terms.items():
            if i == 0:
                coeffs[j] = c
        return coeffs

    # arithmetic

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if len(other._terms) > len(self._terms):
            self, other = other, self
        result = dict(self._terms)
        for mono, c in other._terms.items():
            value = result.get(mono, 0) + c
            if value:
                result[mono] = value
            else:
                result.pop(mono, None)
        return Poly._raw(result)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, factor) -> "Poly":
        factor = as_rational(factor)
        if not factor:
            return Poly.zero()
        return Poly._raw({m: c * factor for m, c in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        result: Dict[Tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                result[key] = result.get(key, 0) + c1 * c2
        return Poly._raw({m: c for m, c in result.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise MalformedInputError("polynomial powers must be non-negative integers")
        result = Poly.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # calculus

    def diff_x(self) -> "Poly":
        return Poly._raw({(i - 1, j): c * i for (i, j), c in self._terms.items() if i})

    def diff_y(self) -> "Poly":
        return Poly._raw({(i, j - 1): c * j for (i, j), c in self._terms.items() if j})

    def integrate_x(self) -> "Poly":
        """The primitive in x vanishing on x = 0."""
        return Poly._raw({(i + 1, j): c / (i + 1) for (i, j), c in self._terms.items()})

    # evaluation

    def evaluate(self, x, y) -> Fraction:
        """Exact value at a rational point."""
        x, y = Fraction(x), Fraction(y)
        return sum((c * x ** i * y ** j for (i, j), c in self._terms.items()), Fraction(0))

    def evaluate_float(self, x, y):
        """Floating point value; x and y may be numpy arrays."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        total = np.zeros(np.broadcast(x, y).shape, dtype=float)
        for (i, j), c in self._terms.items():
            total = total + float(c) * x ** i * y ** j
        return total

    # grading

    def _levels(self, weights: WeightSystem) -> List[Tuple[int, Tuple[int, int], Fraction]]:
        """Terms sorted by level; cached per weight system."""
        cached = self._graded.get(weights)
        if cached is None:
            lx, ly = weights.level_x, weights.level_y
            cached = sorted(((lx * i + ly * j, (i, j), c) for (i, j), c in self._terms.items()),
                            key=lambda entry: entry[0])
            # _terms never changes, so racing threads compute equal lists; the first stored one wins
            cached = self._graded.setdefault(weights, cached)
        return cached

    def truncate(self, weights: WeightSystem, cap: int) -> "Poly":
        """Drop every monomial of level above cap."""
        lx, ly = weights.level_x, weights.level_y
        if all(lx * i + ly * j <= cap for i, j in self._terms):
            return self
        return Poly._raw({(i, j): c for (i, j), c in self._terms.items() if lx * i + ly * j <= cap})

    def pieces(self, weights: WeightSystem) -> Dict[int, "Poly"]:
        """Quasihomogeneous components keyed by level."""
        found: Dict[int, Dict] = {}
        for level, mono, c in self._levels(weights):
            found.setdefault(level, {})[mono] = c
        return {level: Poly._raw(terms) for level, terms in found.items()}

    def piece(self, weights: WeightSystem, level: int) -> "Poly":
        return Poly._raw({mono: c for lvl, mono, c in self._levels(weights) if lvl == level})

    def lowest_level(self, weights: WeightSystem) -> Optional[int]:
        levels = self._levels(weights)
        return levels[0][0] if levels else None

    def highest_level(self, weights: WeightSystem) -> Optional[int]:
        levels = self._levels(weights)
        return levels[-1][0] if levels else None

    def is_quasihomogeneous(self, weights: WeightSystem, level: int) -> bool:
        return all(lvl == level for lvl, _, _ in self._levels(weights))

    def mul_truncated(self, other: "Poly", weights: WeightSystem, cap: int) -> "Poly":
        """Product with every monomial above level cap dropped."""
        if not self._terms or not other._terms:
            return Poly.zero()
        left = self._levels(weights)
        right = other._levels(weights)
        result: Dict[Tuple[int, int], Fraction] = {}
        for la, (i1, j1), c1 in left:
            room = cap - la
            if room < 0:
                break
            for lb, (i2, j2), c2 in right:
                if lb > room:
                    break
                key = (i1 + i2, j1 + j2)
                result[key] = result.get(key, 0) + c1 * c2
        return Poly._raw({m: c for m, c in result.items() if c})

    def pow_truncated(self, exponent: int, weights: WeightSystem, cap: int) -> "Poly":
        result = Poly.one().truncate(weights, cap)
        for _ in range(exponent):
            result = result.mul_truncated(self, weights, cap)
        return result

    # comparison and encoding

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Poly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def to_json(self) -> Dict[str, list]:
        return {"terms": [{"e": [m.ex, m.ey], "c": format_rational(c)} for m, c in self.terms()]}

    @classmethod
    def from_json(cls, data) -> "Poly":
        if not isinstance(data, dict) or not isinstance(data.get("terms"), list):
            raise MalformedInputError("polynomial must be an object with a 'terms' list")
        terms: Dict[Tuple[int, int], Fraction] = {}
        for entry in data["terms"]:
            try:
                ex, ey = entry["e"]
                coeff = entry["c"]
            except (KeyError, TypeError, ValueError):
                raise MalformedInputError(f"malformed polynomial term: {entry!r}")
            if not isinstance(ex, int) or not isinstance(ey, int) or isinstance(ex, bool) or isinstance(ey, bool):
                raise MalformedInputError(f"exponents must be integers: {entry!r}")
            if (ex, ey) in terms:
                raise MalformedInputError(f"repeated monomial ({ex}, {ey})")
            terms[(ex, ey)] = parse_rational(coeff)
        return cls(terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (ex, ey), c in self.terms():
            factors = []
            if ex:
                factors.append("x" if ex == 1 else f"x^{ex}")
            if ey:
                factors.append("y" if ey == 1 else f"y^{ey}")
            if not factors:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{format_rational(c)}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self})"


X = Poly.x()
Y = Poly.y()
