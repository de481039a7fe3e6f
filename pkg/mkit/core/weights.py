"""
Quasihomogeneous weight systems.

A weight system (m1, m2) grades monomials by quasidegree m1*i + m2*j. All
truncation in the engine is by integer *level* = denom * quasidegree, where
denom is the lcm of the weight denominators.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import List, Tuple

from .errors import MalformedInputError

Monomial = Tuple[int, int]


@dataclass(frozen=True)
class WeightSystem:
    """Weights of x and y with the Euler field E = m1 x d/dx + m2 y d/dy."""

    m1: Fraction
    m2: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'm1', Fraction(self.m1))
        object.__setattr__(self, 'm2', Fraction(self.m2))
        if self.m1 <= 0 or self.m2 <= 0:
            raise MalformedInputError(f"weights must be positive, got ({self.m1}, {self.m2})")

    @property
    def M(self) -> Fraction:
        return self.m1 + self.m2

    @cached_property
    def denom(self) -> int:
        return lcm(self.m1.denominator, self.m2.denominator)

    @cached_property
    def level_x(self) -> int:
        """Integer level of the monomial x."""
        return int(self.m1 * self.denom)

    @cached_property
    def level_y(self) -> int:
        return int(self.m2 * self.denom)

    @property
    def frame_margin(self) -> int:
        """Levels lost by one partial derivative: max(level_x, level_y)."""
        return max(self.level_x, self.level_y)

    def level(self, mono: Monomial) -> int:
        return self.level_x * mono[0] + self.level_y * mono[1]

    def quasidegree(self, mono: Monomial) -> Fraction:
        return self.m1 * mono[0] + self.m2 * mono[1]

    def level_of(self, quasidegree) -> int:
        """Largest integer level not exceeding the given quasidegree."""
        return int(Fraction(quasidegree) * self.denom)

    def monomials_at(self, level: int) -> List[Monomial]:
        """All monomials of the given level, larger x-power first."""
        if level < 0:
            return []
        found = []
        for ex in range(level // self.level_x, -1, -1):
            rest = level - ex * self.level_x
            if rest % self.level_y == 0:
                found.append((ex, rest // self.level_y))
        return found

    def to_json(self) -> List[str]:
        from .rational import format_rational
        return [format_rational(self.m1), format_rational(self.m2)]

    def __str__(self) -> str:
        return f"({self.m1}, {self.m2})"


# weights of the A1 boundary normal form x + y^2 and of the Morse form x^2 + y^2
A1_WEIGHTS = WeightSystem(Fraction(1), Fraction(1, 2))
MORSE_WEIGHTS = WeightSystem(Fraction(1, 2), Fraction(1, 2))


def parse_weights(text: str) -> WeightSystem:
    """Parse a command-line weight override such as "1,1/2" or "1:1/2"."""
    from .rational import parse_rational
    for separator in (',', ':', ' '):
        if separator in text.strip():
            parts = [p for p in text.strip().split(separator) if p]
            break
    else:
        raise MalformedInputError(f"weights must be given as m1,m2 (got {text!r})")
    if len(parts) != 2:
        raise MalformedInputError(f"weights must be given as m1,m2 (got {text!r})")
    return WeightSystem(parse_rational(parts[0]), parse_rational(parts[1]))
