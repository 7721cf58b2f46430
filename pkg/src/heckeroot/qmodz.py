"""Exact elements of Q/Z.

Character values live here instead of in the complex numbers: every
comparison of root-of-unity data is then an integer identity, and floats
only appear when a Gauss sum is actually accumulated.
"""

from __future__ import annotations

import cmath
from math import gcd


class QmodZ:
    """A residue num/den modulo 1, kept reduced with 0 <= num < den."""

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int = 1):
        if den <= 0:
            raise ValueError("denominator must be positive")
        num %= den
        g = gcd(num, den)
        self.num = num // g
        self.den = den // g

    def __add__(self, other: "QmodZ") -> "QmodZ":
        if not isinstance(other, QmodZ):
            return NotImplemented
        return QmodZ(self.num * other.den + other.num * self.den,
                     self.den * other.den)

    def __radd__(self, other):
        # lets sum() start from 0
        if other == 0:
            return self
        return NotImplemented

    def __neg__(self) -> "QmodZ":
        return QmodZ(-self.num, self.den)

    def __sub__(self, other: "QmodZ") -> "QmodZ":
        return self + (-other)

    def __mul__(self, k: int) -> "QmodZ":
        if not isinstance(k, int):
            return NotImplemented
        return QmodZ(self.num * k, self.den)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, QmodZ):
            return self.num == other.num and self.den == other.den
        if other == 0:
            return self.num == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self) -> bool:
        return self.num != 0

    @property
    def order(self) -> int:
        """Order of exp(2*pi*i*self) as a root of unity."""
        return self.den

    def exp(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.num / self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"

    def __repr__(self) -> str:
        return f"QmodZ({self.num}, {self.den})"


ZERO = QmodZ(0, 1)
HALF = QmodZ(1, 2)
QUARTER = QmodZ(1, 4)


def complexify(q: QmodZ) -> complex:
    """Unit complex number exp(2*pi*i*q)."""
    return q.exp()
