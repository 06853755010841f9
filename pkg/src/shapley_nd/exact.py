"""Exact numbers: rationals extended by a formal positive infinitesimal."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

Number = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected int, Fraction or str, got {type(x).__name__}")


@lru_cache(maxsize=None)
def harmonic(j: int) -> Fraction:
    """The j-th harmonic number 1 + 1/2 + ... + 1/j (H_0 = 0)."""
    if j < 0:
        raise ValueError("harmonic number index must be non-negative")
    if j == 0:
        return Fraction(0)
    return harmonic(j - 1) + Fraction(1, j)


@dataclass(frozen=True, order=True)
class EpsCost:
    """The value ``a + b*eps`` for an infinitesimal ``eps > 0``.

    Field order makes the generated comparisons lexicographic on ``(a, b)``,
    which is the order of ``a + b*eps`` for every small enough ``eps``.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))

    @classmethod
    def of(cls, x) -> "EpsCost":
        if isinstance(x, EpsCost):
            return x
        return cls(_frac(x), Fraction(0))

    @classmethod
    def zero(cls) -> "EpsCost":
        return _ZERO

    def is_positive(self) -> bool:
        return self.a > 0 or (self.a == 0 and self.b > 0)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return EpsCost(self.a + other, self.b)
        if not isinstance(other, EpsCost):
            return NotImplemented
        return EpsCost(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return EpsCost(self.a - other, self.b)
        if not isinstance(other, EpsCost):
            return NotImplemented
        return EpsCost(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return EpsCost(-self.a, -self.b)

    def __mul__(self, k):
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return EpsCost(self.a * k, self.b * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return EpsCost(self.a / k, self.b / k)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        sign = "+" if self.b > 0 else "-"
        mag = abs(self.b)
        coeff = "" if mag == 1 else f"{mag}*"
        return f"{self.a}{sign}{coeff}eps"

    def __repr__(self):
        return f"EpsCost({self.a}, {self.b})"


_ZERO = EpsCost(Fraction(0), Fraction(0))


def sum_costs(values) -> EpsCost:
    a = Fraction(0)
    b = Fraction(0)
    for v in values:
        a += v.a
        b += v.b
    return EpsCost(a, b)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Ratio:
    """Quotient of two EpsCosts with a positive denominator.

    ``limit`` is the value as eps -> 0+; ``direction`` is -1, 0 or +1 according
    to whether the quotient sits below, at, or above that limit for small eps.
    """

    num: EpsCost
    den: EpsCost

    def __post_init__(self):
        if not self.den.is_positive():
            raise ValueError(f"ratio denominator must be positive, got {self.den}")

    @property
    def limit(self) -> Fraction:
        if self.den.a == 0:
            if self.num.a != 0:
                raise ValueError("ratio diverges as eps -> 0")
            return self.num.b / self.den.b
        return self.num.a / self.den.a

    @property
    def direction(self) -> int:
        n, d = self.num, self.den
        if d.a == 0:
            # b1 eps / b2 eps is constant
            return 0
        return _sign(n.b * d.a - n.a * d.b)

    def _cross(self, other: "Ratio"):
        # Compare n1/d1 with n2/d2 via n1*d2 - n2*d1 as a polynomial in eps.
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        c0 = n1.a * d2.a - n2.a * d1.a
        c1 = n1.a * d2.b + n1.b * d2.a - n2.a * d1.b - n2.b * d1.a
        c2 = n1.b * d2.b - n2.b * d1.b
        return (c0, c1, c2)

    def __lt__(self, other):
        return self._cross(other) < (0, 0, 0)

    def __le__(self, other):
        return self._cross(other) <= (0, 0, 0)

    def __gt__(self, other):
        return self._cross(other) > (0, 0, 0)

    def __ge__(self, other):
        return self._cross(other) >= (0, 0, 0)

    def same_value(self, other) -> bool:
        return self._cross(other) == (0, 0, 0)

    def __str__(self):
        arrow = {-1: " (from below)", 0: "", 1: " (from above)"}[self.direction]
        return f"{self.limit}{arrow}"
