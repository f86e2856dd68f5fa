"""Exact scalars: rationals, plus certified rational intervals.

Everything downstream (measures, characters, the metric) works with plain
:class:`fractions.Fraction` whenever the data is rational.  Irrational
Perron data is carried as a :class:`RatInterval`, an interval with exact
rational endpoints; arithmetic widens outward by construction (no rounding
is involved), so every reported interval genuinely contains the true value
and its width is surfaced rather than hidden.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x) -> "RatInterval":
        x = Fraction(x)
        return RatInterval(x, x)

    @staticmethod
    def of(x) -> "RatInterval":
        return x if isinstance(x, RatInterval) else RatInterval.point(x)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = RatInterval.of(other)
        return RatInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-RatInterval.of(other))

    def __rsub__(self, other):
        return RatInterval.of(other) + (-self)

    def __mul__(self, other):
        o = RatInterval.of(other)
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RatInterval(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatInterval.of(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * RatInterval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return RatInterval.of(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return RatInterval.point(1) / self ** (-e)
        acc = RatInterval.point(1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RatInterval(Fraction(0), max(-self.lo, self.hi))

    # -- queries ---------------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other) -> bool:
        o = RatInterval.of(other)
        return self.lo <= o.hi and o.lo <= self.hi

    def definitely_positive(self) -> bool:
        return self.lo > 0

    def definitely_negative(self) -> bool:
        return self.hi < 0

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


Value = Union[Fraction, RatInterval]


def is_exact(x: Value) -> bool:
    return not isinstance(x, RatInterval)


def val_width(x: Value) -> Fraction:
    return x.width if isinstance(x, RatInterval) else Fraction(0)


def val_float(x: Value) -> float:
    return float(x.mid) if isinstance(x, RatInterval) else float(x)


def val_eq(x: Value, y: Value) -> bool:
    """Exact equality for rationals; consistency (overlap) when intervals enter."""
    if isinstance(x, RatInterval) or isinstance(y, RatInterval):
        return RatInterval.of(x).overlaps(RatInterval.of(y))
    return x == y


def val_pow(x: Value, e: int) -> Value:
    return x ** e
