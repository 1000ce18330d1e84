"""Occurrence intervals and the five basic multiplicities.

An interval ``[lo; hi]`` is a nonempty set of consecutive natural numbers;
``hi`` may be infinite.  Schemas restrict themselves to the five basic
multiplicities (zero, optional, exactly-one, plus, star), but the analysis
code keeps exact intervals around because several inference steps need the
raw minima and maxima rather than their clipped basic forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Union

INF = math.inf

Count = Union[int, float]  # naturals, with math.inf allowed as upper bound


@dataclass(frozen=True, order=False)
class Interval:
    """A nonempty range ``[lo; hi]`` of natural numbers, ``hi`` possibly infinite."""

    lo: int
    hi: Count

    def __post_init__(self) -> None:
        if not isinstance(self.lo, int) or self.lo < 0:
            raise ValueError(f"interval minimum must be a natural number, got {self.lo!r}")
        if self.hi != INF and (not isinstance(self.hi, int) or self.hi < 0):
            raise ValueError(f"interval maximum must be a natural or infinity, got {self.hi!r}")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}; {self.hi}]")

    @classmethod
    def fit(cls, counts: Iterable[int]) -> "Interval":
        """Smallest interval containing every element of a nonempty count set."""
        counts = list(counts)
        if not counts:
            raise ValueError("empty occurrence set")
        return cls(min(counts), max(counts))

    def __contains__(self, count: int) -> bool:
        return self.lo <= count <= self.hi

    def add(self, other: "Interval") -> "Interval":
        hi = INF if INF in (self.hi, other.hi) else self.hi + other.hi
        return Interval(self.lo + other.lo, hi)

    def __add__(self, other: "Interval") -> "Interval":
        return self.add(other)

    def issubset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def hull(self, other: "Interval") -> "Interval":
        """Smallest interval containing both operands."""
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __str__(self) -> str:
        hi = "inf" if self.hi == INF else str(self.hi)
        return f"[{self.lo};{hi}]"


class Multiplicity(enum.Enum):
    """The five basic multiplicities used as schema arities."""

    ZERO = (0, 0)
    OPT = (0, 1)
    ONE = (1, 1)
    PLUS = (1, INF)
    STAR = (0, INF)

    @property
    def interval(self) -> Interval:
        lo, hi = self.value
        return Interval(lo, hi)

    @property
    def lo(self) -> int:
        return self.value[0]

    @property
    def hi(self) -> Count:
        return self.value[1]

    @property
    def is_infinite(self) -> bool:
        return self.hi == INF

    def __contains__(self, count: int) -> bool:
        return count in self.interval

    @classmethod
    def from_interval(cls, interval: Interval) -> "Multiplicity":
        """Exact conversion; raises for intervals that are not basic."""
        for mult in cls:
            if mult.value == (interval.lo, interval.hi):
                return mult
        raise ValueError(f"{interval} is not a basic multiplicity")

    @classmethod
    def containing(cls, interval: Interval) -> "Multiplicity":
        """Smallest basic multiplicity whose interval contains ``interval``."""
        for mult in _BY_SIZE:
            if interval.issubset(mult.interval):
                return mult
        raise AssertionError("STAR contains every interval")

    @classmethod
    def fit(cls, counts: Iterable[int]) -> "Multiplicity":
        """Smallest basic multiplicity containing every element of a count set."""
        return cls.containing(Interval.fit(counts))

    def __str__(self) -> str:
        return _SYMBOLS[self]


# Inclusion-minimal scan order: [0;0] and [1;1] precede [0;1]; all precede the
# infinite ones.
_BY_SIZE = (
    Multiplicity.ZERO,
    Multiplicity.ONE,
    Multiplicity.OPT,
    Multiplicity.PLUS,
    Multiplicity.STAR,
)

_SYMBOLS = {
    Multiplicity.ZERO: "0",
    Multiplicity.OPT: "?",
    Multiplicity.ONE: "1",
    Multiplicity.PLUS: "+",
    Multiplicity.STAR: "*",
}

MULTIPLICITY_BY_SYMBOL = {sym: mult for mult, sym in _SYMBOLS.items()}


def fit_interval(counts: Iterable[int]) -> Interval:
    return Interval.fit(counts)


def fit_multiplicity(counts: Iterable[int]) -> Multiplicity:
    return Multiplicity.fit(counts)
