"""Dyadic points, dyadic intervals and the digit-wise XOR on them.

Points live on a fixed grid of resolution ``M``: the point ``idx * 2**-M``
is stored as the integer ``idx``, so its binary digits are just the bits of
``idx`` and the dyadic XOR becomes integer XOR. Intervals
``[2**-k * l, 2**-k * (l + 1))`` are stored as ``(k, l)``; ``k`` may be
negative, which is what frequency intervals inside ``[0, 2**M)`` need.

Exact scalars are :class:`fractions.Fraction` throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ExactScalar",
    "DyadicError",
    "ResolutionMismatch",
    "ScaleMismatch",
    "DyadicPoint",
    "DyadicInterval",
    "xor_points",
    "xor_intervals",
    "halves",
    "to_fraction",
]

ExactScalar = Fraction


class DyadicError(ValueError):
    """Base class for invalid dyadic objects or operations."""


class ResolutionMismatch(DyadicError):
    pass


class ScaleMismatch(DyadicError):
    pass


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused on purpose: a silent float would poison exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


@dataclass(frozen=True, order=True)
class DyadicPoint:
    """The grid point ``idx * 2**-M`` in ``[0, 1)``."""

    M: int
    idx: int

    def __post_init__(self):
        if self.M < 0:
            raise DyadicError(f"resolution must be nonnegative, got {self.M}")
        if not 0 <= self.idx < (1 << self.M):
            raise DyadicError(f"index {self.idx} outside [0, 2**{self.M})")

    @classmethod
    def from_value(cls, x, M: int) -> "DyadicPoint":
        x = to_fraction(x)
        scaled = x * (1 << M)
        if scaled.denominator != 1:
            raise DyadicError(f"{x} is not a multiple of 2**-{M}")
        return cls(M, int(scaled))

    @property
    def value(self) -> Fraction:
        return Fraction(self.idx, 1 << self.M)

    def digit(self, j: int) -> int:
        """Binary digit ``x_j`` of ``x = sum x_j 2**j``; zero outside the grid."""
        if j >= 0 or -j > self.M:
            return 0
        return (self.idx >> (self.M + j)) & 1

    def digits(self) -> list[int]:
        """Fractional digits ``[x_{-1}, ..., x_{-M}]``."""
        return [self.digit(-i) for i in range(1, self.M + 1)]

    def refine(self, M: int) -> "DyadicPoint":
        if M < self.M:
            raise ResolutionMismatch("cannot coarsen a point")
        return DyadicPoint(M, self.idx << (M - self.M))


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``[2**-k * l, 2**-k * (l + 1))``."""

    k: int
    l: int

    def __post_init__(self):
        if self.l < 0:
            raise DyadicError(f"interval index must be nonnegative, got {self.l}")

    @classmethod
    def from_endpoints(cls, left, right) -> "DyadicInterval":
        left, right = to_fraction(left), to_fraction(right)
        length = right - left
        if length <= 0:
            raise DyadicError(f"empty interval [{left}, {right})")
        k = 0
        while length < 1:
            length *= 2
            k += 1
        while length > 1:
            length /= 2
            k -= 1
        if length != 1:
            raise DyadicError(f"length {right - left} is not a power of two")
        l = left * _pow2(k)
        if l.denominator != 1:
            raise DyadicError(f"[{left}, {right}) is not dyadic")
        return cls(k, int(l))

    @property
    def length(self) -> Fraction:
        return _pow2(-self.k)

    @property
    def left(self) -> Fraction:
        return self.l * _pow2(-self.k)

    @property
    def right(self) -> Fraction:
        return (self.l + 1) * _pow2(-self.k)

    def halves(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return DyadicInterval(self.k + 1, 2 * self.l), DyadicInterval(self.k + 1, 2 * self.l + 1)

    def contains_interval(self, other: "DyadicInterval") -> bool:
        if other.k < self.k:
            return False
        return other.l >> (other.k - self.k) == self.l

    def in_unit(self) -> bool:
        return self.k >= 0 and self.l < (1 << self.k)

    def cells(self, M: int) -> range:
        """Grid indices at resolution ``M`` lying in this interval (``I`` inside ``[0, 1)``)."""
        if not self.in_unit():
            raise DyadicError(f"{self} is not contained in [0, 1)")
        if self.k > M:
            raise ResolutionMismatch(f"interval of scale {self.k} is finer than the 2**-{M} grid")
        width = 1 << (M - self.k)
        return range(self.l * width, (self.l + 1) * width)

    def contains_point(self, x: DyadicPoint) -> bool:
        # x * 2**k in [l, l + 1)
        if self.k >= 0:
            if self.k <= x.M:
                return x.idx >> (x.M - self.k) == self.l
            return (x.idx << (self.k - x.M)) == self.l
        return self.l == 0

    def __str__(self) -> str:
        return f"[{self.left}, {self.right})"


def xor_points(a: DyadicPoint, b: DyadicPoint) -> DyadicPoint:
    if a.M != b.M:
        raise ResolutionMismatch(f"resolutions differ: {a.M} != {b.M}")
    return DyadicPoint(a.M, a.idx ^ b.idx)


def xor_intervals(I: DyadicInterval, J: DyadicInterval) -> DyadicInterval:
    if I.k != J.k:
        raise ScaleMismatch(f"interval scales differ: {I.k} != {J.k}")
    return DyadicInterval(I.k, I.l ^ J.l)


def halves(I: DyadicInterval) -> tuple[DyadicInterval, DyadicInterval]:
    return I.halves()
