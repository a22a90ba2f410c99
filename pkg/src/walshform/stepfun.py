"""Dyadic step functions, L-infinity normalized Walsh wave packets and brackets.

A step function of resolution ``M`` is constant on the cells
``[i 2**-M, (i+1) 2**-M)``. 2-D functions are stored as a ``2**M x 2**M``
grid with row index = y-cell and column index = x-cell.

Wave packets follow the Paley pairing: on an interval ``I`` of length
``2**-k``, bit ``j`` of the frequency ``n`` is paired with binary digit
``j + k + 1`` of ``x``. In local coordinates (cell offset ``r`` inside ``I``,
``L = M - k`` bits) that is ``parity(n & bitreverse_L(r))``, which is why
the fast transform below is the natural-order Hadamard butterfly followed
by a bit-reversal permutation of the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .dyadic import DyadicError, DyadicInterval, DyadicPoint, ResolutionMismatch, to_fraction

__all__ = [
    "StepFun1D",
    "StepFun2D",
    "walsh_packet_value",
    "haar_value",
    "sign_table",
    "bracket_1d",
    "bracket_x",
    "bracket_y",
    "fwht_all_coeffs",
    "walsh_coeffs_segment",
    "wf_expand",
    "norms",
    "packet_table",
]

ZERO = Fraction(0)


def _check_pow2_len(n: int) -> int:
    if n <= 0 or n & (n - 1):
        raise DyadicError(f"length {n} is not a power of two")
    return n.bit_length() - 1


@dataclass(frozen=True)
class StepFun1D:
    M: int
    values: tuple

    def __post_init__(self):
        vals = tuple(to_fraction(v) for v in self.values)
        if len(vals) != 1 << self.M:
            raise DyadicError(f"expected {1 << self.M} values, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, M: int) -> "StepFun1D":
        return cls(M, (ZERO,) * (1 << M))

    @classmethod
    def indicator(cls, I: DyadicInterval, M: int) -> "StepFun1D":
        cells = I.cells(M)
        return cls(M, tuple(Fraction(int(i in cells)) for i in range(1 << M)))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def integral(self) -> Fraction:
        return sum(self.values, ZERO) / (1 << self.M)

    def supported_on(self, I: DyadicInterval) -> bool:
        cells = I.cells(self.M)
        return all(v == 0 for i, v in enumerate(self.values) if i not in cells)


@dataclass(frozen=True, eq=False)
class StepFun2D:
    """Real step function on ``[0, 1)**2`` at resolution ``M``; ``grid[y][x]``."""

    M: int
    grid: tuple

    def __post_init__(self):
        side = 1 << self.M
        rows = tuple(tuple(to_fraction(v) for v in row) for row in self.grid)
        if len(rows) != side or any(len(r) != side for r in rows):
            raise DyadicError(f"grid must be {side} x {side}")
        object.__setattr__(self, "grid", rows)

    def __eq__(self, other):
        if not isinstance(other, StepFun2D):
            return NotImplemented
        return self.M == other.M and self.grid == other.grid

    def __hash__(self):
        return hash((self.M, self.grid))

    @property
    def side(self) -> int:
        return 1 << self.M

    @classmethod
    def zeros(cls, M: int) -> "StepFun2D":
        return cls.constant(M, 0)

    @classmethod
    def constant(cls, M: int, c) -> "StepFun2D":
        c = to_fraction(c)
        side = 1 << M
        return cls(M, tuple((c,) * side for _ in range(side)))

    @classmethod
    def from_function(cls, M: int, fn: Callable[[int, int], object]) -> "StepFun2D":
        """Build from ``fn(x_idx, y_idx)``."""
        side = 1 << M
        return cls(M, tuple(tuple(fn(x, y) for x in range(side)) for y in range(side)))

    @classmethod
    def indicator(cls, I: DyadicInterval, J: DyadicInterval, M: int, c=1) -> "StepFun2D":
        xs, ys = I.cells(M), J.cells(M)
        c = to_fraction(c)
        return cls.from_function(M, lambda x, y: c if (x in xs and y in ys) else ZERO)

    def __call__(self, x: int, y: int) -> Fraction:
        return self.grid[y][x]

    def row(self, y: int) -> StepFun1D:
        return StepFun1D(self.M, self.grid[y])

    def column(self, x: int) -> StepFun1D:
        return StepFun1D(self.M, tuple(r[x] for r in self.grid))

    def cells(self) -> Iterable[Fraction]:
        for row in self.grid:
            yield from row

    def scale(self, c) -> "StepFun2D":
        c = to_fraction(c)
        return StepFun2D(self.M, tuple(tuple(c * v for v in row) for row in self.grid))

    def __add__(self, other: "StepFun2D") -> "StepFun2D":
        if self.M != other.M:
            raise ResolutionMismatch(f"{self.M} != {other.M}")
        return StepFun2D(
            self.M, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.grid, other.grid))
        )

    def refine(self, M: int) -> "StepFun2D":
        """Same function written on the finer ``2**-M`` grid."""
        if M < self.M:
            raise ResolutionMismatch("cannot coarsen a step function")
        sh = M - self.M
        return StepFun2D.from_function(M, lambda x, y: self.grid[y >> sh][x >> sh])

    def integral(self) -> Fraction:
        return sum(self.cells(), ZERO) / (1 << (2 * self.M))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.cells())

    def as_int_grid(self) -> tuple[list[list[int]], int]:
        """``(G, D)`` with integer ``G`` and ``self == G / D`` cellwise."""
        D = 1
        for v in self.cells():
            D = D * v.denominator // math.gcd(D, v.denominator)
        return [[int(v * D) for v in row] for row in self.grid], D

    def to_strings(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.grid]

    @classmethod
    def from_strings(cls, M: int, rows: Sequence[Sequence[str]]) -> "StepFun2D":
        return cls(M, tuple(tuple(Fraction(str(v)) for v in row) for row in rows))


# -- wave packets ------------------------------------------------------------


def walsh_packet_value(I: DyadicInterval, n: int, x: DyadicPoint) -> Fraction:
    """``w_{I,n}(x)``, evaluated at the grid point ``x`` itself."""
    if n < 0:
        raise DyadicError("frequency must be nonnegative")
    if x.M < I.k + n.bit_length():
        raise ResolutionMismatch(
            f"point resolution {x.M} too coarse for scale {I.k} and frequency {n}"
        )
    if not I.contains_point(x):
        return ZERO
    parity = 0
    j = 0
    while n >> j:
        if (n >> j) & 1:
            parity ^= x.digit(-j - I.k - 1)
        j += 1
    return Fraction(-1 if parity else 1)


def haar_value(I: DyadicInterval, x: DyadicPoint) -> Fraction:
    """``h_I(x)``: +1 on the left half, -1 on the right half, 0 elsewhere."""
    left, right = I.halves()
    if left.contains_point(x):
        return Fraction(1)
    if right.contains_point(x):
        return Fraction(-1)
    return ZERO


def _bitrev(r: int, L: int) -> int:
    out = 0
    for _ in range(L):
        out = (out << 1) | (r & 1)
        r >>= 1
    return out


@lru_cache(maxsize=None)
def sign_table(L: int) -> tuple[tuple[int, ...], ...]:
    """``table[n][r]`` = sign of the packet of frequency ``n`` at local cell ``r`` (``2**L`` cells)."""
    N = 1 << L
    rev = [_bitrev(r, L) for r in range(N)]
    return tuple(
        tuple(-1 if bin(n & rev[r]).count("1") & 1 else 1 for r in range(N)) for n in range(N)
    )


def _check_bracket_domain(M: int, I: DyadicInterval) -> None:
    if not I.in_unit():
        raise DyadicError(f"{I} is not contained in [0, 1)")
    if I.k > M:
        raise ResolutionMismatch(f"{I} is finer than the 2**-{M} grid")


def bracket_1d(f: StepFun1D, I: DyadicInterval, n: int) -> Fraction:
    """``(1/|I|) * integral over I of f * w_{I,n}``, summed cell by cell from the definition."""
    _check_bracket_domain(f.M, I)
    if n >= 1 << (f.M - I.k):
        # top bit of n pairs with a digit below the grid: each cell integrates to zero
        return ZERO
    total = ZERO
    for c in I.cells(f.M):
        v = f.values[c]
        if v:
            total += v * walsh_packet_value(I, n, DyadicPoint(f.M, c))
    return total / (1 << (f.M - I.k))


def bracket_x(F: StepFun2D, I: DyadicInterval, n: int) -> StepFun1D:
    """x-bracket of every row: a function of y."""
    return StepFun1D(F.M, tuple(bracket_1d(F.row(y), I, n) for y in range(F.side)))


def bracket_y(F: StepFun2D, J: DyadicInterval, n: int) -> StepFun1D:
    """y-bracket of every column: a function of x."""
    return StepFun1D(F.M, tuple(bracket_1d(F.column(x), J, n) for x in range(F.side)))


def walsh_coeffs_segment(seg: Sequence) -> list:
    """All normalized Walsh coefficients of the local segment ``seg`` (length ``2**L``).

    Natural-order Hadamard butterflies, then the bit-reversal permutation
    that turns Hadamard order into the packet frequency order.
    """
    N = len(seg)
    L = _check_pow2_len(N)
    a = list(seg)
    h = 1
    while h < N:
        for i in range(0, N, 2 * h):
            for j in range(i, i + h):
                u, v = a[j], a[j + h]
                a[j], a[j + h] = u + v, u - v
        h *= 2
    return [Fraction(a[_bitrev(n, L)]) / N for n in range(N)]


def fwht_all_coeffs(f: StepFun1D, I: DyadicInterval) -> list[Fraction]:
    """``[bracket_1d(f, I, n) for n in range(2**(M-k))]`` in ``O(N log N)``."""
    _check_bracket_domain(f.M, I)
    cells = I.cells(f.M)
    return walsh_coeffs_segment(f.values[cells.start:cells.stop])


def wf_expand(f: StepFun1D, I: DyadicInterval) -> StepFun1D:
    """Rebuild ``f`` on ``I`` as the finite sum of its Walsh-Fourier series."""
    if not f.supported_on(I):
        raise DyadicError(f"function is not supported on {I}")
    coeffs = fwht_all_coeffs(f, I)
    out = [ZERO] * len(f)
    for c in I.cells(f.M):
        x = DyadicPoint(f.M, c)
        out[c] = sum((a * walsh_packet_value(I, n, x) for n, a in enumerate(coeffs) if a), ZERO)
    return StepFun1D(f.M, tuple(out))


def norms(F: StepFun2D) -> tuple[Fraction, Fraction]:
    """``(||F||_2**2, ||F||_4**4)``; even powers keep everything rational."""
    sq = sum((v * v for v in F.cells()), ZERO)
    quart = sum((v**4 for v in F.cells()), ZERO)
    area = 1 << (2 * F.M)
    return sq / area, quart / area


def packet_table(I: DyadicInterval, M: int) -> list[list[int]]:
    """``table[n][i] = w_{I,n}`` on the ``i``-th grid cell of ``I``, for every ``n < 2**(M-k)``."""
    _check_bracket_domain(M, I)
    cells = I.cells(M)
    return [
        [int(walsh_packet_value(I, n, DyadicPoint(M, c))) for c in cells]
        for n in range(len(cells))
    ]
