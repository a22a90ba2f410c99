from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from walshform.dyadic import (
    DyadicInterval,
    DyadicPoint,
    ResolutionMismatch,
    ScaleMismatch,
    halves,
    xor_intervals,
    xor_points,
)


def P(x, M=2):
    return DyadicPoint.from_value(Fraction(x), M)


def test_xor_points_examples():
    assert xor_points(P("3/4"), P("1/4")) == P("1/2")
    for i in range(4):
        x = DyadicPoint(2, i)
        assert xor_points(x, x) == DyadicPoint(2, 0)
        assert xor_points(x, DyadicPoint(2, 0)) == x


def test_xor_points_resolution_mismatch():
    with pytest.raises(ResolutionMismatch):
        xor_points(DyadicPoint(2, 1), DyadicPoint(3, 1))


def test_xor_intervals_examples():
    a = DyadicInterval.from_endpoints("1/4", "1/2")
    b = DyadicInterval.from_endpoints("3/4", 1)
    assert xor_intervals(a, b) == DyadicInterval.from_endpoints("1/2", "3/4")
    assert xor_intervals(a, a) == DyadicInterval(2, 0)
    assert xor_intervals(a, DyadicInterval(2, 0)) == a
    with pytest.raises(ScaleMismatch):
        xor_intervals(DyadicInterval(1, 0), DyadicInterval(2, 0))


def test_halves():
    unit = DyadicInterval(0, 0)
    assert halves(unit) == (DyadicInterval.from_endpoints(0, "1/2"), DyadicInterval.from_endpoints("1/2", 1))
    I0, I1 = halves(DyadicInterval.from_endpoints("1/2", "3/4"))
    assert (I0.left, I0.right, I1.left, I1.right) == (Fraction(1, 2), Fraction(5, 8), Fraction(5, 8), Fraction(3, 4))
    quarters = [q for h in halves(unit) for q in halves(h)]
    assert [(q.left, q.right) for q in quarters] == [(Fraction(i, 4), Fraction(i + 1, 4)) for i in range(4)]


def test_interval_lengths_and_negative_scale():
    big = DyadicInterval(-3, 1)
    assert big.length == 8 and big.left == 8 and big.right == 16
    assert not big.in_unit()
    assert DyadicInterval.from_endpoints(4, 8) == DyadicInterval(-2, 1)


def test_digits_roundtrip():
    for M in range(5):
        for idx in range(1 << M):
            x = DyadicPoint(M, idx)
            assert sum(Fraction(d, 2 ** (i + 1)) for i, d in enumerate(x.digits())) == x.value


@pytest.mark.parametrize("M", range(5))
def test_xor_group_laws_exhaustive(M):
    pts = [DyadicPoint(M, i) for i in range(1 << M)]
    for a, b in product(pts, repeat=2):
        assert xor_points(a, b) == xor_points(b, a)
        if M <= 3:
            for c in pts:
                assert xor_points(xor_points(a, b), c) == xor_points(a, xor_points(b, c))


@pytest.mark.parametrize("M", range(5))
def test_translation_is_bijection_and_preserves_dyadic_intervals(M):
    for a in range(1 << M):
        image = sorted(a ^ b for b in range(1 << M))
        assert image == list(range(1 << M))
        for k in range(M + 1):
            for l in range(1 << k):
                cells = DyadicInterval(k, l).cells(M)
                moved = {(a ^ c) >> (M - k) for c in cells}
                assert len(moved) == 1  # translate of a dyadic interval is one dyadic interval


fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)


@given(fractions, fractions, fractions)
def test_exact_scalar_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a * b).denominator > 0
