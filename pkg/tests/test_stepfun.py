import random
from fractions import Fraction
from itertools import product

import pytest

from walshform.dyadic import DyadicError, DyadicInterval, DyadicPoint, ResolutionMismatch, xor_intervals, xor_points
from walshform.stepfun import (
    StepFun1D,
    StepFun2D,
    bracket_1d,
    bracket_x,
    bracket_y,
    fwht_all_coeffs,
    haar_value,
    norms,
    walsh_packet_value,
    wf_expand,
)

UNIT = DyadicInterval(0, 0)


def intervals(M):
    for k in range(M + 1):
        for l in range(1 << k):
            yield DyadicInterval(k, l)


def test_packet_value_examples():
    for i in range(4):
        assert walsh_packet_value(UNIT, 0, DyadicPoint(2, i)) == 1
    assert walsh_packet_value(UNIT, 1, DyadicPoint.from_value("1/4", 2)) == 1
    assert walsh_packet_value(UNIT, 1, DyadicPoint.from_value("3/4", 2)) == -1
    assert walsh_packet_value(UNIT, 2, DyadicPoint.from_value("1/4", 2)) == -1


def test_packet_value_outside_interval_and_resolution_error():
    I = DyadicInterval(1, 1)
    assert walsh_packet_value(I, 1, DyadicPoint(2, 0)) == 0
    with pytest.raises(ResolutionMismatch):
        walsh_packet_value(UNIT, 4, DyadicPoint(2, 0))


def test_bracket_1d_examples():
    f = StepFun1D.indicator(DyadicInterval(1, 0), 2)
    assert bracket_1d(f, UNIT, 0) == Fraction(1, 2)
    assert bracket_1d(f, UNIT, 1) == Fraction(1, 2)
    # hand cell sum at M=2: values (1,1,0,0) against signs (+,-,+,-)
    assert bracket_1d(f, UNIT, 2) == 0


def test_bracket_domain_errors():
    f = StepFun1D.zeros(2)
    with pytest.raises(DyadicError):
        bracket_1d(f, DyadicInterval(0, 1), 0)
    with pytest.raises(ResolutionMismatch):
        bracket_1d(f, DyadicInterval(3, 0), 0)


def test_bracket_x_and_y_examples(rng):
    M = 2
    g = [Fraction(rng.randint(-5, 5), 2) for _ in range(4)]
    G = StepFun2D.from_function(M, lambda x, y: g[y])
    assert bracket_x(StepFun2D.zeros(M), UNIT, 1).values == (0,) * 4
    for I in intervals(M):
        assert bracket_x(G, I, 0).values == tuple(g)
        for n in range(1, 1 << (M - I.k)):
            assert bracket_x(G, I, n).values == (0,) * 4
    one = StepFun2D.constant(M, 1)
    assert bracket_y(one, UNIT, 0).values == (1,) * 4
    assert bracket_y(one, UNIT, 1).values == (0,) * 4
    H = StepFun2D.from_function(M, lambda x, y: haar_value(UNIT, DyadicPoint(M, y)))
    assert bracket_y(H, UNIT, 1).values == (1,) * 4


def test_fwht_constant():
    f = StepFun1D(3, [Fraction(5, 3)] * 8)
    for I in intervals(3):
        c = fwht_all_coeffs(f, I)
        assert c[0] == Fraction(5, 3) and all(v == 0 for v in c[1:])


@pytest.mark.parametrize("M", range(5))
def test_fwht_matches_direct_sum_exhaustive(M, rng):
    for _ in range(3):
        f = StepFun1D(M, [Fraction(rng.randint(-9, 9), rng.choice([1, 3, 4])) for _ in range(1 << M)])
        for I in intervals(M):
            fast = fwht_all_coeffs(f, I)
            assert fast == [bracket_1d(f, I, n) for n in range(1 << (M - I.k))]


@pytest.mark.parametrize("M", range(5))
def test_parseval(M, rng):
    for I in intervals(M):
        cells = I.cells(M)
        f = StepFun1D(M, [Fraction(rng.randint(-9, 9), 2) if i in cells else 0 for i in range(1 << M)])
        lhs = sum(c * c for c in fwht_all_coeffs(f, I))
        rhs = sum(f[i] ** 2 for i in cells) / len(cells)
        assert lhs == rhs


def test_wf_expand(rng):
    M = 3
    assert wf_expand(StepFun1D.zeros(M), UNIT) == StepFun1D.zeros(M)
    I = DyadicInterval(1, 1)
    for n in range(4):
        w = StepFun1D(M, [walsh_packet_value(I, n, DyadicPoint(M, c)) for c in range(8)])
        assert wf_expand(w, I) == w
    for _ in range(10):
        for J in intervals(M):
            cells = J.cells(M)
            f = StepFun1D(M, [Fraction(rng.randint(-20, 20), rng.randint(1, 7)) if i in cells else 0 for i in range(8)])
            assert wf_expand(f, J) == f
    with pytest.raises(DyadicError):
        wf_expand(StepFun1D(M, [1] * 8), I)


def test_norms_examples():
    assert norms(StepFun2D.constant(2, 1)) == (1, 1)
    assert norms(StepFun2D.zeros(2)) == (0, 0)
    F = StepFun2D.indicator(DyadicInterval(1, 0), UNIT, 2, c=2)
    assert norms(F) == (2, 8)


# wave-packet algebra; the acceptance module runs the larger exhaustive sweeps


def test_w1_w5_orthogonality_exhaustive_m3():
    M = 3
    for I in intervals(M):
        N = 1 << (M - I.k)
        pts = [DyadicPoint(M, c) for c in I.cells(M)]
        for n1, n2 in product(range(N), repeat=2):
            for x in pts:
                assert walsh_packet_value(I, n1, x) * walsh_packet_value(I, n2, x) == walsh_packet_value(I, n1 ^ n2, x)
            ip = sum(walsh_packet_value(I, n1, x) * walsh_packet_value(I, n2, x) for x in pts) / N
            assert ip == (1 if n1 == n2 else 0)
        for x in pts:
            assert walsh_packet_value(I, 0, x) == 1
            if I.k < M:
                assert walsh_packet_value(I, 1, x) == haar_value(I, x)


def test_w2_small():
    M = 2
    for k in range(M + 1):
        for l1, l2 in product(range(1 << k), repeat=2):
            I, J = DyadicInterval(k, l1), DyadicInterval(k, l2)
            for n in range(1 << (M - k)):
                for c1, c2 in product(I.cells(M), J.cells(M)):
                    x, y = DyadicPoint(M, c1), DyadicPoint(M, c2)
                    assert walsh_packet_value(I, n, x) * walsh_packet_value(J, n, y) == walsh_packet_value(
                        xor_intervals(I, J), n, xor_points(x, y)
                    )


def test_refine_preserves_integral_and_norms(rng):
    F = StepFun2D.from_function(2, lambda x, y: Fraction(rng.randint(-4, 4), 3))
    G = F.refine(4)
    assert G.integral() == F.integral()
    assert norms(G) == norms(F)


def test_stepfun2d_shape_check():
    with pytest.raises(DyadicError):
        StepFun2D(1, ((1, 2), (3,)))
    with pytest.raises(TypeError):
        StepFun2D(0, ((0.5,),))
