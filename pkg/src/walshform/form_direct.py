"""Brute-force evaluation of the Walsh trilinear form and its dyadic kernel.

This is the ground truth the phase-space decomposition is checked against,
so it deliberately shares no code with :mod:`walshform.tiles`: the form is a
plain quadruple cell sum over ``(x, y, s, t)`` with the kernel read off its
indicator/Haar definition.
"""

from __future__ import annotations

from fractions import Fraction

from .dyadic import DyadicInterval, DyadicPoint, ResolutionMismatch
from .stepfun import StepFun2D, haar_value

__all__ = ["eval_kernel", "lambda_w_direct", "DEFAULT_ORACLE_MAX_M", "OracleTooLarge"]

DEFAULT_ORACLE_MAX_M = 5


class OracleTooLarge(ValueError):
    pass


def eval_kernel(s: DyadicPoint, t: DyadicPoint, k_max: int) -> Fraction:
    """Partial sum ``sum_{k<=k_max} 4**k 1_[0,2^-k)(s) h_[0,2^-k)(t)`` at the points ``s, t``."""
    total = Fraction(0)
    for k in range(k_max + 1):
        if (s.idx << k) >= (1 << s.M):
            break  # s outside [0, 2**-k), and so for every larger k
        total += 4**k * haar_value(DyadicInterval(k, 0), t)
    return total


def lambda_w_direct(
    F1: StepFun2D,
    F2: StepFun2D,
    F3: StepFun2D,
    k_max: int | None = None,
    max_M: int = DEFAULT_ORACLE_MAX_M,
) -> Fraction:
    """Exact value of the Walsh trilinear form by direct cell summation.

    The scale sum is cut at ``k_max`` (default ``M - 1``). Terms with
    ``k >= M`` vanish; to evaluate them anyway the functions are refined to
    resolution ``k_max + 1`` so the kernel pieces are constant on cells.
    Cost is ``O(2**(4R))`` for working resolution ``R``, hence the ``max_M`` guard.
    """
    M = F1.M
    if F2.M != M or F3.M != M:
        raise ResolutionMismatch(f"resolutions differ: {F1.M}, {F2.M}, {F3.M}")
    if M > max_M:
        raise OracleTooLarge(f"direct oracle capped at M={max_M}, got M={M}")
    if k_max is None:
        k_max = M - 1
    if k_max < 0:
        return Fraction(0)
    R = max(M, k_max + 1)
    if R > M:
        F1, F2, F3 = F1.refine(R), F2.refine(R), F3.refine(R)
    G1, D1 = F1.as_int_grid()
    G2, D2 = F2.as_int_grid()
    G3, D3 = F3.as_int_grid()
    side = 1 << R

    total = 0
    for k in range(k_max + 1):
        S = 1 << (R - k)  # cells of [0, 2**-k)
        half = S >> 1  # h is +1 on the first half of those cells, -1 on the rest
        term = 0
        for y in range(side):
            row2, row3 = G2[y], G3[y]
            for x in range(side):
                f3 = row3[x]
                if not f3:
                    continue
                for t in range(S):
                    f2 = row2[x ^ t]
                    if not f2:
                        continue
                    row1 = G1[y ^ t]
                    inner = 0
                    for s in range(S):
                        inner += row1[x ^ s]
                    if t < half:
                        term += f2 * f3 * inner
                    else:
                        term -= f2 * f3 * inner
        total += 4**k * term
    return Fraction(total, (1 << (4 * R)) * D1 * D2 * D3)
