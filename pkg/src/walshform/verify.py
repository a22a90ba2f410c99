"""Random instances, the exact property suite, and a search for large ratios.

Every verdict in :func:`run_suite` is an exact rational comparison. The only
floating-point code is the hill climb in :func:`search_extremal`, and its
result is re-checked exactly before being reported.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Context
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import __version__
from .dyadic import DyadicInterval, DyadicPoint, xor_intervals, xor_points
from .form_direct import DEFAULT_ORACLE_MAX_M, eval_kernel, lambda_w_direct
from .stepfun import (
    StepFun1D,
    StepFun2D,
    bracket_1d,
    fwht_all_coeffs,
    haar_value,
    norms,
    walsh_packet_value,
    wf_expand,
)
from .tiles import PhasePlane, xi_boundary_closed_form

log = logging.getLogger(__name__)

__all__ = [
    "ValuePool",
    "SuiteConfig",
    "CheckRecord",
    "Report",
    "SearchResult",
    "CHECK_NAMES",
    "random_stepfun",
    "random_triple",
    "bound_holds",
    "run_suite",
    "search_extremal",
    "decimal_approx",
]

BOUND_CONSTANT = 7
BOUND_FOURTH = BOUND_CONSTANT**4  # 2401

CHECK_NAMES = ("packets", "decomposition", "lemma", "telescoping", "boundary", "sandwich", "bound")

_APPROX_CTX = Context(prec=12, rounding=ROUND_HALF_EVEN)


def decimal_approx(q: Fraction) -> str:
    """12 significant digits, round half to even."""
    q = Fraction(q)
    if q == 0:
        return "0"
    return str(_APPROX_CTX.divide(_APPROX_CTX.create_decimal(q.numerator), q.denominator))


@dataclass(frozen=True)
class ValuePool:
    """Distribution of random cell values.

    Either an explicit finite ``values`` set, or numerators in
    ``[num_lo, num_hi]`` over ``denominators``, with an extra point mass at
    zero of weight ``zero_weight``.
    """

    num_lo: int = -8
    num_hi: int = 8
    denominators: tuple = (1, 2, 4)
    zero_weight: float = 0.2
    values: Optional[tuple] = None

    def draw(self, rng: random.Random) -> Fraction:
        if self.values is not None:
            return Fraction(rng.choice(self.values))
        if rng.random() < self.zero_weight:
            return Fraction(0)
        return Fraction(rng.randint(self.num_lo, self.num_hi), rng.choice(self.denominators))

    def describe(self) -> dict:
        if self.values is not None:
            return {"values": [str(Fraction(v)) for v in self.values]}
        return {
            "numerators": [self.num_lo, self.num_hi],
            "denominators": list(self.denominators),
            "zero_weight": self.zero_weight,
        }


def random_stepfun(M: int, seed, value_pool: ValuePool = ValuePool()) -> StepFun2D:
    """Deterministic in ``(M, seed, value_pool)``; ``seed`` may be an int, str or tuple."""
    rng = random.Random(f"stepfun:{M}:{seed}")
    side = 1 << M
    return StepFun2D(M, tuple(tuple(value_pool.draw(rng) for _ in range(side)) for _ in range(side)))


def random_triple(M: int, seed, trial: int, value_pool: ValuePool = ValuePool()):
    return tuple(random_stepfun(M, (seed, trial, f), value_pool) for f in (1, 2, 3))


@dataclass
class SuiteConfig:
    M: int = 2
    trials: int = 10
    seed: int = 0
    value_pool: ValuePool = field(default_factory=ValuePool)
    oracle_max_M: int = DEFAULT_ORACLE_MAX_M
    checks: tuple = CHECK_NAMES
    allow_large_oracle: bool = False
    minimize: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.M < 0:
            raise ValueError("M must be >= 0")
        if self.oracle_max_M > 6 and not self.allow_large_oracle:
            raise ValueError("oracle_max_M above 6 needs allow_large_oracle=True")
        unknown = set(self.checks) - set(CHECK_NAMES)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}")
        self.checks = tuple(c for c in CHECK_NAMES if c in self.checks)

    def echo(self) -> dict:
        return {
            "M": self.M,
            "trials": self.trials,
            "seed": self.seed,
            "value_pool": self.value_pool.describe(),
            "oracle_max_M": self.oracle_max_M,
            "checks": list(self.checks),
        }


@dataclass
class CheckRecord:
    name: str
    run: int = 0
    passed: int = 0
    failed: int = 0
    items: int = 0
    seconds: float = 0.0
    counterexample: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "run": self.run,
            "pass": self.passed,
            "fail": self.failed,
            "ok": self.ok,
            "items": self.items,
            "seconds": round(self.seconds, 6),
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class Report:
    config: dict
    checks: list
    notes: list = field(default_factory=list)
    version: str = __version__

    @property
    def overall(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "overall": self.overall,
            "notes": list(self.notes),
        }


# -- instances ---------------------------------------------------------------------


class Instance:
    """A triple plus lazily computed shared quantities."""

    def __init__(self, F1: StepFun2D, F2: StepFun2D, F3: StepFun2D, trial: int = 0, seed=0):
        self.F = (F1, F2, F3)
        self.M = F1.M
        self.trial = trial
        self.rng = random.Random(f"spot:{seed}:{trial}")

    @cached_property
    def plane(self) -> PhasePlane:
        return PhasePlane(*self.F)

    @cached_property
    def lam(self) -> Fraction:
        return self.plane.lambda_w()

    def payload(self) -> dict:
        return {
            "M": self.M,
            "F1": self.F[0].to_strings(),
            "F2": self.F[1].to_strings(),
            "F3": self.F[2].to_strings(),
        }


def _fail(relation: str, lhs, rhs, **extra) -> dict:
    out = {"relation": relation, "lhs": str(lhs), "rhs": str(rhs)}
    out.update({k: str(v) for k, v in extra.items()})
    return out


def bound_holds(lam: Fraction, F1: StepFun2D, F2: StepFun2D, F3: StepFun2D) -> tuple[bool, Fraction, Fraction]:
    """``lam**4 <= 7**4 * (||F1||_2^2)^2 * ||F2||_4^4 * ||F3||_4^4``, exactly."""
    n1, _ = norms(F1)
    _, n2 = norms(F2)
    _, n3 = norms(F3)
    lhs = lam**4
    rhs = BOUND_FOURTH * n1 * n1 * n2 * n3
    return lhs <= rhs, lhs, rhs


# Each check returns (items_checked, failure detail or None).


def _check_packets(inst: Instance, cfg: SuiteConfig):
    """Spot checks of the wave-packet algebra at random intervals, frequencies and cells."""
    M, rng = inst.M, inst.rng
    items = 0
    for _ in range(8):
        k = rng.randint(0, M)
        I = DyadicInterval(k, rng.randrange(1 << k))
        N = 1 << (M - k)
        n1, n2 = rng.randrange(N), rng.randrange(N)
        x = DyadicPoint(M, rng.choice(I.cells(M)))
        w = lambda n: walsh_packet_value(I, n, x)  # noqa: E731
        items += 1
        if w(n1) * w(n2) != w(n1 ^ n2):
            return items, _fail("W1", w(n1) * w(n2), w(n1 ^ n2), I=I, n1=n1, n2=n2, x=x.idx)
        if w(0) != 1 or (k < M and w(1) != haar_value(I, x)):
            return items, _fail("W5", w(0), 1, I=I, x=x.idx)
        J = DyadicInterval(k, rng.randrange(1 << k))
        y = DyadicPoint(M, rng.choice(J.cells(M)))
        lhs = w(n1) * walsh_packet_value(J, n1, y)
        rhs = walsh_packet_value(xor_intervals(I, J), n1, xor_points(x, y))
        if lhs != rhs:
            return items, _fail("W2", lhs, rhs, I=I, J=J, n=n1, x=x.idx, y=y.idx)
        if k < M:
            I0, I1 = I.halves()
            Om = N // 2  # frequency of I_a x Omega, where I x Omega_0 has frequency 2m
            m = rng.randrange(max(Om, 1))
            lhs0 = walsh_packet_value(I, 2 * m, x)
            lhs1 = walsh_packet_value(I, 2 * m + 1, x)
            a = walsh_packet_value(I0, m, x)
            b = walsh_packet_value(I1, m, x)
            if lhs0 != a + b or lhs1 != a - b:
                return items, _fail("W4", (lhs0, lhs1), (a + b, a - b), I=I, m=m, x=x.idx)
        # W3 and fast-vs-direct coefficients on a slice of F1 restricted to I
        row = inst.F[0].row(rng.randrange(1 << M))
        cells = I.cells(M)
        f = StepFun1D(M, tuple(v if i in cells else 0 for i, v in enumerate(row.values)))
        coeffs = fwht_all_coeffs(f, I)
        n = rng.randrange(N)
        if coeffs[n] != bracket_1d(f, I, n):
            return items, _fail("fwht", coeffs[n], bracket_1d(f, I, n), I=I, n=n)
        if wf_expand(f, I) != f:
            return items, _fail("W3", "expansion", "f", I=I)
    return items, None


def _check_decomposition(inst: Instance, cfg: SuiteConfig):
    direct = lambda_w_direct(*inst.F, max_M=max(cfg.oracle_max_M, inst.M))
    if direct != inst.lam:
        return 1, _fail("direct == tiles", direct, inst.lam)
    return 1, None


def _lemma_failure(T) -> Optional[dict]:
    d = T.box
    rules = (
        ("dB- <= A", T.box_minus, T.a, T.box_minus <= T.a),
        ("A <= dB+", T.a, T.box_plus, T.a <= T.box_plus),
        ("dB1 == A + A1", d[0], T.a + T.a1, d[0] == T.a + T.a1),
        ("dB2 == sum of squares", d[1], T.r2, d[1] == T.r2),
        ("dB2 >= 0", d[1], 0, d[1] >= 0),
        ("dB3 == A2 + A3 + squares", d[2], T.a2 + T.a3 + T.r3, d[2] == T.a2 + T.a3 + T.r3),
        ("dB4 == A4 + squares", d[3], T.a4 + T.r4, d[3] == T.a4 + T.r4),
        ("dB5 == A5 + squares", d[4], T.a5 + T.r5, d[4] == T.a5 + T.r5),
        ("residuals >= 0", min(T.r3, T.r4, T.r5), 0, min(T.r3, T.r4, T.r5) >= 0),
        ("A2, A4, A5 >= 0", min(T.a2, T.a4, T.a5), 0, min(T.a2, T.a4, T.a5) >= 0),
        ("|A1| <= dB2 + A2/2", abs(T.a1), d[1] + T.a2 / 2, abs(T.a1) <= d[1] + T.a2 / 2),
        ("|A3| <= A4 + A5", abs(T.a3), T.a4 + T.a5, abs(T.a3) <= T.a4 + T.a5),
        (
            "dB3 + dB4 + dB5 >= A2 + A3 + A4 + A5",
            d[2] + d[3] + d[4],
            T.a2 + T.a3 + T.a4 + T.a5,
            d[2] + d[3] + d[4] >= T.a2 + T.a3 + T.a4 + T.a5,
        ),
    )
    for relation, lhs, rhs, ok in rules:
        if not ok:
            return _fail(relation, lhs, rhs)
    return None


def _check_lemma(inst: Instance, cfg: SuiteConfig):
    items = 0
    for k in range(inst.M):
        for P, T in inst.plane.iter_terms(k):
            items += 1
            bad = _lemma_failure(T)
            if bad is not None:
                bad["multitile"] = {"I": str(P.I), "J": str(P.J), "Omega": str(P.Omega)}
                return items, bad
    return items, None


def _check_telescoping(inst: Instance, cfg: SuiteConfig):
    pp = inst.plane
    items = 0
    for k in range(inst.M):
        for s in "+-":
            items += 1
            lhs = pp.xi(k + 1, s) - pp.xi(k, s)
            rhs = pp.box_level_sum(k, s)
            if lhs != rhs:
                return items, _fail(f"Xi{s}[{k + 1}] - Xi{s}[{k}] == sum dB{s}", lhs, rhs, k=k)
    return items, None


def _check_boundary(inst: Instance, cfg: SuiteConfig):
    pp = inst.plane
    items = 0
    for which, k in (("M", inst.M), ("0", 0)):
        for s in "+-":
            items += 1
            tiles = pp.xi(k, s)
            closed = xi_boundary_closed_form(which, s, *inst.F)
            if tiles != closed:
                return items, _fail(f"Xi{s}[{which}] == closed form", tiles, closed)
    return items, None


def _check_sandwich(inst: Instance, cfg: SuiteConfig):
    pp, M, lam = inst.plane, inst.M, inst.lam
    lo = pp.xi(M, "-") - pp.xi(0, "-")
    hi = pp.xi(M, "+") - pp.xi(0, "+")
    if not lo <= lam:
        return 1, _fail("Xi-[M] - Xi-[0] <= Lambda", lo, lam)
    if not lam <= hi:
        return 1, _fail("Lambda <= Xi+[M] - Xi+[0]", lam, hi)
    return 1, None


def _check_bound(inst: Instance, cfg: SuiteConfig):
    ok, lhs, rhs = bound_holds(inst.lam, *inst.F)
    if not ok:
        return 1, _fail("Lambda^4 <= 2401 ||F1||_2^4 ||F2||_4^4 ||F3||_4^4", lhs, rhs)
    return 1, None


CHECKS: dict[str, Callable] = {
    "packets": _check_packets,
    "decomposition": _check_decomposition,
    "lemma": _check_lemma,
    "telescoping": _check_telescoping,
    "boundary": _check_boundary,
    "sandwich": _check_sandwich,
    "bound": _check_bound,
}


def minimize_counterexample(fn: Callable, inst: Instance, cfg: SuiteConfig) -> Instance:
    """Greedily zero cells while ``fn`` keeps failing."""
    F = [list(map(list, G.grid)) for G in inst.F]
    M = inst.M

    def fails(grids) -> bool:
        cand = Instance(*(StepFun2D(M, tuple(map(tuple, g))) for g in grids), trial=inst.trial)
        try:
            return fn(cand, cfg)[1] is not None
        except Exception:  # a crash is not the failure we are shrinking
            return False

    for g in F:
        for row in g:
            for x, v in enumerate(row):
                if v:
                    row[x] = Fraction(0)
                    if not fails(F):
                        row[x] = v
    return Instance(*(StepFun2D(M, tuple(map(tuple, g))) for g in F), trial=inst.trial)


def run_suite(cfg: SuiteConfig, checks: Optional[dict] = None) -> Report:
    """Run the selected exact checks over ``cfg.trials`` random triples.

    ``checks`` overrides the check table (used to exercise the failure path).
    """
    table = CHECKS if checks is None else checks
    names = cfg.checks if checks is None else tuple(checks)
    records = {name: CheckRecord(name) for name in names}
    notes = []
    if cfg.M == 0:
        notes.append("M=0: the multitile set is empty, the form is 0 and multitile checks are vacuous")
    skip_oracle = "decomposition" in records and cfg.M > cfg.oracle_max_M
    if skip_oracle:
        records["decomposition"].notes.append(
            f"skipped: M={cfg.M} exceeds oracle_max_M={cfg.oracle_max_M}"
        )

    for trial in range(cfg.trials):
        inst = Instance(*random_triple(cfg.M, cfg.seed, trial, cfg.value_pool), trial=trial, seed=cfg.seed)
        for name in names:
            if name == "decomposition" and skip_oracle:
                continue
            rec = records[name]
            t0 = time.perf_counter()
            items, failure = table[name](inst, cfg)
            rec.run += 1
            rec.items += items
            if failure is None:
                rec.passed += 1
            else:
                rec.failed += 1
                if rec.counterexample is None:
                    log.warning("check %s failed on trial %d: %s", name, trial, failure)
                    shown = inst
                    if cfg.minimize:
                        shown = minimize_counterexample(table[name], inst, cfg)
                        shrunk = table[name](shown, cfg)[1]
                        failure = shrunk if shrunk is not None else failure
                    rec.counterexample = {"trial": trial, "input": shown.payload(), "detail": failure}
            rec.seconds += time.perf_counter() - t0
    return Report(config=cfg.echo(), checks=list(records.values()), notes=notes)


# -- extremal search -----------------------------------------------------------------


@dataclass
class SearchResult:
    best_ratio: float
    best_input: tuple
    exact_lambda: Fraction
    exact_recheck: bool
    homogeneity_ok: bool
    restart_ratios: list

    def to_json(self) -> dict:
        F1, F2, F3 = self.best_input
        return {
            "best_ratio": self.best_ratio,
            "best_input": {"M": F1.M, "F1": F1.to_strings(), "F2": F2.to_strings(), "F3": F3.to_strings()},
            "lambda_exact": str(self.exact_lambda),
            "lambda_approx": decimal_approx(self.exact_lambda),
            "exact_recheck": self.exact_recheck,
            "homogeneity_ok": self.homogeneity_ok,
            "restart_ratios": self.restart_ratios,
        }


class _FloatForm:
    """Vectorized floating evaluation of the form at one resolution."""

    def __init__(self, M: int):
        side = 1 << M
        K = np.array(
            [[float(eval_kernel(DyadicPoint(M, s), DyadicPoint(M, t), M - 1)) for t in range(side)]
             for s in range(side)]
        )
        x, y, s, t = np.meshgrid(*(np.arange(side),) * 4, indexing="ij")
        mask = K[s, t] != 0
        x, y, s, t = x[mask], y[mask], s[mask], t[mask]
        self.i1 = ((y ^ t) * side + (x ^ s))
        self.i2 = (y * side + (x ^ t))
        self.i3 = (y * side + x)
        self.w = K[s, t] / float(1 << (4 * M))

    def lam(self, f1, f2, f3) -> float:
        return float(np.dot(self.w, f1[self.i1] * f2[self.i2] * f3[self.i3]))

    def ratio(self, f1, f2, f3) -> float:
        n1 = math.sqrt(np.mean(f1 * f1))
        n2 = np.mean(f2**4) ** 0.25
        n3 = np.mean(f3**4) ** 0.25
        if n1 == 0 or n2 == 0 or n3 == 0:
            return -math.inf
        return abs(self.lam(f1, f2, f3)) / (n1 * n2 * n3)


def _exact_ratio(lam: Fraction, F1, F2, F3) -> float:
    n1, _ = norms(F1)
    _, n2 = norms(F2)
    _, n3 = norms(F3)
    return abs(float(lam)) / (math.sqrt(n1) * float(n2) ** 0.25 * float(n3) ** 0.25)


def search_extremal(
    M: int,
    iterations: int,
    seed: int,
    restarts: int = 1,
    max_M: int = 4,
    value_pool: ValuePool = ValuePool(),
) -> SearchResult:
    """Hill-climb ``|Lambda| / (||F1||_2 ||F2||_4 ||F3||_4)`` over cell values.

    Moves add ``+-2**-j`` to one cell, ``j`` rising linearly with the
    iteration count, and are kept only if the ratio improves. Starting
    points come from the rational pool and steps are powers of two, so the
    climb never leaves the dyadic rationals and the best point is exact.
    """
    if M > max_M:
        raise ValueError(f"search capped at M={max_M}")
    if M == 0:
        F = StepFun2D.constant(0, 1)
        return SearchResult(0.0, (F, F, F), Fraction(0), True, True, [0.0] * max(restarts, 1))
    form = _FloatForm(M)
    cells = 1 << (2 * M)
    best = (-math.inf, None)
    ratios = []
    for r in range(max(restarts, 1)):
        attempt = 0
        while True:
            triple = random_triple(M, (seed, "search", r, attempt), 0, value_pool)
            fs = [np.array([float(v) for v in F.cells()]) for F in triple]
            cur = form.ratio(*fs)
            if cur > -math.inf:
                break
            attempt += 1
        rng = np.random.default_rng([seed, r])
        for it in range(iterations):
            j = 10 * it // max(iterations, 1)
            step = 2.0**-j * (1 if rng.random() < 0.5 else -1)
            f = int(rng.integers(3))
            c = int(rng.integers(cells))
            fs[f][c] += step
            new = form.ratio(*fs)
            if new > cur:
                cur = new
            else:
                fs[f][c] -= step
        ratios.append(cur)
        if cur > best[0]:
            best = (cur, [a.copy() for a in fs])

    side = 1 << M
    grids = [
        StepFun2D(M, tuple(tuple(Fraction(float(a[y * side + x])) for x in range(side)) for y in range(side)))
        for a in best[1]
    ]
    lam = PhasePlane(*grids).lambda_w()
    ok, _, _ = bound_holds(lam, *grids)
    ratio = _exact_ratio(lam, *grids)
    # homogeneity: scaling F1 by 3 scales the form by 3 and leaves the ratio alone
    scaled = grids[0].scale(3)
    lam3 = PhasePlane(scaled, grids[1], grids[2]).lambda_w()
    ok3, lhs3, rhs3 = bound_holds(lam3, scaled, grids[1], grids[2])
    _, lhs, rhs = bound_holds(lam, *grids)
    homog = (
        lam3 == 3 * lam
        and lhs3 == 81 * lhs
        and rhs3 == 81 * rhs
        and math.isclose(_exact_ratio(lam3, scaled, grids[1], grids[2]), ratio, rel_tol=1e-12)
    )
    return SearchResult(ratio, tuple(grids), lam, ok and ok3, homog, ratios)
