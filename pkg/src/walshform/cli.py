"""Command-line front end.

Subcommands::

    walshform evaluate --input triple.json [--method direct|tiles|both] [--output out.json]
    walshform verify   --M 2 --trials 50 --seed 1 [--checks lemma,bound] [--report r.json]
    walshform search   --M 3 --iters 10000 --restarts 10 --seed 0 [--output s.json]
    walshform packets  --M 3 --interval 1/4,1/2 [--output table.json]

Exact values are always JSON strings ``"p/q"``; floating approximations
live under keys ending in ``_approx`` (or ``best_ratio``). Exit codes:
0 success, 1 usage or input error, 2 verification failure or disagreement.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from fractions import Fraction

from . import __version__
from .dyadic import DyadicError, DyadicInterval
from .form_direct import DEFAULT_ORACLE_MAX_M, OracleTooLarge, lambda_w_direct
from .stepfun import StepFun2D, packet_table
from .tiles import PhasePlane
from .verify import CHECK_NAMES, SuiteConfig, decimal_approx, run_suite, search_extremal

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class InputError(ValueError):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


# -- function files ------------------------------------------------------------------


def _parse_entry(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise InputError("parse", f"{where}: expected a rational string or integer, got {v!r}")
    if isinstance(v, str) and not _RATIONAL.match(v.strip()):
        raise InputError("parse", f"{where}: {v!r} is not of the form p or p/q")
    try:
        return Fraction(v.strip()) if isinstance(v, str) else Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError("parse", f"{where}: {exc}") from None


def parse_function_file(data: dict) -> tuple[StepFun2D, StepFun2D, StepFun2D]:
    if not isinstance(data, dict):
        raise InputError("schema", "top level must be an object")
    M = data.get("M")
    if isinstance(M, bool) or not isinstance(M, int) or M < 0:
        raise InputError("schema", f"M must be a nonnegative integer, got {M!r}")
    side = 1 << M
    out = []
    for name in ("F1", "F2", "F3"):
        grid = data.get(name)
        if grid is None:
            raise InputError("schema", f"missing grid {name}")
        if not isinstance(grid, list) or len(grid) != side:
            n = len(grid) if isinstance(grid, list) else "?"
            raise InputError("shape", f"{name}: expected {side} rows, got {n}")
        rows = []
        for y, row in enumerate(grid):
            if not isinstance(row, list) or len(row) != side:
                n = len(row) if isinstance(row, list) else "?"
                raise InputError("shape", f"{name}[{y}]: expected {side} cells, got {n}")
            rows.append(tuple(_parse_entry(v, f"{name}[{y}][{x}]") for x, v in enumerate(row)))
        out.append(StepFun2D(M, tuple(rows)))
    return tuple(out)


def dump_function_file(F1: StepFun2D, F2: StepFun2D, F3: StepFun2D) -> dict:
    return {"M": F1.M, "F1": F1.to_strings(), "F2": F2.to_strings(), "F3": F3.to_strings()}


def load_function_file(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError("io", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise InputError("parse", f"invalid JSON: {exc}") from None
    return parse_function_file(data)


def _emit(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str, path: str | None) -> int:
    _emit({"error": {"type": kind, "message": message}}, path)
    return EXIT_INPUT


def parse_interval(spec: str) -> DyadicInterval:
    """``"a,b"`` endpoints (rationals) or ``"k:l"``."""
    try:
        if ":" in spec:
            k, l = spec.split(":")
            return DyadicInterval(int(k), int(l))
        a, b = spec.split(",")
        return DyadicInterval.from_endpoints(Fraction(a), Fraction(b))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError("interval", f"bad interval {spec!r}: {exc}") from None


# -- commands ------------------------------------------------------------------------


def cmd_evaluate(args) -> int:
    try:
        F = load_function_file(args.input)
    except InputError as exc:
        return _error(exc.kind, str(exc), args.output)
    methods = ("direct", "tiles") if args.method == "both" else (args.method,)
    values, timings = {}, {}
    for m in methods:
        t0 = time.perf_counter()
        try:
            if m == "direct":
                values[m] = lambda_w_direct(*F, max_M=args.oracle_max_M)
            else:
                values[m] = PhasePlane(*F).lambda_w()
        except OracleTooLarge as exc:
            return _error("oracle", str(exc), args.output)
        timings[m] = round(time.perf_counter() - t0, 6)
    lam = values[methods[-1]]
    out = {
        "M": F[0].M,
        "lambda_exact": str(lam),
        "lambda_approx": decimal_approx(lam),
        "methods": {m: {"lambda_exact": str(v), "lambda_approx": decimal_approx(v)} for m, v in values.items()},
        "timings": timings,
    }
    code = EXIT_OK
    if args.method == "both":
        out["agree"] = values["direct"] == values["tiles"]
        code = EXIT_OK if out["agree"] else EXIT_FAIL
    _emit(out, args.output)
    return code


def _parse_checks(spec: str | None) -> tuple:
    if not spec or spec == "all":
        return CHECK_NAMES
    names = tuple(s.strip() for s in spec.split(",") if s.strip())
    bad = [n for n in names if n not in CHECK_NAMES]
    if bad:
        raise InputError("usage", f"unknown checks {bad}; choose from {list(CHECK_NAMES)}")
    return names


def cmd_verify(args) -> int:
    try:
        cfg = SuiteConfig(
            M=args.M,
            trials=args.trials,
            seed=args.seed,
            oracle_max_M=args.oracle_max_M,
            checks=_parse_checks(args.checks),
            allow_large_oracle=args.allow_large_oracle,
        )
    except (InputError, ValueError) as exc:
        return _error(getattr(exc, "kind", "usage"), str(exc), args.report)
    report = run_suite(cfg)
    _emit(report.to_json(), args.report)
    return EXIT_OK if report.overall else EXIT_FAIL


def cmd_search(args) -> int:
    try:
        res = search_extremal(args.M, args.iters, args.seed, args.restarts, max_M=args.max_M)
    except ValueError as exc:
        return _error("usage", str(exc), args.output)
    _emit(res.to_json(), args.output)
    return EXIT_OK if res.exact_recheck else EXIT_FAIL


def cmd_packets(args) -> int:
    try:
        I = parse_interval(args.interval)
        table = packet_table(I, args.M)
    except InputError as exc:
        return _error(exc.kind, str(exc), args.output)
    except DyadicError as exc:
        return _error("interval", str(exc), args.output)
    _emit({"M": args.M, "interval": str(I), "k": I.k, "l": I.l, "rows": table}, args.output)
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="walshform", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("evaluate", help="exact value of the form for a function file")
    e.add_argument("--input", required=True)
    e.add_argument("--method", choices=("direct", "tiles", "both"), default="both")
    e.add_argument("--output")
    e.add_argument("--oracle-max-M", dest="oracle_max_M", type=int, default=DEFAULT_ORACLE_MAX_M)
    e.set_defaults(func=cmd_evaluate)

    v = sub.add_parser("verify", help="run the exact property suite on random triples")
    v.add_argument("--M", type=int, default=2)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--checks", help=f"comma-separated subset of {','.join(CHECK_NAMES)}")
    v.add_argument("--report")
    v.add_argument("--oracle-max-M", dest="oracle_max_M", type=int, default=DEFAULT_ORACLE_MAX_M)
    v.add_argument("--allow-large-oracle", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="hill-climb for large ratios |form| / norms")
    s.add_argument("--M", type=int, default=2)
    s.add_argument("--iters", type=int, default=1000)
    s.add_argument("--restarts", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-M", dest="max_M", type=int, default=4)
    s.add_argument("--output")
    s.set_defaults(func=cmd_search)

    k = sub.add_parser("packets", help="dump the wave-packet sign table of an interval")
    k.add_argument("--M", type=int, required=True)
    k.add_argument("--interval", default="0,1", help="'a,b' endpoints or 'k:l'")
    k.add_argument("--output")
    k.set_defaults(func=cmd_packets)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
