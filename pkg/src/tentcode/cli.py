"""Command-line front end.

Exit status: 0 for success / accept / valid, 1 for reject / invalid (and
failed verification), 2 for usage or domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import automaton, oracle
from .algorithms import EpsilonConfig, decide, naive_encode, valid_encode
from .encoder import encode, orbit_trace, parse_code
from .numerics import (
    DigitStream,
    DomainError,
    RoundingConfig,
    RoundingMode,
    TentParams,
    as_rational,
)
from .stats import ExperimentConfig, KSummary, run_experiment, verify_level_bounds

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


def _add_mu(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", required=True, help="slope as c/d, e.g. 8/5")


def _add_x(p: argparse.ArgumentParser, required: bool = True) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--x", help="initial point as p/q")
    group.add_argument("--x-bits", help="initial point as binary digits after the point")


def _exact_x(args) -> Fraction:
    if args.x_bits is not None:
        stream = DigitStream.from_bits(args.x_bits)
        return stream.prefix(len("".join(args.x_bits.split())))
    return as_rational(args.x)


def _real_x(args):
    if args.x_bits is not None:
        return DigitStream.from_bits(args.x_bits)
    return as_rational(args.x)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tentcode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="exact tent code of x")
    _add_mu(p)
    _add_x(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("naive-encode", help="encode with rounding every step")
    _add_mu(p)
    _add_x(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--round", choices=[m.value for m in RoundingMode], default="nearest-bin")
    p.add_argument("--prec", type=int, required=True)

    p = sub.add_parser("valid-encode", help="valid code of a point within eps of x")
    _add_mu(p)
    _add_x(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", required=True)

    p = sub.add_parser("decide", help="is the code that of a point near x?")
    _add_mu(p)
    p.add_argument("--code", required=True)
    _add_x(p)
    p.add_argument("--eps", required=True)

    p = sub.add_parser("member", help="is the code a valid tent code?")
    _add_mu(p)
    p.add_argument("--code", required=True)

    p = sub.add_parser("automaton", help="dump the level table")
    _add_mu(p)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--format", choices=["dot", "json"], default="dot")

    p = sub.add_parser("enumerate", help="all codes of length n with preimages")
    _add_mu(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["csv"], default="csv")

    p = sub.add_parser("trace", help="orbit of x as CSV")
    _add_mu(p)
    _add_x(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("stats", help="max-level statistics of perturbed codes")
    _add_mu(p)
    p.add_argument("--x", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", metavar="PATH", help="write per-trial rows here ('-' for stderr)")

    p = sub.add_parser("verify", help="check the level-structure bounds")
    _add_mu(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--levels", type=int, default=50)
    return parser


def _positive(name: str, value: int) -> None:
    if value < 1:
        raise DomainError(f"--{name} must be positive")


def _trial_csv(values: list[int], summary: KSummary) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["trial", "K"])
    writer.writerows(enumerate(values))
    writer.writerow(["mean_k_sq", str(summary.mean_k_sq)])
    return out.getvalue()


def dispatch(args, out) -> int:
    params = TentParams.parse(args.mu)
    cmd = args.command

    if cmd == "encode":
        _positive("n", args.n)
        print(encode(params, _exact_x(args), args.n), file=out)
        return EXIT_OK

    if cmd == "naive-encode":
        _positive("n", args.n)
        cfg = RoundingConfig(RoundingMode(args.round), args.prec)
        code = naive_encode(params, _exact_x(args), args.n, cfg)
        ok, _ = automaton.is_member(params, code)
        print(code, file=out)
        print("valid" if ok else "invalid", file=out)
        return EXIT_OK

    if cmd == "valid-encode":
        _positive("n", args.n)
        eps = EpsilonConfig.create(params, args.eps)
        code, report = valid_encode(params, _real_x(args), args.n, eps)
        print(code, file=out)
        print(json.dumps(report.to_dict()), file=out)
        return EXIT_OK

    if cmd == "decide":
        eps = EpsilonConfig.create(params, args.eps)
        verdict, report = decide(params, parse_code(args.code), _real_x(args), eps)
        print(verdict.value, file=out)
        print(json.dumps(report.to_dict()), file=out)
        return EXIT_OK if verdict else EXIT_NO

    if cmd == "member":
        ok, _ = automaton.is_member(params, parse_code(args.code))
        print("valid" if ok else "invalid", file=out)
        return EXIT_OK if ok else EXIT_NO

    if cmd == "automaton":
        _positive("levels", args.levels)
        table = automaton.build_table(params, args.levels)
        text = automaton.export_dot(table) if args.format == "dot" else automaton.export_json(table)
        out.write(text if text.endswith("\n") else text + "\n")
        return EXIT_OK

    if cmd == "enumerate":
        _positive("n", args.n)
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["code", "lo_num", "lo_den", "hi_num", "hi_den"])
        for cell in oracle.enumerate_language(params, args.n):
            writer.writerow([cell.code, cell.lo.numerator, cell.lo.denominator,
                             cell.hi.numerator, cell.hi.denominator])
        return EXIT_OK

    if cmd == "trace":
        _positive("n", args.n)
        x = _exact_x(args)
        code = encode(params, x, args.n + 1)
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["i", "num", "den", "bit"])
        for i, xi in enumerate(orbit_trace(params, x, args.n)):
            writer.writerow([i, xi.numerator, xi.denominator, code[i]])
        return EXIT_OK

    if cmd == "stats":
        cfg = ExperimentConfig(params, as_rational(args.x), as_rational(args.eps),
                               args.n, args.trials, args.seed)
        values = run_experiment(cfg, workers=args.workers)
        summary = KSummary.from_values(values)
        if args.csv == "-":
            sys.stderr.write(_trial_csv(values, summary))
        elif args.csv:
            with open(args.csv, "w", newline="") as fh:
                fh.write(_trial_csv(values, summary))
        print(json.dumps(summary.to_dict()), file=out)
        return EXIT_OK

    if cmd == "verify":
        report = verify_level_bounds(params, args.n, levels=args.levels)
        print(json.dumps(report.to_dict(), indent=2, default=str), file=out)
        return EXIT_OK if report.ok else EXIT_NO

    raise AssertionError(cmd)  # pragma: no cover


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return dispatch(args, out)
    except (DomainError, TypeError) as exc:
        print(f"tentcode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
