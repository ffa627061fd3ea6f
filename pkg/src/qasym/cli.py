"""Command-line front end.

Exit codes: 0 success, 1 unreadable or malformed input, 2 invalid channel or
spec, 3 analysis failure. Reports go to stdout; diagnostics go to stderr.
"""

import argparse
import csv
import dataclasses
import json
import sys

import numpy as np

from qasym.asymptotics import synthesize_extension, trace_distance, trajectory
from qasym.channel import random_channel, validate
from qasym.errors import ParseError, QasymError
from qasym.io import (
    channel_to_dict,
    load_channel,
    load_decomposition,
    load_state,
    report_to_dict,
    report_to_text,
    save_channel,
)
from qasym.numerics import DEFAULT_TOL, Tolerances, unvec, vec
from qasym.pipeline import PipelineFailure, analyze, block_weights

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_PIPELINE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors and exit with code 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def parse_tol(items):
    """``--tol 1e-7`` sets ``recon``; ``--tol name=value`` sets any named tolerance."""
    kw = {}
    names = {f.name for f in dataclasses.fields(Tolerances)}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            key, value = "recon", item
        if key not in names:
            raise _Fail(EXIT_PARSE, f"unknown tolerance {key!r}")
        try:
            kw[key] = float(value)
        except ValueError:
            raise _Fail(EXIT_PARSE, f"bad tolerance value {value!r}") from None
    try:
        return dataclasses.replace(DEFAULT_TOL, **kw)
    except ValueError as exc:
        raise _Fail(EXIT_PARSE, str(exc)) from None


def _read_channel(path):
    try:
        return load_channel(path)
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"cannot read {path}: {exc.strerror}") from None
    except ParseError as exc:
        raise _Fail(EXIT_PARSE, f"{path}: {exc}") from None
    except QasymError as exc:
        raise _Fail(EXIT_INVALID, f"{path}: {exc}") from None


def _run_analysis(channel, tol, seed):
    try:
        return analyze(channel, tol, seed=seed)
    except PipelineFailure as exc:
        code = EXIT_INVALID if exc.stage == "validate" else EXIT_PIPELINE
        raise _Fail(code, f"stage {exc.stage} failed: {exc.cause}") from None


def cmd_analyze(args):
    tol = parse_tol(args.tol)
    an = _run_analysis(_read_channel(args.input), tol, args.seed)
    report = report_to_dict(an, timings=not args.no_timings)
    n_periph = len(report["spectrum"]["peripheral"])
    if report["decomposition"]["sum_d_squared"] != n_periph:
        raise _Fail(EXIT_PIPELINE, f"inconsistent report: sum d_k^2 = "
                    f"{report['decomposition']['sum_d_squared']} but {n_periph} peripheral eigenvalues")
    if args.format == "json":
        json.dump(report, sys.stdout, indent=1, allow_nan=False)
        sys.stdout.write("\n")
    else:
        print(report_to_text(report))
    return EXIT_OK


def cmd_synthesize(args):
    tol = parse_tol(args.tol)
    try:
        D, A, total = load_decomposition(args.spec, args.dim)
        ch = synthesize_extension(D, A, total, tol)
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"cannot read {args.spec}: {exc.strerror}") from None
    except ParseError as exc:
        raise _Fail(EXIT_PARSE, f"{args.spec}: {exc}") from None
    except QasymError as exc:
        raise _Fail(EXIT_INVALID, f"invalid spec: {exc}") from None
    save_channel(ch, args.output, args.representation)
    return EXIT_OK


def cmd_evolve(args):
    tol = parse_tol(args.tol)
    ch = _read_channel(args.input)
    try:
        rho0 = load_state(args.state)
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"cannot read {args.state}: {exc.strerror}") from None
    except ParseError as exc:
        raise _Fail(EXIT_PARSE, f"{args.state}: {exc}") from None
    if rho0.shape != (ch.dim, ch.dim):
        raise _Fail(EXIT_INVALID, f"state has shape {rho0.shape}, channel dimension is {ch.dim}")
    if args.steps < 0:
        raise _Fail(EXIT_PARSE, "--steps must be non-negative")
    an = _run_analysis(ch, tol, args.seed)
    try:
        states = trajectory(ch, rho0, args.steps, tol)
    except QasymError as exc:
        raise _Fail(EXIT_INVALID, f"invalid state: {exc}") from None

    d = ch.dim
    S = ch.superop
    asym = unvec(an.spectrum.asymptotic_projector @ vec(rho0), d)
    fixed = unvec(an.spectrum.fixed_projector @ vec(rho0), d)
    M = an.decomposition.M
    header = ["n", "dist_asymptotic", "dist_fixed"] + [f"w{k + 1}" for k in range(M)] + ["w_outside"]
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for n, rho in enumerate(states):
            row = [n, trace_distance(rho, asym), trace_distance(rho, fixed)] + block_weights(an, rho)
            w.writerow([row[0]] + [f"{x:.12g}" for x in row[1:]])
            asym = unvec(S @ vec(asym), d)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_random(args):
    if args.dim < 1:
        raise _Fail(EXIT_PARSE, "--dim must be positive")
    rank = args.rank if args.rank is not None else args.dim
    if not 1 <= rank <= args.dim ** 2:
        raise _Fail(EXIT_PARSE, "--rank must lie in [1, dim^2]")
    ch = random_channel(args.dim, rank, seed=args.seed)
    rep = validate(ch)
    if not rep.ok:
        raise _Fail(EXIT_INVALID, f"generated channel failed validation: {rep}")
    if args.output == "-":
        json.dump(channel_to_dict(ch), sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        save_channel(ch, args.output)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="qasym", description="Asymptotic structure of finite-dimensional quantum channels.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", action="append", metavar="[NAME=]VALUE",
                        help="override a tolerance; a bare value sets recon")
        sp.add_argument("--seed", type=int, default=0)

    a = sub.add_parser("analyze", help="analyze a channel file")
    a.add_argument("input")
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.add_argument("--no-timings", action="store_true", help="omit wall-clock timings from the report")
    common(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synthesize", help="build a channel from a block spec")
    s.add_argument("spec")
    s.add_argument("output")
    s.add_argument("--dim", type=int, default=None)
    s.add_argument("--representation", choices=("kraus", "choi", "superop"), default="kraus")
    common(s)
    s.set_defaults(func=cmd_synthesize)

    e = sub.add_parser("evolve", help="iterate a channel on a state and tabulate convergence")
    e.add_argument("input")
    e.add_argument("--state", required=True)
    e.add_argument("--steps", type=int, default=20)
    e.add_argument("--out", default="-")
    common(e)
    e.set_defaults(func=cmd_evolve)

    r = sub.add_parser("random", help="write a random channel")
    r.add_argument("output", nargs="?", default="-")
    r.add_argument("--dim", type=int, required=True)
    r.add_argument("--rank", type=int, default=None)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_random)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except _Fail as exc:
        print(f"qasym: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
