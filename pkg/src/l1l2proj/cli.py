"""Command-line front end: project, bench and trace subcommands.

Vectors move through stdin/stdout or files in two formats: ``text``
(whitespace-separated decimal literals) and ``f64le`` (little-endian
64-bit floats, length inferred from the byte count).  Diagnostics go to
stderr so stdout stays machine readable.  Exit codes: 0 success, 2 for
parse/IO problems, 3 for domain errors such as an infeasible radius.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .bench import (
    BenchConfig,
    run_bench,
    summarize,
    trace_run,
    write_csv,
    _instance,
    _solve_vector,
)
from .errors import ProjectionError
from .projection import Geometry, ProblemKind, project
from .rootfind import METHODS, TOL_DEFAULT

_EXIT_OK = 0
_EXIT_USAGE = 2
_EXIT_DOMAIN = 3


def _read_vector(path: str, fmt: str) -> np.ndarray:
    if fmt == "f64le":
        data = sys.stdin.buffer.read() if path == "-" else open(path, "rb").read()
        return np.frombuffer(data, dtype="<f8").astype(float)
    text = sys.stdin.read() if path == "-" else open(path, "r").read()
    toks = text.split()
    if not toks:
        raise ValueError("no values in input")
    return np.array([float(tok) for tok in toks], dtype=float)


def _write_vector(x: np.ndarray, path: str | None, fmt: str) -> None:
    if fmt == "f64le":
        payload = x.astype("<f8").tobytes()
        if path is None:
            sys.stdout.buffer.write(payload)
            sys.stdout.buffer.flush()
        else:
            with open(path, "wb") as fh:
                fh.write(payload)
        return
    text = " ".join(repr(float(val)) for val in x) + "\n"
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _resolve_radius(args, n: int) -> float:
    if args.t is not None:
        return args.t
    if not 0.0 < args.sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    return math.sqrt(n) - args.sigma * (math.sqrt(n) - 1.0)


def _kind(args) -> ProblemKind:
    return ProblemKind(Geometry(args.problem), args.nonneg)


def _cmd_project(args) -> int:
    v = _read_vector(args.input, args.format)
    t = _resolve_radius(args, v.size)
    sol = project(v, t, _kind(args), method=args.method, tol=args.tol)
    _write_vector(sol.x, args.output, args.format)
    print(f"case={sol.case_label} lambda={sol.lambda_star!r} "
          f"mu={sol.mu_star!r} iters={sol.iterations} "
          f"unique={'true' if sol.unique else 'false'}", file=sys.stderr)
    return _EXIT_OK


def _cmd_bench(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    config = BenchConfig(
        n=args.n,
        data_type=args.type,
        problem=_kind(args),
        sigma=None if args.t is not None else args.sigma,
        t=args.t,
        repeats=args.repeats,
        methods=methods,
        seed=args.seed,
        tol=args.tol,
    )
    rows = run_bench(config, jobs=args.jobs)
    write_csv(rows, sys.stdout)
    print(summarize(rows), file=sys.stderr)
    return _EXIT_OK


_NAN_COLS = ("lower_probe", "upper_probe")


def _cmd_trace(args) -> int:
    if args.input is not None:
        v = _read_vector(args.input, args.format)
        t = _resolve_radius(args, v.size)
    else:
        if args.n is None:
            raise ValueError("either --input or --n is required")
        probe = BenchConfig(n=args.n, data_type=args.type, problem=_kind(args),
                            sigma=None if args.t is not None else args.sigma,
                            t=args.t, seed=args.seed)
        t = probe.radius()
        v = _instance(probe, t, 0)
        v = _solve_vector(v, probe.problem)
    rows = trace_run(v, t, args.method, tol=args.tol)
    cols = ("k", "|U|", "l", "probe", "lambda", "lambda_S", "r")
    print(f"{cols[0]:>4} {cols[1]:>8} " + " ".join(f"{c:>16}" for c in cols[2:]))
    for row in rows:
        cells = [row.l, row.lower_probe, row.midpoint, row.upper_probe, row.r]
        txt = " ".join("-".rjust(16) if math.isnan(c) else f"{c:>16.10g}"
                       for c in cells)
        print(f"{row.k:>4} {row.active_size:>8} {txt}")
    return _EXIT_OK


def _add_radius_flags(p: argparse.ArgumentParser, sigma_default=None) -> None:
    group = p.add_mutually_exclusive_group(required=sigma_default is None)
    group.add_argument("--t", type=float, default=None, help="l1 radius")
    group.add_argument("--sigma", type=float, default=sigma_default,
                       help="sparseness level in (0,1); maps to t")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l1l2proj",
        description="Projections onto intersections of l1 and l2 balls/spheres.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project one vector")
    p.add_argument("--problem", required=True, choices=[g.value for g in Geometry])
    p.add_argument("--nonneg", action="store_true",
                   help="restrict to the nonnegative orthant")
    p.add_argument("--input", default="-", help="vector file, '-' for stdin")
    p.add_argument("--format", choices=("text", "f64le"), default="text")
    _add_radius_flags(p)
    p.add_argument("--method", choices=METHODS, default="qasb")
    p.add_argument("--tol", type=float, default=TOL_DEFAULT)
    p.add_argument("--output", default=None, help="defaults to stdout")
    p.set_defaults(func=_cmd_project)

    b = sub.add_parser("bench", help="timed benchmark, CSV on stdout")
    b.add_argument("--problem", required=True, choices=[g.value for g in Geometry])
    b.add_argument("--nonneg", action="store_true")
    b.add_argument("--type", type=int, choices=(1, 2, 3), required=True)
    b.add_argument("--n", type=int, required=True)
    _add_radius_flags(b, sigma_default=0.9)
    b.add_argument("--repeats", type=int, default=100)
    b.add_argument("--methods", default="qasb",
                   help="comma-separated subset of fs,bm,ssnsb,qasb")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--tol", type=float, default=TOL_DEFAULT)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=_cmd_bench)

    tr = sub.add_parser("trace", help="print the per-iteration table")
    tr.add_argument("--problem", required=True, choices=[g.value for g in Geometry])
    tr.add_argument("--nonneg", action="store_true")
    tr.add_argument("--method", choices=METHODS, default="qasb")
    tr.add_argument("--n", type=int, default=None)
    tr.add_argument("--type", type=int, choices=(1, 2, 3), default=1)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--input", default=None)
    tr.add_argument("--format", choices=("text", "f64le"), default="text")
    _add_radius_flags(tr, sigma_default=0.9)
    tr.add_argument("--tol", type=float, default=TOL_DEFAULT)
    tr.set_defaults(func=_cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "repeats", 1) < 1:
        parser.error("--repeats must be >= 1")
    try:
        return args.func(args)
    except ProjectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
