"""Command-line entry point: ``shepp <command> [options]``.

Exit codes: 0 on success, 2 on argument errors, 1 when a computation fails.
Progress and timing go to stderr; stdout or ``--out`` gets only the table.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from typing import Sequence

import numpy as np

from shepp import tables
from shepp.approximations import (
    ApproximationError,
    ApproximationId,
    F_T_approx,
    lambda_approx,
)
from shepp.config import DEFAULT, QuadConfig
from shepp.eigen import EigenConvergenceError
from shepp.montecarlo import McConfig, McDegenerateError, ProcessSpec, estimate_F, estimate_Lambda

COMMANDS = (
    "table1",
    "table2",
    "table3",
    "table4",
    "table5",
    "bounds-figure",
    "relerr-figure",
    "compare-figure",
    "eval",
    "simulate",
)


def parse_grid(text: str) -> tuple[float, ...]:
    """``a:b:step`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            a, b, step = (float(p) for p in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            return tuple(float(v) for v in np.round(a + step * np.arange(n), 10))
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected a:b:step") from None


def _approx_id(text: str) -> ApproximationId:
    try:
        return ApproximationId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shepp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--h", type=float, help="single barrier level")
    grid.add_argument("--h-grid", type=parse_grid, help="a:b:step, inclusive")
    p.add_argument("--T", type=float, help="horizon (eval, simulate)")
    p.add_argument("--approx", type=_approx_id, default=ApproximationId.A7)
    p.add_argument("--nodes", type=_positive(int), help="Gauss-Legendre nodes per axis")
    p.add_argument("--eig-nodes", type=_positive(int), help="Nystrom nodes")
    p.add_argument("--trunc", type=_positive(float), help="lower truncation length L")
    p.add_argument("--method", choices=("reduced", "full"), default="reduced")
    p.add_argument("--reps", type=_positive(int), default=100_000)
    p.add_argument("--step", type=_positive(float), default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--j", type=_positive(int), default=3, help="horizon for Lambda estimates")
    p.add_argument("--process", choices=("slepian", "ou", "broken-a", "broken-c"), default="slepian")
    p.add_argument("--a", type=_positive(float), default=1.0)
    p.add_argument("--c", type=_positive(float), default=1.0)
    p.add_argument("--no-bridge", action="store_true", help="disable the crossing correction")
    p.add_argument("--workers", type=_positive(int), default=1)
    p.add_argument(
        "--which",
        choices=("relerr", "lambda-curves", "correlation", "process"),
        help="variant for relerr-figure / compare-figure",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--skip", nargs="+", type=_approx_id, default=[], metavar="ID")
    p.add_argument("--expensive", action="store_true", help="enable A8")
    return p


def _cfg(args) -> QuadConfig:
    kw = {"method": args.method}
    if args.nodes is not None:
        kw["nodes"] = args.nodes
    if args.trunc is not None:
        kw["trunc"] = args.trunc
    if args.eig_nodes is not None:
        kw["eig_nodes"] = args.eig_nodes
    return DEFAULT.with_(**kw)


def _grid(args, default):
    if args.h_grid is not None:
        return args.h_grid
    if args.h is not None:
        return (args.h,)
    return default


def _spec(args) -> ProcessSpec:
    if args.process == "slepian":
        return ProcessSpec.slepian()
    if args.process == "ou":
        return ProcessSpec.ornstein_uhlenbeck()
    if args.process == "broken-a":
        return ProcessSpec.broken_a(args.a)
    return ProcessSpec.broken_c(args.c)


def _eval(args, cfg) -> tables.OutputTable:
    hs = _grid(args, (0.0,))
    cols = ["approximation", "h", "lambda", "Lambda"]
    if args.T is not None:
        cols.append("F_T")
    rows = []
    for h in hs:
        res = lambda_approx(args.approx, h, cfg, args.expensive)
        cells = [f"{h:g}", f"{res.lam:.6f}", f"{res.Lambda + 0.0:.6f}"]
        if args.T is not None:
            cells.append(f"{F_T_approx(args.approx, args.T, h, cfg, args.expensive):.6f}")
        rows.append((args.approx.name, cells))
    prov = tables._provenance("eval", T=args.T, **tables._cfg_params(cfg))
    return tables.OutputTable("eval", cols, rows, prov)


def _simulate(args) -> tables.OutputTable:
    spec = _spec(args)
    hs = _grid(args, (0.0,))
    T = args.T if args.T is not None else 1.0
    cols = ["process", "h", "T", "F_hat", "stderr", "Lambda_hat", "Lambda_stderr"]
    rows = []
    for h in hs:
        print(f"simulate: {spec.label} h={h:g}", file=sys.stderr, flush=True)
        mc = McConfig(
            T=T, h=h, step=args.step, reps=args.reps, seed=args.seed,
            bridge=not args.no_bridge, workers=args.workers,
        )
        F = estimate_F(spec, mc)
        L = estimate_Lambda(spec, h, args.j, mc)
        rows.append((
            spec.label,
            [f"{h:g}", f"{T:g}", f"{F.p_hat:.6f}", f"{F.stderr:.2e}",
             f"{L.Lambda:.6f}", f"{L.stderr:.2e}"],
        ))
    prov = tables._provenance(
        "simulate", j=args.j, step=args.step, reps=args.reps, seed=args.seed,
        bridge=not args.no_bridge,
    )
    return tables.OutputTable("simulate", cols, rows, prov)


def dispatch(args) -> tables.OutputTable:
    cfg = _cfg(args)
    prog = tables.stderr_progress
    cmd = args.command
    if cmd == "table1":
        return tables.table1(_grid(args, tables.TABLE_GRID), args.skip, cfg, args.expensive, prog)
    if cmd == "table2":
        return tables.table2(_grid(args, tables.TABLE_GRID), args.skip, cfg, prog)
    if cmd == "table3":
        return tables.table3(_grid(args, tables.LAMBDA_GRID), cfg, args.expensive, prog)
    if cmd == "table4":
        return tables.table4(_grid(args, tables.TABLE_GRID), cfg)
    if cmd == "table5":
        return tables.table5(_grid(args, tables.TABLE_GRID), cfg)
    if cmd == "bounds-figure":
        return tables.bounds_figure(_grid(args, (0.0, 2.0)), cfg=cfg)
    if cmd == "relerr-figure":
        hs = _grid(args, tables.LAMBDA_GRID)
        if args.which == "lambda-curves":
            return tables.lambda_curves(hs, cfg)
        return tables.relerr_figure(hs, cfg, prog)
    if cmd == "compare-figure":
        if args.which == "process":
            return tables.process_compare(
                _grid(args, (0.0, 0.5, 1.0, 1.5, 2.0)), args.a, args.c, args.j,
                args.step, args.reps, args.seed, cfg, prog,
            )
        ts = args.h_grid if args.h_grid is not None else parse_grid("0:1.5:0.05")
        return tables.correlation_compare(ts, args.a, args.c)
    if cmd == "eval":
        return _eval(args, cfg)
    return _simulate(args)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on bad arguments
    if args.which in ("correlation", "process") and args.command != "compare-figure":
        parser.error("--which correlation|process applies to compare-figure")
    if args.which in ("relerr", "lambda-curves") and args.command not in ("relerr-figure",):
        parser.error("--which relerr|lambda-curves applies to relerr-figure")
    if args.approx.expensive and args.command == "eval" and not args.expensive:
        parser.error("A8 requires --expensive")
    try:
        cfg = _cfg(args)
    except ValueError as exc:
        parser.error(str(exc))

    t0 = time.perf_counter()
    try:
        table = dispatch(args)
        table.check_finite()
    except ApproximationError as exc:
        print(f"shepp: error: {exc.id.name} at h={exc.h:g}: {exc}", file=sys.stderr)
        return 1
    except (
        ValueError,
        FloatingPointError,
        EigenConvergenceError,
        McDegenerateError,
        tables.NonFiniteError,
    ) as exc:
        print(f"shepp: error: {exc}", file=sys.stderr)
        return 1

    text = table.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{args.command}: done in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
