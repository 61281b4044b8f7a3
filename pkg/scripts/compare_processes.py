"""Monte Carlo decay rates of the Slepian process and its comparison processes.

Estimates Lambda_i(h) = -log(F_j / F_{j-1}) for the Ornstein-Uhlenbeck
process, the two broken-line processes and the Slepian process, and writes
them next to the quadrature value of Lambda(h) as long-format CSV.

    python3 scripts/compare_processes.py --h-grid 0:2:0.5 --reps 200000 --out compare.csv
"""

from __future__ import annotations

import argparse
import sys

from shepp import tables
from shepp.cli import parse_grid


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--h-grid", type=parse_grid, default=parse_grid("0:2:0.5"))
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--j", type=int, default=3)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    args = p.parse_args(argv)

    table = tables.process_compare(
        args.h_grid, args.a, args.c, args.j, args.step, args.reps, args.seed,
        progress=tables.stderr_progress,
    )
    table.check_finite()
    text = table.to_csv()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
