"""Regenerate every table and the deterministic figure data into a directory.

    python3 scripts/reproduce_tables.py --out results/ [--expensive]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from shepp import tables
from shepp.config import DEFAULT


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--expensive", action="store_true", help="add A8 to table 1 and use it at h=0 in table 3")
    args = p.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)

    prog = tables.stderr_progress
    jobs = {
        "table1.csv": lambda: tables.table1(expensive=args.expensive, progress=prog),
        "table2.csv": lambda: tables.table2(progress=prog),
        "table3.csv": lambda: tables.table3(expensive=args.expensive, progress=prog),
        "table4.csv": lambda: tables.table4(),
        "table5.csv": lambda: tables.table5(),
        "fig_bounds.csv": lambda: tables.bounds_figure(),
        "fig_relerr.csv": lambda: tables.relerr_figure(tables.LAMBDA_GRID, DEFAULT, prog),
        "fig_lambda_curves.csv": lambda: tables.lambda_curves(tables.LAMBDA_GRID),
        "fig_correlation.csv": lambda: tables.correlation_compare([k / 20 for k in range(31)]),
    }
    for name, build in jobs.items():
        t0 = time.perf_counter()
        table = build()
        table.check_finite()
        (args.out / name).write_text(table.to_csv(), encoding="utf-8")
        print(f"{name}: {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
