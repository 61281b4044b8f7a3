"""Table and figure-data builders with CSV/JSON writers."""

from __future__ import annotations

import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from shepp import __version__
from shepp.approximations import (
    ApproximationId,
    bounds,
    lambda_approx,
)
from shepp.config import DEFAULT, QuadConfig
from shepp.exact import F2, F2_given_x, F2_given_x_hat, F2_hat
from shepp.gaussian import x_h
from shepp.montecarlo import McConfig, ProcessSpec, estimate_Lambda, rho

TABLE_GRID = tuple(np.round(np.arange(0.0, 4.0 + 1e-9, 0.5), 10))
LAMBDA_GRID = tuple(np.round(np.arange(0.0, 3.9 + 1e-9, 0.1), 10))

Progress = Callable[[str], None]


def _quiet(msg: str) -> None:
    pass


def stderr_progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


class NonFiniteError(RuntimeError):
    pass


@dataclass
class OutputTable:
    """Header row plus labelled rows of pre-formatted cells."""

    name: str
    columns: list[str]
    rows: list[tuple[str, list[str]]]
    provenance: dict = field(default_factory=dict)

    def check_finite(self) -> None:
        for label, cells in self.rows:
            for c in cells:
                try:
                    v = float(c)
                except ValueError:
                    continue
                if not math.isfinite(v):
                    raise NonFiniteError(f"non-finite value in row {label!r} of {self.name}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# shepp {self.provenance.get('version', __version__)}\n")
        for key, val in self.provenance.items():
            if key != "version":
                buf.write(f"# {key}: {val}\n")
        buf.write(",".join(self.columns) + "\n")
        for label, cells in self.rows:
            buf.write(",".join([label, *cells]) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        def cell(c):
            try:
                return float(c)
            except ValueError:
                return c

        records = [dict(zip(self.columns, [label, *map(cell, cells)])) for label, cells in self.rows]
        doc = {"provenance": self.provenance, "columns": self.columns, "records": records}
        return json.dumps(doc, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _hcol(h: float) -> str:
    return f"{h:g}"


def _provenance(command: str, **params) -> dict:
    prov = {"version": __version__, "command": command}
    prov["parameters"] = "; ".join(f"{k}={v}" for k, v in params.items())
    return prov


def _cfg_params(cfg: QuadConfig) -> dict:
    return {
        "method": cfg.method,
        "trunc": cfg.trunc,
        "nodes": cfg.nodes if cfg.nodes is not None else "default",
        "eig_nodes": cfg.eig_nodes,
    }


def table1(
    h_grid: Sequence[float] = TABLE_GRID,
    skip: Iterable = (),
    cfg: QuadConfig = DEFAULT,
    expensive: bool = False,
    progress: Progress = _quiet,
) -> OutputTable:
    """``lambda_i(h)`` for i = 0..7 (and 8 with ``expensive``)."""
    skip = {ApproximationId.parse(s) for s in skip}
    ids = [i for i in ApproximationId if i not in skip and (expensive or not i.expensive)]
    rows = []
    for id in ids:
        cells = []
        for h in h_grid:
            if id.value >= 5:
                progress(f"table1: {id.name} h={h:g}")
            cells.append(f"{lambda_approx(id, h, cfg, expensive).lam:.6f}")
        rows.append((f"lambda{id.value}", cells))
    prov = _provenance("table1", h=list(map(_hcol, h_grid)), **_cfg_params(cfg))
    return OutputTable("table1", ["series", *map(_hcol, h_grid)], rows, prov)


def table2(
    h_grid: Sequence[float] = TABLE_GRID,
    skip: Iterable = (),
    cfg: QuadConfig = DEFAULT,
    progress: Progress = _quiet,
) -> OutputTable:
    """Relative errors ``lambda_i / lambda_7 - 1`` for i = 0..6."""
    skip = {ApproximationId.parse(s) for s in skip}
    ids = [i for i in list(ApproximationId)[:7] if i not in skip]
    ref = []
    for h in h_grid:
        progress(f"table2: A7 h={h:g}")
        ref.append(lambda_approx(ApproximationId.A7, h, cfg).lam)
    rows = []
    for id in ids:
        cells = [
            f"{lambda_approx(id, h, cfg).lam / r - 1.0:.2e}" for h, r in zip(h_grid, ref)
        ]
        rows.append((f"lambda{id.value}", cells))
    prov = _provenance("table2", h=list(map(_hcol, h_grid)), **_cfg_params(cfg))
    return OutputTable("table2", ["series", *map(_hcol, h_grid)], rows, prov)


def lambda3_decimals(h: float) -> int:
    """Printed precision of the Lambda(h) table: 4, 6 or 7 decimals."""
    if h <= 1.5 + 1e-9:
        return 4
    if h <= 2.3 + 1e-9:
        return 6
    return 7


def table3(
    h_grid: Sequence[float] = LAMBDA_GRID,
    cfg: QuadConfig = DEFAULT,
    expensive: bool = False,
    progress: Progress = _quiet,
) -> OutputTable:
    """``Lambda(h)`` from A7; the h = 0 entry uses A8 when ``expensive``."""
    rows = []
    for h in h_grid:
        id = ApproximationId.A8 if (h == 0 and expensive) else ApproximationId.A7
        progress(f"table3: {id.name} h={h:g}")
        L = lambda_approx(id, h, cfg, expensive).Lambda
        rows.append((_hcol(h), [f"{L:.{lambda3_decimals(h)}f}", id.name]))
    prov = _provenance("table3", expensive=expensive, **_cfg_params(cfg))
    return OutputTable("table3", ["h", "Lambda", "approximation"], rows, prov)


def table4(h_grid: Sequence[float] = TABLE_GRID, cfg: QuadConfig = DEFAULT) -> OutputTable:
    """``F2(h)`` against its closed-form approximation."""
    rows = [
        ("F2", [f"{F2(h, cfg):.6f}" for h in h_grid]),
        ("F2_hat", [f"{F2_hat(h):.6f}" for h in h_grid]),
    ]
    prov = _provenance(
        "table4", semi_nodes=cfg.semi_nodes, semi_length=cfg.semi_length
    )
    return OutputTable("table4", ["series", *map(_hcol, h_grid)], rows, prov)


def table5(h_grid: Sequence[float] = TABLE_GRID, cfg: QuadConfig = DEFAULT) -> OutputTable:
    """``F2(h | x0)`` and its approximation at ``x0 = x_h``."""
    xs = [x_h(h) for h in h_grid]
    rows = [
        ("x0", [f"{x:.6f}" for x in xs]),
        ("F2_given_x0", [f"{F2_given_x(h, x, cfg):.6f}" for h, x in zip(h_grid, xs)]),
        ("F_hat", [f"{F2_given_x_hat(h, x):.6f}" for h, x in zip(h_grid, xs)]),
    ]
    prov = _provenance("table5", x0="x_h", semi_nodes=cfg.semi_nodes)
    return OutputTable("table5", ["series", *map(_hcol, h_grid)], rows, prov)


# --------------------------------------------------------------------------
# figure data, long format
# --------------------------------------------------------------------------


def _num(v: float) -> str:
    return f"{v:.12g}"


def bounds_figure(
    h_grid: Sequence[float] = (0.0, 2.0),
    ns: Sequence[int] = (1, 2, 3, 4),
    cfg: QuadConfig = DEFAULT,
) -> OutputTable:
    """Lower/upper bounds on Lambda(h) against n, with the A7 value."""
    rows = []
    for h in h_grid:
        L7 = lambda_approx(ApproximationId.A7, h, cfg).Lambda
        for n in ns:
            b = bounds(n, h, cfg)
            rows.append(("lower", [_hcol(h), str(n), _num(b.lower)]))
            rows.append(("upper", [_hcol(h), str(n), _num(b.upper)]))
            rows.append(("Lambda7", [_hcol(h), str(n), _num(L7)]))
    prov = _provenance("bounds-figure", n=list(ns), **_cfg_params(cfg))
    return OutputTable("bounds-figure", ["series", "h", "n", "value"], rows, prov)


def relerr_figure(
    h_grid: Sequence[float], cfg: QuadConfig = DEFAULT, progress: Progress = _quiet
) -> OutputTable:
    rows = []
    ref = {}
    for h in h_grid:
        progress(f"relerr-figure: A7 h={h:g}")
        ref[h] = lambda_approx(ApproximationId.A7, h, cfg).lam
    for id in list(ApproximationId)[:7]:
        for h in h_grid:
            rows.append((id.name, [_hcol(h), _num(lambda_approx(id, h, cfg).lam / ref[h] - 1)]))
    prov = _provenance("relerr-figure", which="relerr", **_cfg_params(cfg))
    return OutputTable("relerr-figure", ["series", "h", "value"], rows, prov)


def lambda_curves(h_grid: Sequence[float], cfg: QuadConfig = DEFAULT) -> OutputTable:
    rows = []
    for id in (ApproximationId.A0, ApproximationId.A1, ApproximationId.A6):
        for h in h_grid:
            rows.append((id.name, [_hcol(h), _num(lambda_approx(id, h, cfg).lam)]))
    prov = _provenance("relerr-figure", which="lambda-curves", **_cfg_params(cfg))
    return OutputTable("lambda-curves", ["series", "h", "value"], rows, prov)


def comparison_specs(a: float = 1.0, c: float = 1.0) -> list[ProcessSpec]:
    return [
        ProcessSpec.slepian(),
        ProcessSpec.ornstein_uhlenbeck(),
        ProcessSpec.broken_a(a),
        ProcessSpec.broken_c(c),
    ]


def correlation_compare(
    t_grid: Sequence[float], a: float = 1.0, c: float = 1.0
) -> OutputTable:
    rows = []
    for spec in comparison_specs(a, c):
        for t in t_grid:
            rows.append((spec.label, [_hcol(t), _num(rho(spec, t))]))
    prov = _provenance("compare-figure", which="correlation", a=a, c=c)
    return OutputTable("correlation-compare", ["series", "t", "value"], rows, prov)


def process_compare(
    h_grid: Sequence[float],
    a: float = 1.0,
    c: float = 1.0,
    j: int = 3,
    step: float = 0.01,
    reps: int = 100_000,
    seed: int = 0,
    cfg: QuadConfig = DEFAULT,
    progress: Progress = _quiet,
) -> OutputTable:
    """Monte Carlo ``Lambda_i(h)`` for the four processes, plus the A7 curve."""
    rows = []
    for h in h_grid:
        rows.append(
            ("slepian_A7", [_hcol(h), _num(lambda_approx(ApproximationId.A7, h, cfg).Lambda), ""])
        )
    for spec in comparison_specs(a, c):
        for h in h_grid:
            progress(f"compare-figure: {spec.label} h={h:g}")
            mc = McConfig(T=j, h=h, step=step, reps=reps, seed=seed)
            est = estimate_Lambda(spec, h, j, mc)
            rows.append((spec.label, [_hcol(h), _num(est.Lambda), _num(est.stderr)]))
    prov = _provenance(
        "compare-figure", which="process", a=a, c=c, j=j, step=step, reps=reps, seed=seed
    )
    return OutputTable("process-compare", ["series", "h", "value", "stderr"], rows, prov)


FIGURES = ("bounds", "relerr", "lambda-curves", "process-compare", "correlation-compare")


def emit_figure_data(which: str, grid: Sequence[float], out, **kw) -> OutputTable:
    """Build figure data ``which`` over ``grid`` and write CSV to ``out``.

    ``out`` is a path or a text stream.
    """
    builders = {
        "bounds": bounds_figure,
        "relerr": relerr_figure,
        "lambda-curves": lambda_curves,
        "process-compare": process_compare,
        "correlation-compare": correlation_compare,
    }
    if which not in builders:
        raise ValueError(f"which must be one of {FIGURES}, got {which!r}")
    table = builders[which](grid, **kw)
    table.check_finite()
    text = table.to_csv()
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return table
