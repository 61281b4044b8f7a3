"""Gauss-Legendre rules and tensor-product integration."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights of an N-point rule on ``[a, b]``."""

    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float

    @property
    def N(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def _legendre(N: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(N)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(N: int, a: float, b: float) -> QuadratureRule:
    """N-point Gauss-Legendre rule mapped to ``[a, b]`` (exact to degree 2N-1)."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    x, w = _legendre(int(N))
    half = 0.5 * (b - a)
    nodes = half * x + 0.5 * (a + b)
    weights = half * w
    return QuadratureRule(nodes=nodes, weights=weights, a=float(a), b=float(b))


def tensor_integrate(
    f: Callable[[np.ndarray], np.ndarray],
    rule: QuadratureRule,
    dim: int,
    max_points: int = 1 << 18,
) -> float:
    """Integrate ``f`` over ``[a, b]^dim`` with the tensor product of ``rule``.

    ``f`` receives an array of shape ``(m, dim)`` and returns ``m`` values.
    Points are processed in fixed-size slabs along the leading axis and the
    slab sums are accumulated in a fixed order, so the result does not
    depend on how the work is split.
    """
    if dim == 0:
        return float(np.asarray(f(np.zeros((1, 0))))[0])
    x, w = rule.nodes, rule.weights
    N = len(x)
    # number of leading axes enumerated in Python so that each slab fits
    lead = 0
    while lead < dim and N ** (dim - lead) > max_points:
        lead += 1
    inner = dim - lead
    if inner:
        grids = np.meshgrid(*([x] * inner), indexing="ij")
        inner_pts = np.stack([g.ravel() for g in grids], axis=-1)
        wgrids = np.meshgrid(*([w] * inner), indexing="ij")
        inner_w = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    else:
        inner_pts = np.zeros((1, 0))
        inner_w = np.ones(1)
    total = 0.0
    for idx in np.ndindex(*([N] * lead)):
        head = x[list(idx)]
        head_w = float(np.prod(w[list(idx)])) if lead else 1.0
        pts = np.concatenate(
            [np.broadcast_to(head, (len(inner_pts), lead)), inner_pts], axis=1
        )
        total += head_w * float(np.dot(inner_w, f(pts)))
    return total
