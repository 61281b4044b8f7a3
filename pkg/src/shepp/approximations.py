"""Approximations of Shepp's constants and of F_T(h) for long horizons.

Each approximation ``A0 .. A8`` supplies ``lambda(h) = exp(-Lambda(h))`` and
an anchor order ``k`` such that ``F_T(h) ~ F_k(h) lambda(h)^(T - k)``:

====  ==========================================  ======
id    lambda(h)                                   anchor
====  ==========================================  ======
A0    exp(-h phi(h))                              0
A1    closed-form one-step Perron root            1
A2    Nystrom Perron root of the two-step kernel  2
A3    F2(h | x_h) / F1(h | x_h)                   2
A4    F2(h) / F1(h)                               2
A5    F3(h | x_h) / F2(h | x_h)                   2
A6    F4(h | x_h) / F3(h | x_h)                   3
A7    F4(h) / F3(h)                               4
A8    F5(h) / F4(h)   (expensive, opt-in)         5
====  ==========================================  ======

``x_h = -phi(h)/Phi(h)`` is the mean of the normal law truncated at h.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from shepp import exact
from shepp.config import DEFAULT, QuadConfig
from shepp.eigen import KernelId, dominant_eigen, lambda1_closed
from shepp.gaussian import phi, x_h

__all__ = [
    "ApproximationId",
    "ApproximationError",
    "SheppResult",
    "BoundsResult",
    "lambda_approx",
    "Lambda_approx",
    "F_T_approx",
    "bounds",
    "relative_errors",
    "asympt_F1",
    "asympt_F2",
    "asympt_Lambda4",
]


class ApproximationId(enum.Enum):
    A0 = 0
    A1 = 1
    A2 = 2
    A3 = 3
    A4 = 4
    A5 = 5
    A6 = 6
    A7 = 7
    A8 = 8

    @classmethod
    def parse(cls, value) -> "ApproximationId":
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        text = str(value).strip().upper()
        if not text.startswith("A"):
            text = "A" + text
        try:
            return cls[text]
        except KeyError:
            raise ValueError(f"unknown approximation {value!r}") from None

    @property
    def anchor(self) -> int:
        return _ANCHORS[self]

    @property
    def expensive(self) -> bool:
        return self is ApproximationId.A8


_ANCHORS = {
    ApproximationId.A0: 0,
    ApproximationId.A1: 1,
    ApproximationId.A2: 2,
    ApproximationId.A3: 2,
    ApproximationId.A4: 2,
    ApproximationId.A5: 2,
    ApproximationId.A6: 3,
    ApproximationId.A7: 4,
    ApproximationId.A8: 5,
}


# largest horizon whose determinant integral an approximation needs
_ORDER = {
    ApproximationId.A3: 2,
    ApproximationId.A4: 2,
    ApproximationId.A5: 3,
    ApproximationId.A6: 4,
    ApproximationId.A7: 4,
    ApproximationId.A8: 5,
}


class ApproximationError(RuntimeError):
    def __init__(self, id: ApproximationId, h: float, cause: Exception):
        super().__init__(f"{id.name} failed at h={h:g}: {cause}")
        self.id = id
        self.h = h


@dataclass(frozen=True)
class SheppResult:
    h: float
    id: ApproximationId
    lam: float
    Lambda: float
    meta: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class BoundsResult:
    n: int
    h: float
    lower: float
    upper: float


# cached building blocks; QuadConfig is frozen and hashable


@lru_cache(maxsize=512)
def _F(n: int, h: float, cfg: QuadConfig) -> float:
    if n == 1:
        return exact.F1(h)
    if n == 2 and cfg.method == "reduced":
        return exact.F2(h, cfg)
    return exact.Fn(n, h, cfg=cfg)


@lru_cache(maxsize=512)
def _Fx(n: int, h: float, cfg: QuadConfig) -> float:
    return exact.Fn_given_x(n, h, x_h(h), cfg=cfg)


def _lam(id: ApproximationId, h: float, cfg: QuadConfig) -> float:
    A = ApproximationId
    if id is A.A0:
        return math.exp(-h * phi(h))
    if id is A.A1:
        return lambda1_closed(h)
    if id is A.A2:
        return dominant_eigen(KernelId.TWO_STEP_CONDITIONAL, h, cfg=cfg).eigenvalue
    if id is A.A3:
        return _Fx(2, h, cfg) / _Fx(1, h, cfg)
    if id is A.A4:
        return _F(2, h, cfg) / _F(1, h, cfg)
    if id is A.A5:
        return _Fx(3, h, cfg) / _Fx(2, h, cfg)
    if id is A.A6:
        return _Fx(4, h, cfg) / _Fx(3, h, cfg)
    if id is A.A7:
        return _F(4, h, cfg) / _F(3, h, cfg)
    return _F(5, h, cfg) / _F(4, h, cfg)


def lambda_approx(
    id, h: float, cfg: QuadConfig = DEFAULT, expensive: bool = False
) -> SheppResult:
    """``lambda(h)`` and ``Lambda(h)`` under approximation ``id``.

    ``A8`` needs ``expensive=True``.
    """
    id = ApproximationId.parse(id)
    h = float(h)
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    if id.expensive and not expensive:
        raise ValueError(f"{id.name} is expensive; pass expensive=True to run it")
    try:
        lam = _lam(id, h, cfg)
    except (ValueError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise ApproximationError(id, h, exc) from exc
    if not (0.0 < lam <= 1.0 + 1e-12) or not math.isfinite(lam):
        raise ApproximationError(id, h, ValueError(f"lambda={lam!r} outside (0, 1]"))
    meta = {"trunc": cfg.trunc, "method": cfg.method}
    if id is ApproximationId.A2:
        meta["eig_nodes"] = cfg.eig_nodes
    elif id.value >= 3:
        order = _ORDER[id]
        meta["order"] = order
        meta["nodes"] = cfg.det_nodes(order)
    return SheppResult(h=h, id=id, lam=lam, Lambda=0.0 - math.log(lam), meta=meta)


def Lambda_approx(id, h: float, cfg: QuadConfig = DEFAULT, expensive: bool = False) -> float:
    return lambda_approx(id, h, cfg, expensive).Lambda


def _prefix(k: int, h: float, cfg: QuadConfig) -> float:
    return 1.0 if k == 0 else _F(k, h, cfg)


def F_T_approx(
    id, T: float, h: float, cfg: QuadConfig = DEFAULT, expensive: bool = False
) -> float:
    """``F_k(h) lambda(h)^(T - k)`` with ``k`` the anchor order of ``id``."""
    id = ApproximationId.parse(id)
    if T < id.anchor:
        raise ValueError(f"{id.name} needs T >= {id.anchor}, got T={T}")
    res = lambda_approx(id, h, cfg, expensive)
    return _prefix(id.anchor, h, cfg) * res.lam ** (T - id.anchor)


def bounds(n: int, h: float, cfg: QuadConfig = DEFAULT) -> BoundsResult:
    """``-log F_n / (n+1) <= Lambda(h) <= -log F_n / n``."""
    if int(n) != n or not 1 <= n <= 4:
        raise ValueError(f"n must be in 1..4, got {n!r}")
    L = -math.log(_F(int(n), float(h), cfg))
    return BoundsResult(n=int(n), h=float(h), lower=L / (n + 1), upper=L / n)


def relative_errors(
    h_grid: Iterable[float],
    ids: Iterable = tuple(ApproximationId)[:7],
    cfg: QuadConfig = DEFAULT,
) -> dict[ApproximationId, np.ndarray]:
    """``lambda_i(h) / lambda_7(h) - 1`` for each id over ``h_grid``."""
    hs = [float(h) for h in h_grid]
    ref = np.array([lambda_approx(ApproximationId.A7, h, cfg).lam for h in hs])
    out = {}
    for id in ids:
        id = ApproximationId.parse(id)
        lam = np.array([lambda_approx(id, h, cfg).lam for h in hs])
        out[id] = lam / ref - 1.0
    return out


# large-h expansions, truncated before the remainder term


def asympt_F1(h: float) -> float:
    """``1 - (h + 2/h) phi(h)``."""
    return 1.0 - (h + 2.0 / h) * phi(h)


def asympt_F2(h: float) -> float:
    """``1 - (2h - 4 - 2/h) phi(h)``.

    This is the expansion as usually quoted. Numerically the exact ``F2``
    satisfies ``1 - F2(h) = (2h + 2/h) phi(h) + o(phi(h)/h)``; the ``-4``
    comes from an ``O(phi(h)^2)`` term and does not belong at this order.
    """
    return 1.0 - (2.0 * h - 4.0 - 2.0 / h) * phi(h)


def asympt_Lambda4(h: float) -> float:
    """``(h - 4 - 4/h) phi(h)``, the quoted expansion of ``log F1 - log F2``.

    Inherits the defect of :func:`asympt_F2`; the exact difference behaves
    like ``h phi(h)``.
    """
    return (h - 4.0 - 4.0 / h) * phi(h)
