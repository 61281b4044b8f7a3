"""Exact non-crossing probabilities of the Slepian process.

Closed forms for one unit of time, the one-dimensional-integral form of
``F_2``, the determinant representation of ``F_n`` for integer horizons,
and the one- and two-step transition kernels.

Notation: ``S(0) = s_0 = x`` and ``S(i) = s_i``. With ``y_0 = 0`` and
``y_k = k h - (s_0 + ... + s_{k-1})`` the integrand of ``F_n(h | x)`` is

    det[ phi(h + y_i - y_{j+1}) ]_{i,j=0..n}  /  phi(x)

over ``s_1, ..., s_n < h``. The variable ``s_0`` enters only the first row
and ``s_n`` only the last column, so integrating either of them out replaces
that row/column by normal CDF values at ``s = h`` (and the shared corner by
``G(u) = u Phi(u) + phi(u)``). The ``"reduced"`` method uses this to drop
one dimension from ``F_n(h | x)`` and two from ``F_n(h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from shepp.config import DEFAULT, QuadConfig
from shepp.gaussian import SQRT_2PI, K, Phi, U, J, V, phi
from shepp.quadrature import QuadratureRule, gauss_legendre, tensor_integrate

MAX_N = 5

__all__ = [
    "DetContext",
    "F1_given_x",
    "F1",
    "F2",
    "F2_hat",
    "F2_given_x",
    "F2_given_x_hat",
    "shepp_matrix",
    "det_integrand",
    "Fn_given_x",
    "Fn",
    "kernel_p1",
    "p1_density",
    "kernel_q",
]


def _scalar(out):
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# one unit of time
# ---------------------------------------------------------------------------


def F1_given_x(h: float, x):
    """``P(max_{[0,1]} S < h | S(0) = x)``; zero for ``x >= h``."""
    x = np.asarray(x, dtype=float)
    below = x < h
    xs = np.where(below, x, h - 1.0)
    # Phi(x) phi(h)/phi(x) in log-space; the ratio alone overflows for x << 0
    val = Phi(h) - np.exp(0.5 * (xs * xs - h * h) + log_ndtr(xs))
    return _scalar(np.where(below, val, 0.0))


def F1(h: float) -> float:
    """``P(max_{[0,1]} S < h) = Phi(h)^2 - phi(h) (h Phi(h) + phi(h))``."""
    P, p = Phi(h), phi(h)
    return P * P - p * (h * P + p)


# ---------------------------------------------------------------------------
# two units of time: one-dimensional integrals and closed-form approximations
# ---------------------------------------------------------------------------


def _semi_rule(cfg: QuadConfig) -> QuadratureRule:
    return gauss_legendre(cfg.semi_nodes, 0.0, cfg.semi_length)


def F2(h: float, cfg: QuadConfig = DEFAULT) -> float:
    """``P(max_{[0,2]} S < h)`` from its one-dimensional-integral form."""
    rule = _semi_rule(cfg)
    y = rule.nodes
    P, p = Phi(h), phi(h)
    r2 = math.sqrt(2.0)
    tail = rule.integrate(Phi(h - y) ** 2 * phi(h + y))
    cross = rule.integrate(Phi(h - y) * (Phi(r2 * y) - 0.5)) * phi(r2 * h)
    return (
        P ** 3
        + p * p * P
        + 0.5 * p * p * ((h * h - 1.0) * P + h * p)
        + tail
        - 2.0 * p * P * (h * P + p)
        - cross / r2
    )


def F2_hat(h: float) -> float:
    """Closed-form approximation of ``F2(h)`` built on :func:`phi_lin`.

    Accurate to about 1.4e-3 at h = 0 and to 1e-5 for h >= 2.
    """
    P, p = Phi(h), phi(h)
    b = 2.0 * h - 0.717
    b1, b2, b3, b4 = b - 0.717, 2.0 * h, b + 2.151, b + 1.434
    head = (
        P ** 3
        + p * p * P
        + 0.5 * p * p * ((h * h - 1.0) * P + h * p)
        - 2.0 * p * P * (h * P + p)
        + Phi(2.0 * h)
        - P
    )
    bracket = (
        2.0 * J(0.916, b, h)
        - 0.5 * J(1.332, b1, h)
        - V(1.416, b, h) / SQRT_2PI
        + 2.0 / SQRT_2PI * V(1.0, b2, h)
        + K(1.5, b2, h) / math.pi
        - 0.5 * (K(1.332, b3, 0.0) - 2.0 / SQRT_2PI * U(1.416, b4, 0.0))
    )
    return head - 0.5 / SQRT_2PI * math.exp(-2.0 * h * h) * bracket


def _check_x0(x0: float):
    if x0 > 0.0:
        raise ValueError(f"x0 must be <= 0 for this representation, got {x0}")


def _F2_given_x_head(h: float, x0: float) -> float:
    P, p, px = Phi(h), phi(h), phi(x0)
    return P * P + (p * p * x0 * Phi(x0) - p * P * Phi(x0)) / px - h * p * P


def F2_given_x(h: float, x0: float, cfg: QuadConfig = DEFAULT) -> float:
    """``F_2(h | x0)`` for ``x0 <= 0`` via two integrals over ``(h, inf)``."""
    _check_x0(x0)
    if x0 >= h:
        return 0.0
    rule = _semi_rule(cfg)
    y = h + rule.nodes
    integrand = phi(y) * (
        Phi(2.0 * h - y) * phi(h + x0 - y) - Phi(h + x0 - y) * phi(2.0 * h - y)
    )
    return _F2_given_x_head(h, x0) + rule.integrate(integrand) / phi(x0)


def F2_given_x_hat(h: float, x0: float) -> float:
    """Closed-form approximation of ``F_2(h | x0)`` (``x0 <= 0``)."""
    _check_x0(x0)
    if x0 >= h:
        return 0.0
    px = phi(x0)
    s = h + x0
    r2 = math.sqrt(2.0)
    u = s / r2
    t2 = phi(u) / (r2 * px) * (Phi(2.0 * r2 * h - u) - Phi(r2 * h - u))
    ya = 2.664 * h + x0 + 0.717
    yb = 2.664 * h + x0 - 0.717
    t3 = (
        phi(s)
        / (2.0 * SQRT_2PI * px)
        * math.exp(-1.664 * h * h)
        * (
            math.exp(-1.434 * h) * (K(1.416, ya, 2.0 * h) - K(1.416, ya, h))
            - math.exp(1.434 * h) * (K(1.416, yb, math.inf) - K(1.416, yb, 2.0 * h))
        )
    )
    yc = 2.0 * h + 0.832 * s - 0.717
    t4 = (
        math.exp(0.717 * s - 2.0 * h * h - 0.416 * s * s)
        / (4.0 * math.pi * px)
        * (K(1.416, yc, math.inf) - K(1.416, yc, h))
    )
    return _F2_given_x_head(h, x0) + t2 - t3 - t4


# ---------------------------------------------------------------------------
# determinant representation for integer horizons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetContext:
    """Horizon ``n``, level ``h`` and start value ``x = S(0)``."""

    n: int
    h: float
    x: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")


def _G(u):
    return u * Phi(u) + phi(u)


def _arguments(h: float, s: np.ndarray) -> np.ndarray:
    """``h + y_i - y_{j+1}`` for a batch ``s`` of shape ``(m, n+1)``."""
    m, n1 = s.shape
    k = np.arange(n1 + 1)
    csum = np.concatenate([np.zeros((m, 1)), np.cumsum(s, axis=1)], axis=1)
    y = k * h - csum  # y_0 .. y_{n+1}
    return h + y[:, :-1, None] - y[:, None, 1:]


def shepp_matrix(h: float, s, first_row: bool = False, last_col: bool = False):
    """Matrix whose determinant is the integrand, for ``s = (s_0, ..., s_n)``.

    With ``first_row`` the first row is integrated over ``s_0 < h`` and with
    ``last_col`` the last column over ``s_n < h``; the corresponding entries
    of ``s`` are ignored.
    """
    s = np.array(s, dtype=float)
    single = s.ndim == 1
    s = np.atleast_2d(s)
    if first_row:
        s[:, 0] = h
    if last_col:
        s[:, -1] = h
    A = _arguments(h, s)
    M = phi(A)
    if first_row:
        M[:, 0, :] = Phi(A[:, 0, :])
    if last_col:
        M[:, :, -1] = Phi(A[:, :, -1])
    if first_row and last_col:
        M[:, 0, -1] = _G(A[:, 0, -1])
    return M[0] if single else M


def det_integrand(ctx: DetContext, s) -> np.ndarray | float:
    """Determinant integrand at ``s = (s_1, ..., s_n)`` (batch on leading axes).

    Not divided by ``phi(x)``.
    """
    s = np.asarray(s, dtype=float)
    if s.shape[-1] != ctx.n:
        raise ValueError(f"expected {ctx.n} coordinates, got {s.shape[-1]}")
    lead = s.shape[:-1]
    flat = s.reshape(-1, ctx.n)
    full = np.concatenate([np.full((len(flat), 1), ctx.x), flat], axis=1)
    out = np.linalg.det(shepp_matrix(ctx.h, full)).reshape(lead)
    return _scalar(out)


def _check_n(n: int):
    if int(n) != n or not 1 <= n <= MAX_N:
        raise ValueError(f"n must be an integer in 1..{MAX_N}, got {n!r}")


def _rule(n: int, h: float, quad: QuadratureRule | None, cfg: QuadConfig):
    if quad is not None:
        return quad
    return gauss_legendre(cfg.det_nodes(n), cfg.lower(h), h)


def Fn_given_x(
    n: int,
    h: float,
    x: float,
    quad: QuadratureRule | None = None,
    cfg: QuadConfig = DEFAULT,
) -> float:
    """``F_n(h | x)`` by tensor Gauss-Legendre quadrature of the determinant.

    ``quad`` is the per-axis rule (defaults to ``cfg``'s rule on
    ``[min(h,0) - L, h]``). The raw quadrature value is returned, without
    clamping to [0, 1].
    """
    _check_n(n)
    if x >= h:
        return 0.0
    rule = _rule(n, h, quad, cfg)
    if cfg.method == "full":

        def f(pts):
            m = len(pts)
            s = np.concatenate([np.full((m, 1), x), pts], axis=1)
            return np.linalg.det(shepp_matrix(h, s))

        dim = n
    else:

        def f(pts):
            m = len(pts)
            s = np.concatenate([np.full((m, 1), x), pts, np.zeros((m, 1))], axis=1)
            return np.linalg.det(shepp_matrix(h, s, last_col=True))

        dim = n - 1
    return tensor_integrate(f, rule, dim) / phi(x)


def Fn(
    n: int,
    h: float,
    quad: QuadratureRule | None = None,
    cfg: QuadConfig = DEFAULT,
) -> float:
    """``F_n(h) = int_{-inf}^{h} F_n(h | x) phi(x) dx`` for integer ``n``."""
    _check_n(n)
    rule = _rule(n, h, quad, cfg)
    if cfg.method == "full":

        def f(pts):
            return np.linalg.det(shepp_matrix(h, pts))

        dim = n + 1
    else:

        def f(pts):
            m = len(pts)
            s = np.concatenate([np.zeros((m, 1)), pts, np.zeros((m, 1))], axis=1)
            return np.linalg.det(shepp_matrix(h, s, first_row=True, last_col=True))

        dim = n - 1
    return tensor_integrate(f, rule, dim)


# ---------------------------------------------------------------------------
# transition kernels
# ---------------------------------------------------------------------------


def kernel_p1(h: float, x, z):
    """One-step kernel ``phi(z) (1 - exp(-(h - z)(h - x)))`` for x, z < h."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    return _scalar(phi(z) * -np.expm1(-(h - z) * (h - x)))


def p1_density(h: float, z):
    """Sub-probability density of ``S(1)`` on ``{max_{[0,1]} S < h}``."""
    z = np.asarray(z, dtype=float)
    return _scalar(Phi(h) * phi(z) - Phi(z) * phi(h))


def _q_matrix(h: float, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    x, z = np.broadcast_arrays(x, z)
    M = np.empty(x.shape + (3, 3))
    M[..., 0, 0] = Phi(h)
    M[..., 0, 1] = Phi(x)
    M[..., 0, 2] = Phi(x + z - h)
    M[..., 1, 0] = phi(h)
    M[..., 1, 1] = phi(x)
    M[..., 1, 2] = phi(x + z - h)
    M[..., 2, 0] = phi(2.0 * h - x)
    M[..., 2, 1] = phi(h)
    M[..., 2, 2] = phi(z)
    return M


def kernel_q(h: float, x, z, cfg: QuadConfig = DEFAULT):
    """Two-step kernel: density of ``S(2)`` given ``S(1) = x``, no crossing on [0, 2].

    The first unit of time only fixes the initial condition for ``[1, 2]``.
    Raises ``ValueError`` if any ``x >= h - eps_guard`` (the normalizing
    density vanishes at the boundary).
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(x >= h - cfg.eps_guard):
        raise ValueError(f"x must be below h - {cfg.eps_guard:g}")
    det = np.linalg.det(_q_matrix(h, x, z))
    return _scalar(det / p1_density(h, x))
