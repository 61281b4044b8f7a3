"""Standard normal density/CDF and the closed-form Gaussian integrals K, U, J, V.

``K(x, y, z)`` and ``U(x, y, z)`` are the integrals

    K = int_{-inf}^{z} exp(-x t^2 + y t) dt,
    U = int_{-inf}^{z} t exp(-x t^2 + y t) dt,

for x > 0, written through the normal CDF. ``J`` and ``V`` are their
increments from 0 to z.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import log_ndtr, ndtr

SQRT_2PI = math.sqrt(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI

# exponent above which K is assembled in log-space
_LOG_SPACE_THRESHOLD = 700.0


def phi(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    out = INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return out if out.ndim else float(out)


def Phi(x):
    """Standard normal CDF (accepts +-inf)."""
    out = ndtr(np.asarray(x, dtype=float))
    return out if np.ndim(out) else float(out)


def phi_lin(t):
    """Two-branch exponential approximation of the normal CDF.

    ``0.5 exp(0.717 t - 0.416 t^2)`` for t <= 0 and
    ``1 - 0.5 exp(-0.717 t - 0.416 t^2)`` for t > 0. Absolute error is
    below 7e-3 everywhere.
    """
    t = np.asarray(t, dtype=float)
    lower = 0.5 * np.exp(0.717 * t - 0.416 * t * t)
    upper = 1.0 - 0.5 * np.exp(-0.717 * t - 0.416 * t * t)
    out = np.where(t <= 0.0, lower, upper)
    return out if out.ndim else float(out)


def x_h(h):
    """Mean of the standard normal truncated to (-inf, h]: ``-phi(h)/Phi(h)``."""
    h = np.asarray(h, dtype=float)
    # phi/Phi computed as exp(log phi - log Phi) so very negative h stays finite
    out = -np.exp(-0.5 * h * h - math.log(SQRT_2PI) - log_ndtr(h))
    return out if out.ndim else float(out)


def _check_x(x):
    if np.any(np.asarray(x) <= 0.0):
        raise ValueError(f"quadratic coefficient must be positive, got x={x!r}")


def K(x, y, z):
    """``int_{-inf}^{z} exp(-x t^2 + y t) dt``; ``z`` may be ``inf``."""
    _check_x(x)
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    expo = y * y / (4.0 * x)
    arg = np.where(np.isinf(z), np.inf, (2.0 * x * z - y) / np.sqrt(2.0 * x))
    pref = np.sqrt(math.pi / x)
    with np.errstate(over="ignore", divide="ignore"):
        direct = pref * np.exp(expo) * ndtr(arg)
        logged = pref * np.exp(expo + log_ndtr(arg))
    out = np.where(expo > _LOG_SPACE_THRESHOLD, logged, direct)
    return out if out.ndim else float(out)


def U(x, y, z):
    """``int_{-inf}^{z} t exp(-x t^2 + y t) dt``; ``z`` may be ``inf``."""
    _check_x(x)
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    finite = np.isfinite(z)
    zf = np.where(finite, z, 0.0)
    edge = np.where(finite, np.exp(zf * (y - x * zf)), 0.0)
    out = (y * np.asarray(K(x, y, z)) - edge) / (2.0 * x)
    return out if out.ndim else float(out)


def J(x, y, z):
    """``K(x, y, z) - K(x, y, 0)``."""
    out = np.asarray(K(x, y, z)) - np.asarray(K(x, y, 0.0))
    return out if out.ndim else float(out)


def V(x, y, z):
    """``U(x, y, z) - U(x, y, 0)``."""
    out = np.asarray(U(x, y, z)) - np.asarray(U(x, y, 0.0))
    return out if out.ndim else float(out)
