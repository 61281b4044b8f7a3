"""Dominant eigenvalues of the transition operators by the Nystrom method.

The operator ``(T p)(z) = int p(x) k(x -> z) dx`` on ``(-inf, h)`` is
discretized on a Gauss-Legendre rule ``(x_i, w_i)`` as

    M = D^{1/2} A D^{1/2},   A_ij = k(x_i -> x_j),   D = diag(w).

The eigenfunction ``p`` is a left eigenvector, so the iteration runs on
``M^T``; ``p(x_i) = u_i / sqrt(w_i)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from shepp.config import DEFAULT, QuadConfig
from shepp.exact import _q_matrix, kernel_p1, p1_density
from shepp.gaussian import Phi, phi
from shepp.quadrature import QuadratureRule, gauss_legendre

__all__ = [
    "KernelId",
    "DiscretizedOperator",
    "EigenResult",
    "EigenConvergenceError",
    "discretize",
    "power_iteration",
    "dominant_eigen",
    "lambda1_closed",
    "gauss_legendre",
]


class KernelId(enum.Enum):
    ONE_STEP = "one-step"
    TWO_STEP_CONDITIONAL = "two-step"


Kernel = Union[KernelId, Callable[[np.ndarray, np.ndarray], np.ndarray]]


class EigenConvergenceError(RuntimeError):
    def __init__(self, iterations: int, last_change: float, estimate: float):
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(last Rayleigh-quotient change {last_change:.3e}, estimate {estimate!r})"
        )
        self.iterations = iterations
        self.last_change = last_change
        self.estimate = estimate


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    matrix: np.ndarray
    rule: QuadratureRule
    kernel: Kernel


@dataclass(frozen=True, eq=False)
class EigenResult:
    eigenvalue: float
    density: np.ndarray
    nodes: np.ndarray
    iterations: int
    residual: float


def _kernel_matrix(kernel: Kernel, h: float, x: np.ndarray) -> np.ndarray:
    X, Z = x[:, None], x[None, :]
    if kernel is KernelId.ONE_STEP:
        return kernel_p1(h, X, Z)
    if kernel is KernelId.TWO_STEP_CONDITIONAL:
        # nodes are interior, so the boundary guard of kernel_q is not needed
        return np.linalg.det(_q_matrix(h, X, Z)) / p1_density(h, X)
    return np.asarray(kernel(X, Z), dtype=float)


def discretize(
    kernel: Kernel, h: float, rule: QuadratureRule | None = None, cfg: QuadConfig = DEFAULT
) -> DiscretizedOperator:
    if rule is None:
        rule = gauss_legendre(cfg.eig_nodes, cfg.lower(h), h)
    A = _kernel_matrix(kernel, h, rule.nodes)
    if not np.all(np.isfinite(A)):
        raise FloatingPointError("kernel matrix has non-finite entries")
    d = np.sqrt(rule.weights)
    return DiscretizedOperator(d[:, None] * A * d[None, :], rule, kernel)


def power_iteration(
    M: np.ndarray, tol: float = 1e-13, max_iter: int = 10_000
) -> tuple[float, np.ndarray, int]:
    """Dominant eigenpair of ``M`` from the all-ones start vector.

    Stops when successive Rayleigh quotients differ by less than ``tol``.
    The returned vector has unit 2-norm and nonnegative dominant component.
    """
    v = np.ones(M.shape[0])
    v /= np.linalg.norm(v)
    rq_prev = math.inf
    change = math.inf
    for it in range(1, max_iter + 1):
        w = M @ v
        rq = float(v @ w)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0, v, it
        v = w / nrm
        change = abs(rq - rq_prev)
        if change < tol:
            break
        rq_prev = rq
    else:
        raise EigenConvergenceError(max_iter, change, rq)
    rq = float(v @ (M @ v))
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return rq, v, it


def dominant_eigen(
    kernel: Kernel,
    h: float,
    rule: QuadratureRule | None = None,
    cfg: QuadConfig = DEFAULT,
    tol: float = 1e-13,
    max_iter: int = 10_000,
) -> EigenResult:
    """Perron root and eigen-density of the operator with kernel ``kernel``.

    ``kernel`` is a :class:`KernelId` or a callable ``k(x, z)`` evaluated on
    broadcast node arrays. The density is normalized to integrate to one
    under the rule.
    """
    op = discretize(kernel, h, rule, cfg)
    Mt = op.matrix.T
    lam, u, it = power_iteration(Mt, tol=tol, max_iter=max_iter)
    residual = float(np.max(np.abs(Mt @ u - lam * u)) / np.max(np.abs(u)))
    w = op.rule.weights
    q = u / np.sqrt(w)
    q = q / float(np.dot(w, q))
    return EigenResult(lam, q, op.rule.nodes, it, residual)


def lambda1_closed(h: float) -> float:
    """Closed-form approximation of the one-step Perron root.

    ``Phi(h) + phi(h)/h - phi(h)(phi(h) + h Phi(h)) / (Phi(h) - exp(-h^2/2)/2)``.
    Both fractions blow up as h -> 0+ and their difference tends to -1/4;
    ``h = 0`` returns the continuous extension 1/4. Below ``h = 1e-3`` the
    cancellation is avoided with the two-term Taylor expansion at 0.
    """
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    if h < _LAMBDA1_SERIES_CUTOFF:
        return 0.25 + h * (_LAMBDA1_C1 + h * _LAMBDA1_C2)
    P, p = Phi(h), phi(h)
    # Phi(h) - exp(-h^2/2)/2 without cancellation
    den = 0.5 * math.erf(h / math.sqrt(2.0)) - 0.5 * math.expm1(-0.5 * h * h)
    return P + p / h - p * (p + h * P) / den


# Taylor coefficients of lambda1_closed at h = 0 (from 80-digit arithmetic)
_LAMBDA1_C1 = 0.28964502729824842
_LAMBDA1_C2 = 0.08932522957531896
_LAMBDA1_SERIES_CUTOFF = 1e-3
