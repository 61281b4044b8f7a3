"""Boundary non-crossing probabilities of the Slepian process and Shepp's constants."""

__version__ = "0.1.0"

from shepp.gaussian import phi, Phi, phi_lin, x_h, K, U, J, V
from shepp.quadrature import QuadratureRule, gauss_legendre
from shepp.config import QuadConfig
from shepp.exact import (
    F1,
    F1_given_x,
    F2,
    F2_given_x,
    F2_given_x_hat,
    F2_hat,
    Fn,
    Fn_given_x,
    det_integrand,
    kernel_p1,
    kernel_q,
    p1_density,
)
from shepp.eigen import KernelId, dominant_eigen, lambda1_closed
from shepp.approximations import (
    ApproximationId,
    Lambda_approx,
    F_T_approx,
    bounds,
    lambda_approx,
    relative_errors,
)

__all__ = [
    "phi", "Phi", "phi_lin", "x_h", "K", "U", "J", "V",
    "QuadratureRule", "gauss_legendre", "QuadConfig",
    "F1", "F1_given_x", "F2", "F2_given_x", "F2_given_x_hat", "F2_hat",
    "Fn", "Fn_given_x", "det_integrand", "kernel_p1", "kernel_q", "p1_density",
    "KernelId", "dominant_eigen", "lambda1_closed",
    "ApproximationId", "Lambda_approx", "F_T_approx", "bounds", "lambda_approx",
    "relative_errors",
]
