"""Numerical settings shared by the quadrature-based modules."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class QuadConfig:
    """Discretization parameters.

    Attributes
    ----------
    trunc : float
        Truncation depth L. Integrals over ``(-inf, h)`` are taken over
        ``[min(h, 0) - L, h]``.
    nodes : int or None
        Per-axis Gauss-Legendre nodes for the determinant integrals. ``None``
        selects a default depending on the dimension and the method.
    method : {"reduced", "full"}
        ``"reduced"`` integrates the first row and the last column of the
        determinant analytically; ``"full"`` integrates over every variable.
    eig_nodes : int
        Nystrom nodes for the transition-operator eigenvalues.
    semi_nodes, semi_length : int, float
        Rule used for the semi-infinite integrals of the closed forms,
        ``int_0^inf`` being replaced by a Gauss-Legendre rule on
        ``[0, semi_length]``.
    eps_guard : float
        Pointwise calls of the two-step kernel reject ``x >= h - eps_guard``.
    """

    trunc: float = 8.0
    nodes: int | None = None
    method: str = "reduced"
    eig_nodes: int = 300
    semi_nodes: int = 200
    semi_length: float = 12.0
    eps_guard: float = 1e-8

    def __post_init__(self):
        if self.trunc <= 0:
            raise ValueError("trunc must be positive")
        if self.nodes is not None and self.nodes < 1:
            raise ValueError("nodes must be >= 1")
        if self.method not in ("reduced", "full"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.eig_nodes < 1 or self.semi_nodes < 1:
            raise ValueError("node counts must be >= 1")

    def lower(self, h: float) -> float:
        """Lower truncation point for variables living on ``(-inf, h)``."""
        return min(h, 0.0) - self.trunc

    def det_nodes(self, n: int) -> int:
        if self.nodes is not None:
            return self.nodes
        if self.method == "reduced":
            return 48 if n <= 4 else 32
        return {1: 48, 2: 48, 3: 48, 4: 32}.get(n, 16)

    def with_(self, **kw) -> "QuadConfig":
        return replace(self, **kw)


DEFAULT = QuadConfig()
