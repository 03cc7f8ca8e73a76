"""Gauss-Legendre rules on [-1, 1] and tail integrals of Legendre products.

The tail integrals over [delta, 1] are the building blocks of every constant
in this library; for polynomial integrands they are computed exactly (up to
rounding) by an affinely mapped Gauss rule of sufficient order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import all_zeros, legendre_table, _pn_pair

__all__ = [
    "QuadratureRule",
    "gauss_rule",
    "integrate_tail",
    "pl_squared_tail",
    "pl_cross_tail",
]

# extra nodes beyond the exactness requirement, margin against rounding
_SAFETY_NODES = 2


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights affinely mapped onto [a, b]."""
        scale = 0.5 * (b - a)
        return 0.5 * (a + b) + scale * self.nodes, scale * self.weights

    def integrate(self, f, a: float = -1.0, b: float = 1.0) -> float:
        x, w = self.mapped(a, b)
        return float(np.dot(w, f(x)))


@lru_cache(maxsize=256)
def gauss_rule(n: int) -> QuadratureRule:
    """Gauss-Legendre rule of order n; exact for polynomials up to 2n-1.

    Nodes are the zeros of P_n, weights w_i = 2 / ((1 - t_i^2) P_n'(t_i)^2).
    """
    if not 1 <= n <= 2000:
        raise ValueError(f"rule order {n} outside [1, 2000]")
    nodes = all_zeros(n)
    pn, pnm1 = _pn_pair(n, nodes)
    deriv = n * (pnm1 - nodes * pn) / (1.0 - nodes * nodes)
    weights = 2.0 / ((1.0 - nodes * nodes) * deriv * deriv)
    weights.flags.writeable = False
    return QuadratureRule(order=n, nodes=nodes, weights=weights)


def _rule_for_degree(degree: int) -> QuadratureRule:
    order = -(-int(degree + 2) // 2) + _SAFETY_NODES
    return gauss_rule(max(order, 1))


def integrate_tail(f, delta: float, degree_hint: int | None = None) -> float:
    """Integral of f over [delta, 1].

    With a degree_hint, f is assumed polynomial of at most that degree and a
    single Gauss rule of matching order is exact.  Without a hint the order
    is doubled until two successive results agree to 1e-12 relative.
    """
    delta = float(delta)
    if delta >= 1.0:
        raise ValueError("lower endpoint must be below 1")
    if delta < -1.0:
        raise ValueError("lower endpoint must be at least -1")
    if degree_hint is not None:
        rule = _rule_for_degree(degree_hint)
        return rule.integrate(f, delta, 1.0)
    order = 16
    prev = gauss_rule(order).integrate(f, delta, 1.0)
    while order <= 1000:
        order *= 2
        cur = gauss_rule(order).integrate(f, delta, 1.0)
        if abs(cur - prev) <= 1e-12 * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


def pl_squared_tail(L: int, delta: float) -> float:
    """Integral of P_L^2 over [delta, 1] (exact Gauss evaluation)."""
    if L < 0:
        raise ValueError("degree must be nonnegative")
    return integrate_tail(lambda t: legendre_table(L, t)[L] ** 2, delta,
                          degree_hint=2 * L)


def pl_cross_tail(L: int, l: int, delta: float) -> float:
    """Integral of P_L * P_l over [delta, 1] (exact Gauss evaluation)."""
    if not 0 <= l <= L:
        raise ValueError(f"need 0 <= l <= L, got l={l}, L={L}")

    def product(t):
        table = legendre_table(L, t)
        return table[L] * table[l]

    return integrate_tail(product, delta, degree_hint=L + l)
