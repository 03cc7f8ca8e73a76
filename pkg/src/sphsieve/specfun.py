"""Legendre and Bessel primitives.

Legendre polynomials are evaluated by the forward three-term recurrence

    (k+1) P_{k+1}(t) = (2k+1) t P_k(t) - k P_{k-1}(t),

which is stable on [-1, 1].  Zeros are found by safeguarded Newton iteration
with asymptotic seeds.  J0 and J1 are evaluated by their power series; all
arguments used in this library stay below 5, where roughly twenty terms give
full double precision.

Sign convention: the associated Legendre functions carry the Condon-Shortley
phase, so ``assoc_legendre(1, 1, 0.0) == -1.0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError

__all__ = [
    "LegendreSequence",
    "BesselConstants",
    "legendre_all",
    "legendre_table",
    "legendre_deriv",
    "largest_zero",
    "all_zeros",
    "assoc_legendre",
    "bessel_j0",
    "bessel_j1",
    "bessel_constants",
    "mehler_heine_gap",
]


@dataclass(frozen=True)
class LegendreSequence:
    """Values P_0(t), ..., P_n(t) at a single argument t."""

    degree_max: int
    argument: float
    values: np.ndarray


@dataclass(frozen=True)
class BesselConstants:
    """Smallest positive zero of J0 and the limit constant J1(j01)^-2."""

    j01: float
    j1_at_j01: float
    b_limit: float


def _check_argument(t) -> float:
    t = float(t)
    if not -1.0 <= t <= 1.0:
        raise ValueError(f"argument {t} lies outside [-1, 1]")
    return t


def legendre_table(n: int, t) -> np.ndarray:
    """Table of P_0..P_n on an array of arguments, shape (n+1, t.size)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((n + 1, t.size))
    out[0] = 1.0
    if n >= 1:
        out[1] = t
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1)
    return out


def legendre_all(n: int, t: float) -> LegendreSequence:
    """P_0(t) .. P_n(t) by the forward three-term recurrence."""
    t = _check_argument(t)
    values = legendre_table(n, t)[:, 0]
    values.flags.writeable = False
    return LegendreSequence(degree_max=n, argument=t, values=values)


def legendre_deriv(n: int, t: float) -> float:
    """P_n'(t) via the odd-coefficient sum

    P_n' = (2n-1) P_{n-1} + (2n-5) P_{n-3} + (2n-9) P_{n-5} + ...
    """
    t = _check_argument(t)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return 0.0
    table = legendre_table(n - 1, t)[:, 0]
    degrees = np.arange(n - 1, -1, -2)
    return float(np.sum((2 * degrees + 1) * table[degrees]))


def _pn_pair(n: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P_n, P_{n-1}) at an array of arguments, O(1) storage."""
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    cur = t.copy()
    if n == 0:
        return prev, np.zeros_like(t)
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1) * t * cur - k * prev) / (k + 1)
    return cur, prev


def _newton_zeros(n, seeds, lo, hi, max_iter=200):
    """Safeguarded Newton on P_n; each iterate is clamped into its bracket."""
    t = np.clip(np.asarray(seeds, dtype=float), lo, hi)
    for _ in range(max_iter):
        pn, pnm1 = _pn_pair(n, t)
        deriv = n * (pnm1 - t * pn) / (1.0 - t * t)
        t_new = np.clip(t - pn / deriv, lo, hi)
        delta = np.max(np.abs(t_new - t))
        t = t_new
        if delta < 1e-15:
            return t
    raise ConvergenceError(f"zero finder for P_{n} did not converge")


def largest_zero(n: int) -> float:
    """Largest root t_{n,n} of P_n, accurate to about 1e-15.

    Newton iteration seeded from the asymptotic 1 - j01^2/(2 n^2) and
    safeguarded inside a bracket isolating the largest zero.
    """
    if n < 1:
        raise ValueError("degree must be at least 1")
    if n == 1:
        return 0.0
    j01 = bessel_constants().j01
    nu = n + 0.5
    lo = np.cos(1.25 * np.pi / nu)  # between the two largest zeros
    hi = 1.0 - 0.5 / (n * n)        # strictly above t_{n,n}
    seed = 1.0 - j01 * j01 / (2.0 * n * n)
    return float(_newton_zeros(n, [seed], lo, hi)[0])


def all_zeros(n: int) -> np.ndarray:
    """All n roots of P_n in increasing order, exactly symmetric about 0."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    if n == 1:
        return np.array([0.0])
    m = n // 2
    nu = n + 0.5
    k = np.arange(1, m + 1)
    theta = (k - 0.25) * np.pi / nu
    half = np.pi / (2.0 * nu)
    seeds = np.cos(theta)
    lo = np.cos(theta + half)
    hi = np.cos(theta - half)
    j01 = bessel_constants().j01
    seeds[0] = 1.0 - j01 * j01 / (2.0 * n * n)
    hi[0] = 1.0 - 0.5 / (n * n)
    pos = _newton_zeros(n, seeds, lo, hi)  # decreasing
    parts = [-pos]
    if n % 2 == 1:
        parts.append(np.array([0.0]))
    parts.append(pos[::-1])
    zeros = np.concatenate(parts)
    zeros.flags.writeable = False
    return zeros


def assoc_legendre(l: int, m: int, t: float) -> float:
    """Associated Legendre function P_l^m(t), Condon-Shortley phase included.

    Upward recurrence in l at fixed m; reduces to P_l at m = 0.  Negative m
    is handled by the spherical-harmonic layer, not here.
    """
    t = _check_argument(t)
    if l < 0 or m < 0 or m > l:
        raise ValueError(f"need 0 <= m <= l, got l={l}, m={m}")
    if m == 0:
        return float(legendre_table(l, t)[l, 0])
    s = np.sqrt(max(0.0, 1.0 - t * t))
    pmm = 1.0
    for k in range(1, m + 1):
        pmm *= -(2 * k - 1) * s
    if l == m:
        return pmm
    pm1 = t * (2 * m + 1) * pmm
    if l == m + 1:
        return pm1
    prev, cur = pmm, pm1
    for k in range(m + 2, l + 1):
        prev, cur = cur, (t * (2 * k - 1) * cur - (k + m - 1) * prev) / (k - m)
    return cur


def bessel_j0(z):
    """J0 by power series; intended for |z| <= 5."""
    z_arr = np.asarray(z, dtype=float)
    q = z_arr * z_arr / 4.0
    term = np.ones_like(q)
    total = term.copy()
    for k in range(1, 200):
        term = -term * q / (k * k)
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-30)):
            break
    return total if z_arr.ndim else float(total)


def bessel_j1(z):
    """J1 by power series; intended for |z| <= 5."""
    z_arr = np.asarray(z, dtype=float)
    q = z_arr * z_arr / 4.0
    term = z_arr / 2.0
    total = term.copy()
    for k in range(1, 200):
        term = -term * q / (k * (k + 1))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-30)):
            break
    return total if z_arr.ndim else float(total)


@lru_cache(maxsize=1)
def bessel_constants() -> BesselConstants:
    """j01, J1(j01) and the limit constant J1(j01)^-2 (computed once)."""
    x = 2.4
    for _ in range(60):
        dx = bessel_j0(x) / bessel_j1(x)  # J0' = -J1
        x += dx
        if abs(dx) < 1e-15:
            break
    else:
        raise ConvergenceError("Newton iteration for j01 did not converge")
    j1v = bessel_j1(x)
    return BesselConstants(j01=x, j1_at_j01=j1v, b_limit=1.0 / (j1v * j1v))


def mehler_heine_gap(n: int, z: float) -> float:
    """|P_n(1 - z^2/(2 n^2)) - J0(z)|, a diagnostic of the n -> oo limit."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    z = float(z)
    if z < 0:
        raise ValueError("z must be nonnegative")
    arg = 1.0 - z * z / (2.0 * n * n)
    if arg < -1.0:
        raise ValueError(f"shifted argument {arg} leaves [-1, 1]")
    pn = float(legendre_table(n, arg)[n, 0])
    return abs(pn - bessel_j0(z))
