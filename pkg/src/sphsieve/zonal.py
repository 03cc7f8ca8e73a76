"""Zonal filters, spherical convolution and the L2 extremal functional.

A zonal filter depends only on the z-coordinate and may be treated as a
function on [-1, 1]; convolution with it acts diagonally on spherical
harmonics coefficients:

    (f * g)^(l, m) = sqrt(4 pi / (2l+1)) fhat(l, m) ghat(l, 0).

Filters here are supported in [delta, 1] and their profiles are expected
piecewise-polynomial on that interval, so every inner product is an exact
Gauss integral -- this removes quadrature ambiguity from the extremal
comparisons.  ``convolve_direct`` evaluates the defining integral on a
rotated cap grid and serves as the independent cross-check of the
coefficient route.
"""

from __future__ import annotations

import numpy as np

from .quadrature import gauss_rule, integrate_tail
from .specfun import largest_zero, legendre_table
from .sphharm import HarmonicExpansion, synthesize_points

__all__ = [
    "ZonalFilter",
    "zonal_coeff",
    "zonal_coeffs",
    "convolve",
    "convolve_direct",
    "g_delta",
    "filter_norm2_sq",
    "extremal_objective_p2",
]


class ZonalFilter:
    """A zonal function supported in the cap [delta, 1].

    profile is a vectorized callable on [delta, 1]; the filter is zero
    outside.  degree_hint bounds the polynomial degree of the profile when
    it is polynomial (None means unknown, integrals then use adaptive
    order doubling).  A hint asserts polynomial behavior on the whole
    support: a profile with an interior breakpoint must either declare
    the breakpoint as its support height or pass degree_hint=None.
    Coefficients ghat(l, 0) are cached per degree.
    """

    def __init__(self, support_delta: float, profile, degree_hint: int | None = None):
        support_delta = float(support_delta)
        if not -1.0 <= support_delta < 1.0:
            raise ValueError("support height must lie in [-1, 1)")
        self.support_delta = support_delta
        self.profile = profile
        self.degree_hint = degree_hint
        self._coeff_cache: dict[int, float] = {}

    def __call__(self, t):
        """Profile values with the zero extension outside [delta, 1]."""
        t = np.asarray(t, dtype=float)
        inside = t >= self.support_delta
        out = np.zeros_like(t)
        if np.any(inside):
            out[inside] = self.profile(t[inside])
        return out if out.ndim else float(out)


def zonal_coeff(g: ZonalFilter, l: int) -> float:
    """ghat(l, 0) = sqrt((2l+1)/(4 pi)) * 2 pi * integral_delta^1 g(t) P_l(t) dt."""
    if l < 0:
        raise ValueError("degree must be nonnegative")
    got = g._coeff_cache.get(l)
    if got is not None:
        return got
    return float(zonal_coeffs(g, l)[l])


def zonal_coeffs(g: ZonalFilter, L: int) -> np.ndarray:
    """ghat(l, 0) for l = 0..L, from one shared Legendre table."""
    if L < 0:
        raise ValueError("degree must be nonnegative")
    if all(l in g._coeff_cache for l in range(L + 1)):
        return np.array([g._coeff_cache[l] for l in range(L + 1)])
    if g.degree_hint is not None:
        rule = gauss_rule(max(1, -(-(g.degree_hint + L + 2) // 2) + 2))
        t, w = rule.mapped(g.support_delta, 1.0)
        integrals = legendre_table(L, t) @ (w * g.profile(t))
    else:
        integrals = np.array([
            integrate_tail(lambda t: g.profile(t) * legendre_table(l, t)[l],
                           g.support_delta)
            for l in range(L + 1)])
    ls = np.arange(L + 1)
    values = np.sqrt((2 * ls + 1) / (4.0 * np.pi)) * 2.0 * np.pi * integrals
    for l in range(L + 1):
        g._coeff_cache[l] = float(values[l])
    return values


def convolve(f: HarmonicExpansion, g: ZonalFilter) -> HarmonicExpansion:
    """Convolution via the coefficient product; band limit is preserved."""
    L = f.degree_max
    ghat = zonal_coeffs(g, L)
    out = np.empty_like(f.coeffs)
    for l in range(L + 1):
        factor = np.sqrt(4.0 * np.pi / (2 * l + 1)) * ghat[l]
        lo, hi = l * l, (l + 1) ** 2
        out[lo:hi] = factor * f.coeffs[lo:hi]
    return HarmonicExpansion(L, out)


def convolve_direct(f: HarmonicExpansion, g: ZonalFilter,
                    points: np.ndarray) -> np.ndarray:
    """(f * g) at each point by integrating f(y) g(<x, y>) over the cap.

    For every evaluation point the integral is taken in a frame whose pole
    is that point, over t' in [delta, 1] with a Gauss rule and a full phi'
    circle; this is exact for polynomial profiles and band-limited f, and
    shares no code path with the coefficient product in :func:`convolve`.
    """
    from .domains import frame_to_pole

    points = np.atleast_2d(np.asarray(points, dtype=float))
    L = f.degree_max
    hint = g.degree_hint if g.degree_hint is not None else 24
    t_order = L + hint + 2
    m_phi = 2 * L + 2
    rule = gauss_rule(t_order)
    t_nodes, t_weights = rule.mapped(g.support_delta, 1.0)
    phis = 2.0 * np.pi * np.arange(m_phi) / m_phi
    s = np.sqrt(np.maximum(0.0, 1.0 - t_nodes * t_nodes))
    local = np.stack([
        np.outer(s, np.cos(phis)).ravel(),
        np.outer(s, np.sin(phis)).ravel(),
        np.outer(t_nodes, np.ones(m_phi)).ravel(),
    ], axis=1)
    g_vals = np.repeat(g.profile(t_nodes), m_phi)
    w = np.repeat(t_weights, m_phi) * (2.0 * np.pi / m_phi)
    out = np.empty(points.shape[0], dtype=complex)
    for i, x in enumerate(points):
        rot = frame_to_pole(x)
        y = local @ rot.T
        out[i] = np.dot(w * g_vals, synthesize_points(f, y))
    return out


def g_delta(L: int, delta: float) -> ZonalFilter:
    """The minimizing filter: P_L restricted to the cap [delta, 1].

    Requires delta at or above the largest zero of P_L.
    """
    if L < 0:
        raise ValueError("degree must be nonnegative")
    delta = float(delta)
    t_ll = largest_zero(L) if L >= 1 else -1.0
    if delta < t_ll - 1e-12:
        raise ValueError(
            f"support height {delta} below the largest zero {t_ll} of P_{L}")
    if delta >= 1.0:
        raise ValueError("support height must be below 1")
    return ZonalFilter(delta, lambda t: legendre_table(L, t)[L], degree_hint=L)


def filter_norm2_sq(g: ZonalFilter) -> float:
    """Squared L2(S^2) norm: 2 pi * integral_delta^1 g(t)^2 dt."""
    hint = None if g.degree_hint is None else 2 * g.degree_hint
    return 2.0 * np.pi * integrate_tail(lambda t: g.profile(t) ** 2,
                                        g.support_delta, degree_hint=hint)


def extremal_objective_p2(g: ZonalFilter, L: int) -> float:
    """max over l <= L of (2l+1)/(4 pi) * ||g||_2^2 / ghat(l,0)^2.

    This is the L2 operator constant of deconvolving by g on expansions of
    degree at most L; +inf whenever some ghat(l, 0) vanishes, since
    convolution with g then fails to be invertible on those harmonics.
    """
    if L < 0:
        raise ValueError("degree must be nonnegative")
    norm_sq = filter_norm2_sq(g)
    if norm_sq <= 0.0:
        raise ValueError("filter must not vanish identically")
    ghat = zonal_coeffs(g, L)
    tiny = 1e-13 * max(1.0, np.sqrt(norm_sq))
    worst = 0.0
    for l in range(L + 1):
        if abs(ghat[l]) <= tiny:
            return np.inf
        worst = max(worst,
                    (2 * l + 1) / (4.0 * np.pi) * norm_sq / (ghat[l] * ghat[l]))
    return float(worst)
