"""Spherical harmonics: evaluation, analysis, synthesis and Parseval norms.

Expansions are stored as flat complex arrays indexed by l*l + l + m; this
layout is the serialization contract, so reports are reproducible across
runs.  Grids are Gauss-Legendre in cos(theta) crossed with equispaced phi,
which integrates band-limited functions exactly; the phi transform is a
direct sum (no FFT needed at the scales involved).

Negative orders follow Y_l^{-m} = (-1)^m conj(Y_l^m), consistent with the
Condon-Shortley phase of :func:`sphsieve.specfun.assoc_legendre`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError
from .quadrature import gauss_rule

__all__ = [
    "UnitVector",
    "NORTH_POLE",
    "HarmonicExpansion",
    "SphereGrid",
    "sph_harm_matrix",
    "ylm",
    "synthesize",
    "synthesize_grid",
    "analyze",
    "parseval_norm",
    "addition_theorem_residual",
]

@dataclass(frozen=True)
class UnitVector:
    """A point on the unit sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        r2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(r2 - 1.0) > 1e-12:
            raise ValueError(f"not a unit vector: |v|^2 = {r2}")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitVector":
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(x / r, y / r, z / r)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "UnitVector":
        s = math.sin(theta)
        return cls(s * math.cos(phi), s * math.sin(phi), math.cos(theta))

    @classmethod
    def from_array(cls, a) -> "UnitVector":
        a = np.asarray(a, dtype=float)
        return cls.normalized(a[0], a[1], a[2])

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "UnitVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z


NORTH_POLE = UnitVector(0.0, 0.0, 1.0)


def _flat_index(l: int, m: int) -> int:
    return l * l + l + m


@dataclass
class HarmonicExpansion:
    """Band-limited function as coefficients a_l^m, flat index l*l + l + m."""

    degree_max: int
    coeffs: np.ndarray
    real_signal: bool = False

    def __post_init__(self):
        L = self.degree_max
        if L < 0:
            raise ValueError("band limit must be nonnegative")
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != ((L + 1) ** 2,):
            raise ValueError(
                f"expected {(L + 1) ** 2} coefficients, got {coeffs.shape}")
        self.coeffs = coeffs
        if self.real_signal and not self._real_symmetry_holds():
            raise ValueError("coefficients violate the real-signal symmetry")

    def _real_symmetry_holds(self, tol: float = 1e-10) -> bool:
        for l in range(self.degree_max + 1):
            for m in range(1, l + 1):
                a_neg = self.coeffs[_flat_index(l, -m)]
                a_pos = self.coeffs[_flat_index(l, m)]
                if abs(a_neg - (-1) ** m * np.conj(a_pos)) > tol:
                    return False
        return True

    @staticmethod
    def flat_index(l: int, m: int) -> int:
        if abs(m) > l:
            raise ValueError(f"order |{m}| exceeds degree {l}")
        return _flat_index(l, m)

    @classmethod
    def zero(cls, L: int) -> "HarmonicExpansion":
        return cls(L, np.zeros((L + 1) ** 2, dtype=complex))

    @classmethod
    def unit(cls, L: int, l: int, m: int) -> "HarmonicExpansion":
        e = cls.zero(L)
        e.coeffs[cls.flat_index(l, m)] = 1.0
        return e

    def __getitem__(self, lm: tuple[int, int]) -> complex:
        return complex(self.coeffs[self.flat_index(*lm)])

    def copy(self) -> "HarmonicExpansion":
        return HarmonicExpansion(self.degree_max, self.coeffs.copy(),
                                 self.real_signal)

    def to_dict(self) -> dict:
        return {
            "L": self.degree_max,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HarmonicExpansion":
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]])
        return cls(int(data["L"]), coeffs)


class SphereGrid:
    """Product grid: Gauss-Legendre nodes in cos(theta) x equispaced phi.

    Values live on arrays of shape (theta_order, phi_count), row-major in
    (theta, phi); rows follow the t = cos(theta) nodes in increasing order.
    """

    def __init__(self, theta_order: int, phi_count: int):
        if theta_order < 1 or phi_count < 1:
            raise ValueError("grid sizes must be positive")
        rule = gauss_rule(theta_order)
        self.theta_order = theta_order
        self.phi_count = phi_count
        self.t_nodes = rule.nodes
        self.t_weights = rule.weights
        self.phis = 2.0 * np.pi * np.arange(phi_count) / phi_count
        self._design: dict[int, np.ndarray] = {}

    @classmethod
    def for_degree(cls, L: int) -> "SphereGrid":
        """Smallest grid meeting the analysis contract for band limit L."""
        return cls(2 * L + 2, 4 * L + 2)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.theta_order, self.phi_count)

    def supports_degree(self, L: int) -> bool:
        return self.theta_order >= 2 * L + 1 and self.phi_count >= 4 * L + 1

    def points(self) -> np.ndarray:
        """All grid points as an (theta_order * phi_count, 3) array."""
        s = np.sqrt(1.0 - self.t_nodes * self.t_nodes)
        x = np.outer(s, np.cos(self.phis))
        y = np.outer(s, np.sin(self.phis))
        z = np.outer(self.t_nodes, np.ones(self.phi_count))
        return np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)

    def quad_weights(self) -> np.ndarray:
        """Surface-measure quadrature weights, shape (theta_order, phi_count)."""
        return np.outer(self.t_weights,
                        np.full(self.phi_count, 2.0 * np.pi / self.phi_count))

    def integrate(self, values: np.ndarray):
        """Quadrature of grid values against the surface measure."""
        values = np.asarray(values)
        if values.shape != self.shape:
            raise ValueError(f"values shape {values.shape} != grid {self.shape}")
        return (self.quad_weights() * values).sum()

    def sample(self, fn) -> np.ndarray:
        """Sample a function of (n, 3) point arrays onto the grid."""
        vals = np.asarray(fn(self.points()))
        return vals.reshape(self.shape)

    def design_matrix(self, L: int) -> np.ndarray:
        """Cached (npoints, (L+1)^2) matrix of Y_l^m values at grid points."""
        got = self._design.get(L)
        if got is None:
            got = sph_harm_matrix(self.points(), L)
            self._design[L] = got
        return got


def _norm_assoc_table(L: int, t: np.ndarray) -> np.ndarray:
    """Sphere-orthonormal associated Legendre values Q_l^m(t), m >= 0.

    Q_l^m = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m, laid out at row
    l (l+1)/2 + m; columns follow t.  Recurrence acts on the normalized
    values, so no factorial overflow occurs.
    """
    t = np.asarray(t, dtype=float)
    s = np.sqrt(np.maximum(0.0, 1.0 - t * t))
    rows = (L + 1) * (L + 2) // 2
    q = np.empty((rows, t.size))

    def idx(l, m):
        return l * (l + 1) // 2 + m

    q[0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, L + 1):
        q[idx(m, m)] = -np.sqrt((2 * m + 1) / (2.0 * m)) * s * q[idx(m - 1, m - 1)]
    for m in range(0, L):
        q[idx(m + 1, m)] = np.sqrt(2 * m + 3.0) * t * q[idx(m, m)]
    for m in range(0, L - 1):
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            q[idx(l, m)] = a * (t * q[idx(l - 1, m)] - b * q[idx(l - 2, m)])
    return q


def sph_harm_matrix(points: np.ndarray, L: int) -> np.ndarray:
    """Matrix of Y_l^m at each point, shape (npoints, (L+1)^2)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    t = points[:, 2]
    phi = np.arctan2(points[:, 1], points[:, 0])
    q = _norm_assoc_table(L, t)
    out = np.empty((points.shape[0], (L + 1) ** 2), dtype=complex)
    phases = [np.exp(1j * m * phi) for m in range(L + 1)]
    for l in range(L + 1):
        for m in range(l + 1):
            col = q[l * (l + 1) // 2 + m] * phases[m]
            out[:, _flat_index(l, m)] = col
            if m > 0:
                out[:, _flat_index(l, -m)] = (-1) ** m * np.conj(col)
    return out


def ylm(l: int, m: int, p: UnitVector) -> complex:
    """Y_l^m at a point; raises for |m| > l."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"order |{m}| exceeds degree {l}")
    row = sph_harm_matrix(p.as_array()[None, :], l)[0]
    return complex(row[_flat_index(l, m)])


def synthesize(e: HarmonicExpansion, p: UnitVector) -> complex:
    """Pointwise value of the expansion at p."""
    row = sph_harm_matrix(p.as_array()[None, :], e.degree_max)[0]
    return complex(np.dot(row, e.coeffs))


def synthesize_points(e: HarmonicExpansion, points: np.ndarray) -> np.ndarray:
    """Values of the expansion at an (n, 3) array of points."""
    return sph_harm_matrix(points, e.degree_max) @ e.coeffs


def synthesize_grid(e: HarmonicExpansion, grid: SphereGrid) -> np.ndarray:
    """Values of the expansion on a grid, shape grid.shape."""
    return (grid.design_matrix(e.degree_max) @ e.coeffs).reshape(grid.shape)


def analyze(grid: SphereGrid, values: np.ndarray, L: int) -> HarmonicExpansion:
    """Coefficients of grid samples by quadrature against conj(Y_l^m).

    Exact (to rounding) for band-limited samples; requires theta order at
    least 2L+1 and at least 4L+1 phi columns.
    """
    if not grid.supports_degree(L):
        raise ResolutionError(
            f"grid {grid.shape} under-resolved for degree {L}: need theta "
            f"order >= {2 * L + 1} and phi count >= {4 * L + 1}")
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} != grid {grid.shape}")
    w = grid.quad_weights().ravel()
    coeffs = grid.design_matrix(L).conj().T @ (w * values.ravel())
    return HarmonicExpansion(L, coeffs)


def parseval_norm(e: HarmonicExpansion) -> float:
    """L2(S^2) norm of the expansion: sqrt of the coefficient energy."""
    return float(np.sqrt(np.sum(np.abs(e.coeffs) ** 2)))


def addition_theorem_residual(k: int, x: UnitVector, y: UnitVector) -> float:
    """|P_k(<x,y>) - (4 pi / (2k+1)) sum_n Y_k^n(x) conj(Y_k^n(y))|."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    from .specfun import legendre_table

    rows = sph_harm_matrix(np.vstack([x.as_array(), y.as_array()]), k)
    sl = slice(_flat_index(k, -k), _flat_index(k, k) + 1)
    total = np.dot(rows[0, sl], np.conj(rows[1, sl]))
    dot = np.clip(x.dot(y), -1.0, 1.0)
    pk = legendre_table(k, dot)[k, 0]
    return float(abs(pk - 4.0 * np.pi / (2 * k + 1) * total))
