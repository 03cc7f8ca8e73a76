"""Spherical caps, unions of caps, and the geometry helpers they need.

A cap of height delta about an apex collects the points whose inner product
with the apex is at least delta; its area is 2 pi (1 - delta).  Unions of
pairwise disjoint caps are the concentration regions handled exactly; for
overlapping caps the deterministic routines refuse and callers fall back to
seeded Monte Carlo with a reported standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sphharm import UnitVector

__all__ = [
    "SphericalCap",
    "CapUnionDomain",
    "lens_area",
    "fibonacci_lattice",
    "frame_to_pole",
]


@dataclass(frozen=True)
class SphericalCap:
    """Points whose inner product with the apex is at least ``height``."""

    apex: UnitVector
    height: float

    def __post_init__(self):
        if not -1.0 <= self.height <= 1.0:
            raise ValueError(f"cap height {self.height} outside [-1, 1]")

    @property
    def area(self) -> float:
        return 2.0 * np.pi * (1.0 - self.height)

    @property
    def polar_angle(self) -> float:
        return math.acos(min(1.0, max(-1.0, self.height)))

    def apex_array(self) -> np.ndarray:
        return self.apex.as_array()

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership for an (n, 3) array of points."""
        points = np.asarray(points, dtype=float)
        return points @ self.apex_array() >= self.height

    def to_dict(self) -> dict:
        a = self.apex
        return {"apex": [a.x, a.y, a.z], "height": self.height}

    @classmethod
    def from_dict(cls, data: dict) -> "SphericalCap":
        return cls(UnitVector.from_array(data["apex"]), float(data["height"]))


@dataclass
class CapUnionDomain:
    """A finite union of spherical caps; the concentration region Omega."""

    caps: list[SphericalCap] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return len(self.caps) == 0

    @property
    def pairwise_disjoint(self) -> bool:
        """True when no two caps share interior points."""
        for i in range(len(self.caps)):
            for j in range(i + 1, len(self.caps)):
                ci, cj = self.caps[i], self.caps[j]
                gap = ci.polar_angle + cj.polar_angle
                if gap >= np.pi:
                    return False
                if ci.apex_array() @ cj.apex_array() >= math.cos(gap):
                    return False
        return True

    def area(self, seed: int = 0, samples: int = 200_000) -> tuple[float, float]:
        """(area, standard error); exact with zero error for disjoint caps."""
        if self.is_empty:
            return 0.0, 0.0
        if self.pairwise_disjoint:
            return float(sum(c.area for c in self.caps)), 0.0
        total = 0.0
        var = 0.0
        for cap, pts, _ in self._strata(seed, samples):
            u = 1.0 / self.multiplicity(pts)
            n_i = len(u)
            total += cap.area * float(np.mean(u))
            var += cap.area ** 2 * float(np.var(u)) / n_i
        return total, math.sqrt(var)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        inside = np.zeros(points.shape[0], dtype=bool)
        for cap in self.caps:
            inside |= cap.contains(points)
        return inside

    def multiplicity(self, points: np.ndarray) -> np.ndarray:
        """Number of caps containing each point."""
        points = np.asarray(points, dtype=float)
        count = np.zeros(points.shape[0], dtype=int)
        for cap in self.caps:
            count += cap.contains(points)
        return count

    def _strata(self, seed: int, samples: int):
        """Per-cap uniform samples: list of (cap, points, base weight)."""
        rng = np.random.default_rng(seed)
        areas = np.array([c.area for c in self.caps])
        counts = np.maximum(1, np.round(samples * areas / areas.sum()).astype(int))
        out = []
        for cap, n_i in zip(self.caps, counts):
            z = rng.uniform(cap.height, 1.0, size=n_i)
            phi = rng.uniform(0.0, 2.0 * np.pi, size=n_i)
            s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            local = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
            pts = local @ frame_to_pole(cap.apex_array()).T
            out.append((cap, pts, cap.area / n_i))
        return out

    def stratified_samples(self, seed: int, samples: int
                           ) -> tuple[np.ndarray, np.ndarray]:
        """Points covering the union with weights w_s so that for smooth f,
        sum w_s f(x_s) estimates the integral of f over the union.

        Each cap is sampled uniformly (sample count proportional to its
        area) and every point is weighted by the inverse of the number of
        caps containing it, which makes overlap counting unbiased.
        """
        if self.is_empty:
            return np.zeros((0, 3)), np.zeros(0)
        strata = self._strata(seed, samples)
        pts = np.vstack([pts_i for _, pts_i, _ in strata])
        base = np.concatenate([np.full(len(pts_i), w_i)
                               for _, pts_i, w_i in strata])
        return pts, base / self.multiplicity(pts)

    def to_dict(self) -> list:
        return [c.to_dict() for c in self.caps]

    @classmethod
    def from_dict(cls, data: list) -> "CapUnionDomain":
        return cls([SphericalCap.from_dict(d) for d in data])


def lens_area(alpha: float, beta: float, separation) -> np.ndarray | float:
    """Area of the intersection of two caps with angular radii alpha and
    beta whose apexes are ``separation`` radians apart (vectorized in the
    separation)."""
    d = np.asarray(separation, dtype=float)
    alpha = float(alpha)
    beta = float(beta)
    if alpha <= 0.0 or beta <= 0.0:
        return np.zeros_like(d) if d.ndim else 0.0
    full = 2.0 * np.pi * (1.0 - math.cos(min(alpha, beta)))
    if alpha >= np.pi:
        out = np.full_like(d, 2.0 * np.pi * (1.0 - math.cos(beta)))
        return out if d.ndim else float(out)
    if beta >= np.pi:
        out = np.full_like(d, 2.0 * np.pi * (1.0 - math.cos(alpha)))
        return out if d.ndim else float(out)
    ca, cb = math.cos(alpha), math.cos(beta)
    sa, sb = math.sin(alpha), math.sin(beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        sd = np.sin(d)
        cd = np.cos(d)
        t1 = np.arccos(np.clip((cb - ca * cd) / (sa * sd), -1.0, 1.0))
        t2 = np.arccos(np.clip((ca - cb * cd) / (sb * sd), -1.0, 1.0))
        t3 = np.arccos(np.clip((cd - ca * cb) / (sa * sb), -1.0, 1.0))
        lens = 2.0 * (np.pi - ca * t1 - cb * t2 - t3)
    out = np.where(d >= alpha + beta, 0.0,
                   np.where(d <= abs(alpha - beta), full, lens))
    return out if d.ndim else float(out)


def fibonacci_lattice(n: int) -> np.ndarray:
    """n nearly uniform points on the sphere (golden-angle spiral)."""
    if n < 1:
        raise ValueError("need at least one point")
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    phi = 2.0 * np.pi * i / golden
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)


def frame_to_pole(apex) -> np.ndarray:
    """Rotation matrix R with R @ ez = apex (Rodrigues about ez x apex)."""
    a = np.asarray(apex, dtype=float)
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.clip(a @ z, -1.0, 1.0))
    if c > 1.0 - 1e-14:
        return np.eye(3)
    if c < -1.0 + 1e-14:
        return np.diag([1.0, -1.0, -1.0])
    axis = np.cross(z, a)
    axis /= np.linalg.norm(axis)
    k = np.array([[0.0, -axis[2], axis[1]],
                  [axis[2], 0.0, -axis[0]],
                  [-axis[1], axis[0], 0.0]])
    s = math.sqrt(max(0.0, 1.0 - c * c))
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)
