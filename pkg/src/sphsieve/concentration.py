"""Concentration of band-limited expansions on cap-union regions.

The central quantities: the test-cap constant

    B_L = (1 - t_LL) / integral_{t_LL}^1 P_L(t)^2 dt,

the maximum Nyquist density rho(Omega, L) (largest fraction of a test cap
of height t_LL covered by Omega), and the top eigenvalue of the Gram
operator G[(l,m),(l',m')] = integral_Omega Y_{l'}^{m'} conj(Y_l^m), which
is the sharp L2 concentration ratio.  Every report checks the inequality

    lambda <= B_L * rho(Omega, L).

Gram entries over disjoint caps are exact: the cap is polar in a rotated
frame, where a Gauss rule in cos(theta') and an equispaced phi' circle
integrate the degree-2L integrand exactly.  Overlapping caps fall back to
seeded stratified Monte Carlo with a widened check tolerance.

The supremum over test-cap apexes in rho is located heuristically (lattice
scan plus golden-section refinement); the scan density is reported and an
underestimate of rho only makes the eigenvalue check stricter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import CapUnionDomain, SphericalCap, fibonacci_lattice, frame_to_pole, lens_area
from .errors import BoundViolationError, ConvergenceError, OverlapError
from .quadrature import gauss_rule, pl_squared_tail
from .specfun import largest_zero
from .sphharm import HarmonicExpansion, _flat_index, _norm_assoc_table, sph_harm_matrix
from . import jsonfmt

__all__ = [
    "ConcentrationReport",
    "b_constant",
    "nyquist_density",
    "concentration_matrix",
    "top_eigenvalue",
    "max_rayleigh_quotient",
    "verify_bound",
    "lp_bound",
    "sample_lp_ratio",
]

_MAX_DENSE_DEGREE = 64


def b_constant(L: int) -> float:
    """B_L = (1 - t_LL) / integral_{t_LL}^1 P_L^2; tends to J1(j01)^-2."""
    if L < 1:
        raise ValueError("band limit must be at least 1")
    t = largest_zero(L)
    return (1.0 - t) / pl_squared_tail(L, t)


def _golden_max(f, lo: float, hi: float, iters: int = 32):
    """Golden-section maximization of a unimodal-ish f on [lo, hi]."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - g * (hi - lo)
    d = lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _tangent_basis(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([0.0, 0.0, 1.0]) if abs(y[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(y, helper)
    u /= np.linalg.norm(u)
    return u, np.cross(y, u)


def _refine_apex(y: np.ndarray, objective, radius: float,
                 rounds: int = 3, iters: int = 32):
    """Local maximization over the sphere: alternating golden-section
    searches along two great-circle directions, shrinking the radius."""
    best = float(objective(y[None, :])[0])
    h = radius
    for _ in range(rounds):
        for axis in range(2):
            w = _tangent_basis(y)[axis]

            def along(s):
                cand = math.cos(s) * y + math.sin(s) * w
                return float(objective(cand[None, :])[0])

            s, val = _golden_max(along, -h, h, iters)
            if val > best:
                y = math.cos(s) * y + math.sin(s) * w
                y /= np.linalg.norm(y)
                best = val
        h *= 0.4
    return y, best


def nyquist_density(omega: CapUnionDomain, L: int, *, scan_points: int = 4000,
                    refine_candidates: int = 5, seed: int = 0,
                    samples: int = 200_000, full_output: bool = False):
    """Largest fraction of a test cap of height t_LL covered by Omega.

    The apex supremum is approximated by a Fibonacci-lattice scan (the cap
    apexes are always included as candidates) followed by golden-section
    refinement of the best few candidates.  Intersection areas use the
    closed two-cap lens formula when the caps are pairwise disjoint and
    seeded stratified Monte Carlo otherwise.
    """
    if L < 1:
        raise ValueError("band limit must be at least 1")
    t_ll = largest_zero(L)
    alpha_test = math.acos(t_ll)
    test_area = 2.0 * np.pi * (1.0 - t_ll)
    meta = {"scan_points": int(scan_points), "test_height": t_ll,
            "method": "exact-lens"}
    if omega.is_empty:
        meta.update({"gap_estimate": 0.0})
        return (0.0, meta) if full_output else 0.0

    if omega.pairwise_disjoint:
        radii = [c.polar_angle for c in omega.caps]
        apexes = np.stack([c.apex_array() for c in omega.caps])

        def objective(ys):
            ys = np.asarray(ys, dtype=float)
            total = np.zeros(ys.shape[0])
            for r_i, a_i in zip(radii, apexes):
                d = np.arccos(np.clip(ys @ a_i, -1.0, 1.0))
                total += lens_area(r_i, alpha_test, d)
            return total
    else:
        pts, w = omega.stratified_samples(seed, samples)
        meta.update({"method": "montecarlo", "seed": int(seed),
                     "samples": int(len(w))})

        def objective(ys):
            ys = np.asarray(ys, dtype=float)
            total = np.empty(ys.shape[0])
            chunk = max(1, (1 << 22) // max(1, len(w)))
            for i in range(0, ys.shape[0], chunk):
                dots = pts @ ys[i:i + chunk].T
                total[i:i + chunk] = ((dots >= t_ll) * w[:, None]).sum(axis=0)
            return total

    lattice = fibonacci_lattice(max(4000, scan_points))
    candidates = np.vstack([lattice] + [c.apex_array()[None, :] for c in omega.caps])
    values = objective(candidates)
    order = np.argsort(values)[::-1][:max(1, refine_candidates)]
    spacing = 2.0 * math.sqrt(4.0 * np.pi / len(lattice))
    coarse_best = float(values[order[0]])
    best_val = coarse_best
    for idx in order:
        _, val = _refine_apex(candidates[idx].copy(), objective, spacing)
        best_val = max(best_val, val)
    rho = min(1.0, max(0.0, best_val / test_area))
    meta.update({
        "coarse_best": coarse_best / test_area,
        "refine_gain": (best_val - coarse_best) / test_area,
        "gap_estimate": max(1e-12, (best_val - coarse_best) / test_area),
        "lattice_spacing": spacing,
    })
    return (rho, meta) if full_output else rho


def _polar_cap_gram(delta: float, L: int) -> np.ndarray:
    order = 2 * L + 2
    t, w = gauss_rule(order).mapped(delta, 1.0)
    q = _norm_assoc_table(L, t)
    n = (L + 1) ** 2
    G = np.zeros((n, n), dtype=complex)
    for m in range(L + 1):
        ls = list(range(m, L + 1))
        A = np.stack([q[l * (l + 1) // 2 + m] for l in ls])
        block = 2.0 * np.pi * (A * w) @ A.T
        for i, l in enumerate(ls):
            for j, lp in enumerate(ls):
                G[_flat_index(l, m), _flat_index(lp, m)] = block[i, j]
                if m > 0:
                    G[_flat_index(l, -m), _flat_index(lp, -m)] = block[i, j]
    return G


def _rotated_cap_gram(cap: SphericalCap, L: int) -> np.ndarray:
    order = 2 * L + 2
    m_phi = 2 * L + 2
    t, wt = gauss_rule(order).mapped(cap.height, 1.0)
    phis = 2.0 * np.pi * np.arange(m_phi) / m_phi
    s = np.sqrt(np.maximum(0.0, 1.0 - t * t))
    local = np.stack([
        np.outer(s, np.cos(phis)).ravel(),
        np.outer(s, np.sin(phis)).ravel(),
        np.outer(t, np.ones(m_phi)).ravel(),
    ], axis=1)
    pts = local @ frame_to_pole(cap.apex_array()).T
    Y = sph_harm_matrix(pts, L)
    w = np.repeat(wt, m_phi) * (2.0 * np.pi / m_phi)
    return (Y.conj().T * w) @ Y


def concentration_matrix(omega: CapUnionDomain, L: int, *, method: str = "exact",
                         seed: int = 0, samples: int = 200_000) -> np.ndarray:
    """Gram matrix G[(l,m),(l',m')] = integral_Omega Y_{l'}^{m'} conj(Y_l^m).

    Hermitian PSD with eigenvalues in [0, 1].  The exact method requires
    pairwise disjoint caps (cap-adapted quadrature is exact for the
    degree-2L integrand); ``method="montecarlo"`` uses seeded stratified
    sampling and works for overlapping caps.
    """
    if L < 0:
        raise ValueError("band limit must be nonnegative")
    if L > _MAX_DENSE_DEGREE:
        raise ValueError(f"band limit {L} exceeds dense cap {_MAX_DENSE_DEGREE}")
    n = (L + 1) ** 2
    if omega.is_empty:
        return np.zeros((n, n), dtype=complex)
    if method == "exact":
        if not omega.pairwise_disjoint:
            raise OverlapError(
                "caps overlap; deterministic entries need disjoint caps "
                "(use method='montecarlo')")
        G = np.zeros((n, n), dtype=complex)
        for cap in omega.caps:
            if abs(cap.apex.z - 1.0) < 1e-13:
                G += _polar_cap_gram(cap.height, L)
            else:
                G += _rotated_cap_gram(cap, L)
    elif method == "montecarlo":
        pts, w = omega.stratified_samples(seed, samples)
        Y = sph_harm_matrix(pts, L)
        G = (Y.conj().T * w) @ Y
    else:
        raise ValueError(f"unknown method {method!r}")
    return 0.5 * (G + G.conj().T)


def top_eigenvalue(G: np.ndarray, *, shift: float = 0.0, tol: float = 1e-12,
                   stall_steps: int = 5, max_iter: int = 100_000,
                   restart_seed: int = 7):
    """Largest eigenvalue of a Hermitian matrix with a unit eigenvector.

    Power iteration (optionally on G + shift*I) from a deterministic
    all-ones start plus one seeded random restart; converged when the
    Rayleigh quotient moves less than ``tol`` over ``stall_steps`` steps.
    For degenerate top eigenspaces the eigenvector is one member of the
    eigenspace (non-unique by nature).
    """
    G = np.asarray(G)
    n = G.shape[0]
    if G.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = float(np.max(np.abs(G))) if n else 0.0
    if scale == 0.0:
        v = np.ones(n, dtype=complex) / math.sqrt(n)
        return 0.0, v
    if np.max(np.abs(G - G.conj().T)) > 1e-8 * scale:
        raise ValueError("matrix is not Hermitian")
    A = G + shift * np.eye(n) if shift else G

    rng = np.random.default_rng(restart_seed)
    starts = [np.ones(n, dtype=complex) / math.sqrt(n)]
    rnd = rng.normal(size=n) + 1j * rng.normal(size=n)
    starts.append(rnd / np.linalg.norm(rnd))

    best_rq, best_vec = -np.inf, starts[0]
    for v in starts:
        history: list[float] = []
        for _ in range(max_iter):
            u = A @ v
            nu = np.linalg.norm(u)
            if nu < 1e-300:
                history.append(0.0)
                break
            rq = float(np.real(np.vdot(v, u)))
            history.append(rq)
            v = u / nu
            if (len(history) > stall_steps
                    and abs(history[-1] - history[-1 - stall_steps]) < tol):
                break
        else:
            raise ConvergenceError("power iteration did not converge")
        if history[-1] > best_rq:
            best_rq, best_vec = history[-1], v
    return best_rq - shift, best_vec


def max_rayleigh_quotient(G: np.ndarray, trials: int, seed: int) -> float:
    """Best Rayleigh quotient of seeded random complex vectors (a lower
    bound on the top eigenvalue, used to audit the eigensolver)."""
    G = np.asarray(G, dtype=complex)
    n = G.shape[0]
    rng = np.random.default_rng(seed)
    best = -np.inf
    chunk = max(1, (1 << 22) // max(1, n))
    remaining = trials
    while remaining > 0:
        k = min(chunk, remaining)
        V = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
        num = np.real(np.einsum("ij,ij->j", V.conj(), G @ V))
        den = np.real(np.einsum("ij,ij->j", V.conj(), V))
        best = max(best, float(np.max(num / den)))
        remaining -= k
    return best


@dataclass
class ConcentrationReport:
    """Verified concentration inequality with all intermediate constants."""

    L: int
    domain: list
    rho: float
    b_constant: float
    bound: float
    lam: float
    eigenvector: HarmonicExpansion
    slack: float
    nonuniform_constant: float
    vacuous: bool
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "domain": self.domain,
            "rho": self.rho,
            "b_constant": self.b_constant,
            "bound": self.bound,
            "lambda": self.lam,
            "slack": self.slack,
            "nonuniform_constant": self.nonuniform_constant,
            "vacuous": self.vacuous,
            "eigenvector": self.eigenvector.to_dict(),
            "metadata": self.metadata,
        }

    def to_json(self, indent: int = 2) -> str:
        return jsonfmt.dumps(self.to_dict(), indent=indent)


def verify_bound(omega: CapUnionDomain, L: int, *, seed: int = 0,
                 samples: int = 200_000, scan_points: int = 4000,
                 tol: float = 1e-8) -> ConcentrationReport:
    """Assemble rho, B_L, the Gram spectrum, and assert lambda <= B_L rho.

    A violation beyond tolerance raises BoundViolationError: it would mean
    a bug, not a failure of the inequality.  For overlapping caps (Monte
    Carlo entries) the check tolerance is widened and recorded.
    """
    if L < 1:
        raise ValueError("band limit must be at least 1")
    rho, meta = nyquist_density(omega, L, scan_points=scan_points, seed=seed,
                                samples=samples, full_output=True)
    B = b_constant(L)
    bound = B * rho
    exact = omega.is_empty or omega.pairwise_disjoint
    method = "exact" if exact else "montecarlo"
    G = concentration_matrix(omega, L, method=method, seed=seed, samples=samples)
    lam, vec = top_eigenvalue(G)
    check_tol = tol if exact else max(tol, 0.05)
    if lam > bound + check_tol or lam < -1e-10 or lam > 1.0 + 1e-8:
        raise BoundViolationError(
            f"lambda = {lam} violates bound {bound} (tol {check_tol}); "
            "this indicates an implementation bug")
    t_ll = largest_zero(L)
    c2 = 1.0 / (2.0 * np.pi * pl_squared_tail(L, t_ll))
    nonuniform = c2 * rho * 2.0 * np.pi * (1.0 - t_ll)
    meta.update({
        "gram_method": method,
        "check_tolerance": check_tol,
        "seed": int(seed),
        "slack_below_rho_gap": bool(bound - lam < 10.0 * meta.get("gap_estimate", 0.0)),
    })
    return ConcentrationReport(
        L=L, domain=omega.to_dict(), rho=rho, b_constant=B, bound=bound,
        lam=lam, eigenvector=HarmonicExpansion(L, vec), slack=bound - lam,
        nonuniform_constant=nonuniform, vacuous=bound >= 1.0, metadata=meta)


def lp_bound(omega: CapUnionDomain, L: int, p: float, *,
             rho: float | None = None) -> float:
    """(B_L rho)^min(p-1, 1), clipped at 1 for reporting."""
    p = float(p)
    if not (1.0 < p < math.inf):
        raise ValueError("exponent must lie in (1, infinity)")
    if rho is None:
        rho = nyquist_density(omega, L)
    raw = (b_constant(L) * rho) ** min(p - 1.0, 1.0)
    return min(1.0, raw)


def _cap_quad_points(cap: SphericalCap, order: int):
    phi_count = 2 * order  # matches the full-sphere grid resolution
    t, wt = gauss_rule(order).mapped(cap.height, 1.0)
    phis = 2.0 * np.pi * np.arange(phi_count) / phi_count
    s = np.sqrt(np.maximum(0.0, 1.0 - t * t))
    local = np.stack([
        np.outer(s, np.cos(phis)).ravel(),
        np.outer(s, np.sin(phis)).ravel(),
        np.outer(t, np.ones(phi_count)).ravel(),
    ], axis=1)
    pts = local @ frame_to_pole(cap.apex_array()).T
    w = np.repeat(wt, phi_count) * (2.0 * np.pi / phi_count)
    return pts, w


def sample_lp_ratio(omega: CapUnionDomain, L: int, p: float, trials: int,
                    seed: int) -> float:
    """Empirical lower bound on the Lp concentration ratio by random search.

    Maximizes integral_Omega |f|^p / integral |f|^p over ``trials`` random
    Gaussian-coefficient expansions plus the p=2 top eigenvector; integrals
    use cap-adapted quadrature in the numerator, so points outside Omega
    never contribute.  Deterministic for a fixed seed.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if L < 0:
        raise ValueError("band limit must be nonnegative")
    p = float(p)
    if omega.is_empty:
        return 0.0
    rng = np.random.default_rng(seed)
    n = (L + 1) ** 2

    order = max(2 * L + 6, 32)
    from .sphharm import SphereGrid
    grid = SphereGrid(order, 2 * order)
    Y_grid = grid.design_matrix(L)
    w_grid = grid.quad_weights().ravel()

    disjoint = omega.pairwise_disjoint
    if disjoint:
        cap_mats = []
        for cap in omega.caps:
            pts, w = _cap_quad_points(cap, order)
            cap_mats.append((sph_harm_matrix(pts, L), w))
    else:
        pts, w = omega.stratified_samples(seed, 200_000)
        cap_mats = [(sph_harm_matrix(pts, L), w)]

    method = "exact" if disjoint else "montecarlo"
    G = concentration_matrix(omega, L, method=method, seed=seed)
    _, eig_vec = top_eigenvalue(G)

    V = rng.normal(size=(n, trials)) + 1j * rng.normal(size=(n, trials))
    V = np.concatenate([V, eig_vec[:, None]], axis=1)

    den = (np.abs(Y_grid @ V) ** p * w_grid[:, None]).sum(axis=0)
    num = np.zeros_like(den)
    for Y_cap, w_cap in cap_mats:
        num += (np.abs(Y_cap @ V) ** p * w_cap[:, None]).sum(axis=0)
    return float(np.max(num / den))
