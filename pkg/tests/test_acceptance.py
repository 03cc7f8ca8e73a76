"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see per-criterion
timing lines.  Every tolerance here is pinned; nothing is calibrated at
run time.
"""

import time

import numpy as np
import pytest

from sphsieve.concentration import (
    b_constant,
    concentration_matrix,
    max_rayleigh_quotient,
    sample_lp_ratio,
    verify_bound,
)
from sphsieve.domains import CapUnionDomain, SphericalCap
from sphsieve.quadrature import pl_squared_tail
from sphsieve.recovery import inpaint, mask
from sphsieve.sieve import (
    cap_count_bound,
    generate_separated,
    rmax_lower_bound,
    sieve_check,
    sieve_constant,
    tightness_ratio_theta,
)
from sphsieve.specfun import bessel_constants, largest_zero, legendre_table
from sphsieve.sphharm import (
    HarmonicExpansion,
    SphereGrid,
    UnitVector,
    sph_harm_matrix,
    synthesize_grid,
)
from sphsieve.zonal import ZonalFilter, convolve, convolve_direct, extremal_objective_p2, g_delta

J01_PRINTED = 2.404825557695772
B_LIMIT_PRINTED = 3.71038068570948


def _report(n, detail, elapsed):
    print(f"PASS criterion {n}: {detail} ({elapsed:.2f}s)")


def random_expansion(rng, L):
    n = (L + 1) ** 2
    return HarmonicExpansion(L, rng.normal(size=n) + 1j * rng.normal(size=n))


def cap(apex, height):
    return SphericalCap(UnitVector.normalized(*apex), height)


# --- criterion 6/7 domain matrix, built once and shared -------------------

_APEXES = [
    (0.0, 0.0, 1.0), (0.3, -1.1, 0.6), (1.0, 1.0, 1.0), (-0.5, 0.2, -1.0),
    (2.0, -0.3, 0.1), (0.0, 1.0, -1.0),
]


def _build_domain_matrix():
    cases = []
    for L in range(1, 21):
        t = largest_zero(L)
        for j, frac in enumerate((0.5, 0.15)):
            apex = _APEXES[(L + j) % len(_APEXES)]
            delta = 1.0 - frac * (1.0 - t)
            cases.append((CapUnionDomain([cap(apex, delta)]), L))
    unions = [
        ([cap((0, 0, 1), 0.9), cap((0, 0, -1), 0.92)], 4),
        ([cap((0, 0, 1), 0.95), cap((1, 0, 0), 0.96), cap((-1, 1, -1), 0.97)], 6),
        ([cap((0.2, 1, 0.5), 0.96), cap((-1, 0.1, -0.4), 0.97)], 8),
        ([cap((0, 0, 1), 0.985), cap((1, 1, 0), 0.99), cap((0, -1, -1), 0.99)], 12),
        ([cap((1, 0, 0.2), 0.995), cap((-0.3, 1, -0.2), 0.996)], 16),
    ]
    cases.extend((CapUnionDomain(caps), L) for caps, L in unions)
    return cases


@pytest.fixture(scope="module")
def concentration_matrix_cases():
    """verify_bound over the whole domain matrix, with build time."""
    start = time.perf_counter()
    results = []
    for i, (omega, L) in enumerate(_build_domain_matrix()):
        report = verify_bound(omega, L, seed=i)
        G = concentration_matrix(omega, L)
        results.append((omega, L, report, G))
    elapsed = time.perf_counter() - start
    return results, elapsed


def test_criterion_01_constants():
    start = time.perf_counter()
    bc = bessel_constants()
    assert abs(bc.j01 - J01_PRINTED) <= 1e-12
    assert abs(bc.b_limit - B_LIMIT_PRINTED) <= 1e-10
    assert abs(b_constant(100) - bc.b_limit) <= 0.05
    assert b_constant(1) == pytest.approx(3.0, abs=1e-12)
    b2_symbolic = (1 - 1 / np.sqrt(3)) / (0.2 - 2 / (15 * np.sqrt(3)))
    assert b_constant(2) == pytest.approx(b2_symbolic, rel=1e-12)
    assert abs(b_constant(2) - 3.435616) <= 1e-5
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(1, "j01, B limit, B_1, B_2, B_100 reproduced", elapsed)


def test_criterion_02_zero_asymptotics():
    start = time.perf_counter()
    j01_sq = bessel_constants().j01 ** 2
    for n in (20, 50, 100, 500):
        gap = abs(largest_zero(n) - (1.0 - j01_sq / (2.0 * n * n)))
        assert gap <= 10.0 / n**3, f"n={n}: {gap} > {10.0 / n**3}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(2, "largest-zero asymptotic with cubic remainder", elapsed)


def test_criterion_03_ordering_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    failures = 0
    for n in range(1, 51):
        t_nn = largest_zero(n)
        t = rng.uniform(t_nn, 1.0, size=100)
        t = t[t < 1.0]
        table = legendre_table(n, t)
        if not np.all(np.diff(table, axis=0) < 0):
            failures += 1
        if np.min(table) < -1e-12:
            failures += 1
    assert failures == 0
    elapsed = time.perf_counter() - start
    _report(3, "ordering and nonnegativity on [t_nn, 1), zero failures", elapsed)


def test_criterion_04_convolution_theorem():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for trial in range(20):
        L = 1 + trial % 5
        f = random_expansion(rng, L)
        kind = trial % 3
        if kind == 0:
            k = int(rng.integers(0, 6))
            g = ZonalFilter(-1.0, lambda t, k=k: legendre_table(k, t)[k],
                            degree_hint=k)
        elif kind == 1:
            delta = float(rng.uniform(-0.5, 0.8))
            g = ZonalFilter(delta, lambda t: np.ones_like(t), degree_hint=0)
        else:
            Lg = int(rng.integers(1, 6))
            g = g_delta(Lg, float(rng.uniform(largest_zero(Lg), 0.99)))
        pts = rng.normal(size=(6, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        direct = convolve_direct(f, g, pts)
        via_coeffs = sph_harm_matrix(pts, f.degree_max) @ convolve(f, g).coeffs
        worst = max(worst, float(np.max(np.abs(direct - via_coeffs))))
    assert worst <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _report(4, f"20 random convolution pairs, worst gap {worst:.2e}", elapsed)


def test_criterion_05_extremal_minimality():
    start = time.perf_counter()
    rng = np.random.default_rng(11)
    pairs = 0
    for L in range(1, 11):
        t_ll = largest_zero(L)
        for delta in (t_ll, (t_ll + 1.0) / 2.0, 0.999):
            target = 1.0 / (2.0 * np.pi * pl_squared_tail(L, delta))
            assert extremal_objective_p2(g_delta(L, delta), L) == \
                pytest.approx(target, abs=1e-12)
            count = 0
            for eps in (0.1, -0.1, 0.01, -0.01):
                g = ZonalFilter(
                    delta, lambda t, e=eps: legendre_table(L, t)[L] + e,
                    degree_hint=L)
                assert extremal_objective_p2(g, L) >= target - 1e-12
                count += 1
            while count < 200:
                kind = count % 3
                if kind == 0:
                    # step chi_[a, 1] with a >= delta stays in the class;
                    # declaring its true support keeps the quadrature exact
                    a = float(rng.uniform(delta, 1.0 - 1e-6))
                    g = ZonalFilter(a, lambda t: np.ones_like(t),
                                    degree_hint=0)
                elif kind == 1:
                    k = int(rng.integers(0, L + 3))
                    g = ZonalFilter(delta,
                                    lambda t, k=k: legendre_table(k, t)[k],
                                    degree_hint=k)
                else:
                    coeffs = rng.normal(size=6)
                    g = ZonalFilter(
                        delta,
                        lambda t, c=coeffs: np.polynomial.polynomial.polyval(t, c),
                        degree_hint=5)
                assert extremal_objective_p2(g, L) >= target - 1e-12
                count += 1
            pairs += 1
    elapsed = time.perf_counter() - start
    _report(5, f"200 filters for each of {pairs} (L, delta) pairs", elapsed)


def test_criterion_06_concentration_bound(concentration_matrix_cases):
    results, build_time = concentration_matrix_cases
    start = time.perf_counter()
    assert len(results) >= 30
    for i, (omega, L, report, G) in enumerate(results):
        assert -1e-12 <= report.lam <= 1.0 + 1e-8
        assert report.lam <= report.bound + 1e-8, (L, report.bound, report.lam)
        best_rq = max_rayleigh_quotient(G, trials=10_000, seed=1000 + i)
        assert best_rq <= report.lam + 1e-6, (L, best_rq, report.lam)
    elapsed = build_time + (time.perf_counter() - start)
    assert elapsed < 300.0
    _report(6, f"{len(results)} domains: lambda <= B_L rho and eigensolver "
               "dominates 1e4 Rayleigh quotients", elapsed)


def test_criterion_07_lp_bounds(concentration_matrix_cases):
    results, _ = concentration_matrix_cases
    start = time.perf_counter()
    for i, (omega, L, report, _) in enumerate(results):
        for p in (1.5, 3.0):
            raw = (report.b_constant * report.rho) ** min(p - 1.0, 1.0)
            value = sample_lp_ratio(omega, L, p, trials=30, seed=2000 + i)
            assert value <= raw + 1e-8, (L, p, value, raw)
    elapsed = time.perf_counter() - start
    _report(7, f"sampled Lp ratios under the interpolation bound on "
               f"{len(results)} domains, p in {{1.5, 3}}", elapsed)


def test_criterion_08_sieve_inequality():
    start = time.perf_counter()
    assert sieve_constant(np.pi, 1) == pytest.approx(3 / np.pi, abs=1e-12)
    rng = np.random.default_rng(99)
    trials = 0
    for theta in (np.pi / 8, np.pi / 4, np.pi / 2):
        for seed in range(100):
            pts = generate_separated(theta, seed)
            for L in (2, 5, 10):
                report = sieve_check(pts, random_expansion(rng, L))
                assert report.ratio <= 1.0, (theta, seed, L, report.ratio)
                trials += 1
    assert trials >= 900
    # D grows like L^2 at fixed separation ...
    ratios_l = [sieve_constant(np.pi / 4, L) / L**2 for L in range(10, 101, 10)]
    assert max(ratios_l) / min(ratios_l) <= 5.0
    # ... and like 1/(1 - cos theta) at fixed degree
    thetas = [np.pi / 16, np.pi / 8, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi]
    rows = tightness_ratio_theta(5, thetas, seed=77)
    ratios_t = [r["d_times_one_minus_cos"] for r in rows]
    assert max(ratios_t) / min(ratios_t) <= 50.0
    assert all(r["empirical_over_bound"] <= 1.0 for r in rows)
    elapsed = time.perf_counter() - start
    _report(8, f"{trials} sieve trials all below the bound; "
               "both tightness scans bounded", elapsed)


def test_criterion_09_packing():
    start = time.perf_counter()
    rng = np.random.default_rng(31)
    for theta in (np.pi / 8, np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2):
        pts = generate_separated(theta, seed=5)
        assert len(pts) >= rmax_lower_bound(theta) - 1e-9
        arr = pts.as_array()
        apexes = rng.normal(size=(1000, 3))
        apexes /= np.linalg.norm(apexes, axis=1, keepdims=True)
        apexes = np.vstack([apexes, arr])
        for L in (2, 5, 10):
            counts = (arr @ apexes.T >= largest_zero(L)).sum(axis=0)
            assert counts.max() <= cap_count_bound(theta, L), (theta, L)
    elapsed = time.perf_counter() - start
    _report(9, "maximal sizes beat the covering bound; in-cap counts below "
               "the packing bound", elapsed)


def test_criterion_10_recovery():
    start = time.perf_counter()
    cases = [
        (CapUnionDomain([cap((0, 0, 1), 0.9)]), 4),
        (CapUnionDomain([cap((0, 0, 1), 0.9)]), 5),
        (CapUnionDomain([cap((0.3, -1.1, 0.6), 0.955)]), 8),
        (CapUnionDomain([cap((0, 0, 1), 0.97)]), 10),
        (CapUnionDomain([cap((0, 0, 1), 0.95), cap((1, 0, -1), 0.95)]), 6),
    ]
    rng = np.random.default_rng(123)
    lambdas = []
    for omega, L in cases:
        truth = random_expansion(rng, L)
        grid = SphereGrid.for_degree(L)
        observed, _ = mask(grid, synthesize_grid(truth, grid), omega)
        run = inpaint(grid, observed, omega, L, 50, truth)
        lam = run.lambda_bound
        assert lam < 0.9, (L, lam)
        lambdas.append(lam)
        assert all(r <= lam + 1e-3 for r in run.contraction_ratios), (L, lam)
        e0 = run.iterates[0]
        assert run.iterates[-1] <= lam**48 * e0 * 1.01, (L, lam)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    _report(10, "5 recoveries contract at the eigenvalue rate "
                f"(lambdas {', '.join(f'{v:.3f}' for v in lambdas)})", elapsed)
