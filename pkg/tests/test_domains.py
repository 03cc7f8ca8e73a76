import numpy as np
import pytest

from sphsieve.domains import CapUnionDomain, SphericalCap, fibonacci_lattice, frame_to_pole, lens_area
from sphsieve.sphharm import UnitVector


def cap(apex, height):
    return SphericalCap(UnitVector.normalized(*apex), height)


class TestSphericalCap:
    def test_area_formula(self):
        assert cap((0, 0, 1), 0.25).area == pytest.approx(2 * np.pi * 0.75)

    def test_membership(self):
        c = cap((0, 0, 1), 0.5)
        pts = np.array([[0, 0, 1.0], [1, 0, 0.0], [0, 0, -1.0]])
        assert c.contains(pts).tolist() == [True, False, False]

    def test_height_validation(self):
        with pytest.raises(ValueError):
            cap((0, 0, 1), 1.5)

    def test_dict_round_trip(self):
        c = cap((1, 2, 2), 0.1)
        back = SphericalCap.from_dict(c.to_dict())
        assert back.height == c.height
        assert back.apex.as_array() == pytest.approx(c.apex.as_array())


class TestLensArea:
    def test_far_apart_is_empty(self):
        assert lens_area(0.3, 0.4, 1.0) == 0.0

    def test_containment_is_smaller_cap(self):
        assert lens_area(0.3, 1.0, 0.2) == pytest.approx(
            2 * np.pi * (1 - np.cos(0.3)))

    def test_orthogonal_hemispheres_make_a_lune(self):
        assert lens_area(np.pi / 2, np.pi / 2, np.pi / 2) == pytest.approx(np.pi)

    def test_against_monte_carlo(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(400_000, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        for alpha, beta, d in [(0.5, 0.7, 0.9), (1.2, 0.4, 1.3), (2.0, 1.5, 1.0)]:
            a1 = np.array([0.0, 0.0, 1.0])
            a2 = np.array([np.sin(d), 0.0, np.cos(d)])
            frac = np.mean((pts @ a1 >= np.cos(alpha)) & (pts @ a2 >= np.cos(beta)))
            assert lens_area(alpha, beta, d) == pytest.approx(
                4 * np.pi * frac, abs=6e-3)

    def test_vectorized_over_separation(self):
        d = np.array([0.0, 0.5, 3.0])
        vals = lens_area(0.4, 0.6, d)
        assert vals.shape == (3,)
        assert vals[2] == 0.0


class TestCapUnionDomain:
    def test_empty(self):
        om = CapUnionDomain([])
        assert om.is_empty
        assert om.area() == (0.0, 0.0)

    def test_disjoint_detection(self):
        near = CapUnionDomain([cap((0, 0, 1), 0.9), cap((0, 0, -1), 0.9)])
        assert near.pairwise_disjoint
        overlapping = CapUnionDomain([cap((0, 0, 1), 0.5), cap((0.1, 0, 1), 0.5)])
        assert not overlapping.pairwise_disjoint

    def test_hemisphere_pairs_never_disjoint(self):
        om = CapUnionDomain([cap((0, 0, 1), 0.0), cap((0, 0, -1), 0.0)])
        assert not om.pairwise_disjoint

    def test_disjoint_area_is_exact_sum(self):
        om = CapUnionDomain([cap((0, 0, 1), 0.8), cap((1, 0, 0), 0.9)])
        area, err = om.area()
        assert err == 0.0
        assert area == pytest.approx(2 * np.pi * (0.2 + 0.1))

    def test_monte_carlo_area_of_nested_caps(self):
        # smaller cap inside a bigger one: union area is the bigger cap
        om = CapUnionDomain([cap((0, 0, 1), 0.5), cap((0, 0, 1), 0.8)])
        assert not om.pairwise_disjoint
        area, err = om.area(seed=3, samples=100_000)
        assert err > 0.0
        assert area == pytest.approx(2 * np.pi * 0.5, abs=max(5 * err, 1e-3))

    def test_stratified_weights_integrate_indicator(self):
        om = CapUnionDomain([cap((0, 0, 1), 0.6), cap((1, 1, 0), 0.7)])
        pts, w = om.stratified_samples(seed=1, samples=50_000)
        assert np.all(om.contains(pts))
        total = float(np.sum(w))
        exact = sum(c.area for c in om.caps)  # disjoint here
        assert total == pytest.approx(exact, rel=2e-2)

    def test_multiplicity(self):
        om = CapUnionDomain([cap((0, 0, 1), 0.0), cap((0, 0, 1), 0.5)])
        pts = np.array([[0, 0, 1.0], [1, 0, 0.0], [0, 0, -1.0]])
        assert om.multiplicity(pts).tolist() == [2, 1, 0]


class TestLattice:
    def test_points_are_unit(self):
        pts = fibonacci_lattice(500)
        assert pts.shape == (500, 3)
        assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) < 1e-12

    def test_roughly_equidistributed(self):
        pts = fibonacci_lattice(2000)
        # z-coordinates should fill (-1, 1) nearly uniformly
        assert abs(np.mean(pts[:, 2])) < 1e-9
        assert np.max(pts[:, 2]) > 0.999
        with pytest.raises(ValueError):
            fibonacci_lattice(0)


class TestFrame:
    def test_maps_pole_to_apex(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            apex = rng.normal(size=3)
            apex /= np.linalg.norm(apex)
            R = frame_to_pole(apex)
            assert R @ np.array([0, 0, 1.0]) == pytest.approx(apex, abs=1e-14)
            assert R @ R.T == pytest.approx(np.eye(3), abs=1e-14)

    def test_handles_poles(self):
        assert frame_to_pole([0, 0, 1.0]) == pytest.approx(np.eye(3))
        south = frame_to_pole([0, 0, -1.0])
        assert south @ np.array([0, 0, 1.0]) == pytest.approx([0, 0, -1.0])
        assert np.linalg.det(south) == pytest.approx(1.0)
