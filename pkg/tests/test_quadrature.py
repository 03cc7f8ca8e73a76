import numpy as np
import pytest

from sphsieve.quadrature import gauss_rule, integrate_tail, pl_cross_tail, pl_squared_tail
from sphsieve.specfun import all_zeros, largest_zero, legendre_table


class TestGaussRule:
    def test_one_point_rule_is_midpoint(self):
        rule = gauss_rule(1)
        assert rule.nodes.tolist() == [0.0]
        assert rule.weights.tolist() == [2.0]

    def test_two_point_rule(self):
        rule = gauss_rule(2)
        assert np.allclose(rule.nodes, [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-15)
        assert np.allclose(rule.weights, [1.0, 1.0], atol=1e-14)

    def test_high_monomial_exact(self):
        # order 20 integrates t^38 (degree 2n - 2) exactly
        assert gauss_rule(20).integrate(lambda t: t**38) == pytest.approx(
            2.0 / 39.0, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 8, 64, 313])
    def test_weights_sum_to_two(self, n):
        assert gauss_rule(n).weights.sum() == pytest.approx(2.0, abs=1e-12)

    def test_nodes_are_legendre_zeros(self):
        assert np.array_equal(gauss_rule(17).nodes, all_zeros(17))

    def test_monomial_exactness_up_to_degree(self):
        rule = gauss_rule(7)
        for k in range(2 * 7):
            exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
            assert rule.integrate(lambda t: t**k) == pytest.approx(exact, abs=1e-12)

    def test_legendre_orthogonality(self):
        n = 12
        rule = gauss_rule(n)
        table = legendre_table(n - 1, rule.nodes)
        gram = (table * rule.weights) @ table.T
        expected = np.diag(2.0 / (2 * np.arange(n) + 1))
        assert np.max(np.abs(gram - expected)) <= 1e-12

    def test_order_bounds(self):
        with pytest.raises(ValueError):
            gauss_rule(0)
        with pytest.raises(ValueError):
            gauss_rule(2001)


class TestIntegrateTail:
    def test_constant(self):
        assert integrate_tail(lambda t: np.ones_like(t), 0.0, degree_hint=0) == \
            pytest.approx(1.0, abs=1e-14)

    def test_p1_squared(self):
        assert integrate_tail(lambda t: t * t, 0.0, degree_hint=2) == \
            pytest.approx(1.0 / 3.0, abs=1e-14)

    @pytest.mark.parametrize("L", [1, 3, 7])
    def test_full_interval_normalization(self, L):
        value = integrate_tail(lambda t: legendre_table(L, t)[L] ** 2, -1.0,
                               degree_hint=2 * L)
        assert value == pytest.approx(2.0 / (2 * L + 1), abs=1e-13)

    def test_adaptive_path_on_smooth_integrand(self):
        value = integrate_tail(np.exp, 0.0)
        assert value == pytest.approx(np.e - 1.0, rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            integrate_tail(np.exp, 1.0, degree_hint=2)
        with pytest.raises(ValueError):
            integrate_tail(np.exp, -1.5, degree_hint=2)


class TestTailIntegrals:
    def test_p1_squared_from_zero(self):
        assert pl_squared_tail(1, 0.0) == pytest.approx(1.0 / 3.0, rel=1e-13)

    def test_p2_squared_from_its_zero(self):
        # antiderivative of P_2^2 is (9 t^5 / 5 - 2 t^3 + t) / 4
        def anti(t):
            return (9 * t**5 / 5 - 2 * t**3 + t) / 4
        delta = 1 / np.sqrt(3)
        assert pl_squared_tail(2, delta) == pytest.approx(
            anti(1.0) - anti(delta), rel=1e-13)
        assert pl_squared_tail(2, delta) == pytest.approx(
            0.2 - 2 / (15 * np.sqrt(3)), rel=1e-13)

    def test_decreasing_in_delta(self):
        values = [pl_squared_tail(6, d) for d in np.linspace(-1, 0.999, 25)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-3  # vanishing interval

    def test_cross_equals_squared_on_diagonal(self):
        assert pl_cross_tail(5, 5, 0.2) == pytest.approx(
            pl_squared_tail(5, 0.2), rel=1e-14)

    def test_orthogonality_on_full_interval(self):
        for l in range(5):
            assert pl_cross_tail(5, l, -1.0) == pytest.approx(0.0, abs=1e-13)

    def test_cross_dominates_squared_above_largest_zero(self):
        # With delta at or above the largest zero of P_L, every cross
        # integral with a lower degree dominates the squared tail.
        for L in (2, 5, 11, 30):
            t_ll = largest_zero(L)
            for delta in (t_ll, (t_ll + 1.0) / 2.0, 0.999):
                base = pl_squared_tail(L, delta)
                for l in range(L + 1):
                    assert pl_cross_tail(L, l, delta) >= base - 1e-12

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            pl_cross_tail(3, 4, 0.0)
        with pytest.raises(ValueError):
            pl_squared_tail(-1, 0.0)
