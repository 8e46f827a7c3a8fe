import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasekit.numerics import (DerivativeSettings, QuadratureBudgetError, QuadratureSettings,
                               RootBracketError, StencilDomainError, gamma_real, gauss_jacobi,
                               gauss_legendre, integrate_adaptive, integrate_endpoint_singular,
                               nth_derivative, solve_monotone_root)


class TestGamma:
    def test_half_is_sqrt_pi(self):
        assert gamma_real(0.5) == pytest.approx(1.77245385090552, rel=1e-13)

    @pytest.mark.parametrize("x", [1.0, 2.0])
    def test_unit_values(self, x):
        assert gamma_real(x) == 1.0

    def test_three_quarters_against_fixture(self, derived):
        assert gamma_real(0.75) == pytest.approx(derived["numerics"]["gamma_0.75"], rel=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.5, float("nan"), float("inf")])
    def test_rejects_outside_domain(self, x):
        with pytest.raises(ValueError):
            gamma_real(x)

    @given(st.floats(0.05, 29.0))
    def test_recurrence(self, x):
        assert gamma_real(x + 1.0) == pytest.approx(x * gamma_real(x), rel=1e-13)


class TestRoot:
    def test_square(self):
        assert solve_monotone_root(lambda k: k * k - 1.0, 0.0, 2.0) == pytest.approx(1.0, abs=1e-14)

    def test_double_root_bracket(self):
        assert solve_monotone_root(lambda k: k * k - k, 0.5, 2.0) == pytest.approx(1.0, abs=1e-14)

    def test_balance_equation(self, derived):
        a, b, c = math.sqrt(math.pi) / 2, 0.5, math.sqrt(math.pi) / 4
        f = lambda k: a * k * k - b * k - c
        r = solve_monotone_root(f, 0.0, 10.0)
        assert r == pytest.approx(derived["numerics"]["balance_N1_rho2_gamma0.5"]["K"], abs=1e-12)
        assert abs(f(r)) <= 1e-12 * max(abs(f(0.0)), abs(f(10.0)))

    def test_no_sign_change(self):
        with pytest.raises(RootBracketError):
            solve_monotone_root(lambda k: k * k + 1.0, 0.0, 2.0)

    @given(st.floats(0.1, 10.0), st.floats(0.0, 5.0), st.floats(0.01, 5.0), st.sampled_from([2.0, 2.5, 3.0]))
    def test_balance_family(self, a, b, c, rho):
        f = lambda k: a * k ** rho - b * k - c
        hi = 1.0 + (b + c) / a
        r = solve_monotone_root(f, 0.0, hi)
        assert abs(f(r)) <= 1e-10 * max(abs(f(0.0)), abs(f(hi)))


class TestDerivative:
    def test_cubic_second_derivative(self):
        assert nth_derivative(lambda s: s ** 3, 1.0, 2, domain=(0.0, 2.0)) == pytest.approx(6.0, abs=1e-8)

    def test_exponential_third_at_left_end(self):
        val = nth_derivative(np.exp, 0.0, 3, domain=(0.0, 1.0))
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_complex_valued(self):
        f = lambda s: np.exp(2j * s)
        assert nth_derivative(f, 0.3, 1, domain=(0.0, 1.0)) == pytest.approx(2j * cmath.exp(0.6j), abs=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=7), st.integers(1, 3),
           st.sampled_from([0.0, 1.0]))
    def test_polynomials_one_sided(self, coeffs, n, s):
        poly = np.polynomial.Polynomial(coeffs)
        scale = max(1.0, float(np.sum(np.abs(coeffs))))
        got = nth_derivative(poly, s, n, domain=(0.0, 1.0))
        # one-sided stencils keep only first-order Richardson steps
        assert abs(got - poly.deriv(n)(s)) <= 1e-4 * scale

    def test_point_outside_domain(self):
        with pytest.raises(StencilDomainError):
            nth_derivative(np.exp, 2.0, 1, domain=(0.0, 1.0))

    def test_order_limit(self):
        with pytest.raises(ValueError):
            nth_derivative(np.exp, 0.5, 5, domain=(0.0, 1.0))

    def test_explicit_step(self):
        val = nth_derivative(np.sin, 0.5, 1, domain=(0.0, 1.0),
                             settings=DerivativeSettings(base_step=1e-3, richardson_levels=3))
        assert val == pytest.approx(math.cos(0.5), abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=7), st.integers(1, 3),
           st.floats(0.25, 0.75))
    def test_polynomials_exact(self, coeffs, n, s):
        poly = np.polynomial.Polynomial(coeffs)
        exact = poly.deriv(n)(s)
        scale = max(1.0, float(np.sum(np.abs(coeffs))))
        got = nth_derivative(poly, s, n, domain=(0.0, 1.0))
        assert abs(got - exact) <= 1e-7 * scale


class TestQuadrature:
    def test_constant(self):
        assert integrate_adaptive(lambda p: np.ones_like(p), 0.0, 1.0).value == pytest.approx(1.0)

    def test_linear_exponential(self):
        got = integrate_adaptive(lambda p: np.exp(10j * p), 0.0, 1.0).value
        assert got == pytest.approx((cmath.exp(10j) - 1) / 10j, abs=1e-13)

    def test_fresnel_type(self, derived):
        got = integrate_adaptive(lambda p: np.cos(100 * p * p), 0.0, 1.0).value
        assert got.real == pytest.approx(derived["numerics"]["int_cos_100p2"], abs=1e-12)

    def test_budget_error_carries_estimate(self):
        with pytest.raises(QuadratureBudgetError) as info:
            integrate_adaptive(lambda p: np.cos(1e4 * p), 0.0, 1.0,
                               QuadratureSettings(1e-14, 1e-300, 3))
        assert math.isfinite(abs(info.value.estimate))

    @pytest.mark.parametrize("mu,expected", [(0.5, 2.0), (0.75, 4.0 / 3.0)])
    def test_singular_power(self, mu, expected):
        got = integrate_endpoint_singular(lambda s: np.ones_like(s), 1.0, mu).value
        assert got == pytest.approx(expected, rel=1e-12)

    def test_singular_exponential(self, derived):
        got = integrate_endpoint_singular(np.exp, 1.0, 0.5).value
        assert got.real == pytest.approx(derived["numerics"]["int_s^-1/2_exp"], rel=1e-12)

    def test_unit_weight_matches_plain(self):
        f = lambda s: np.exp(3j * s) / (1 + s * s)
        a = integrate_endpoint_singular(f, 2.0, 1.0).value
        b = integrate_adaptive(f, 0.0, 2.0).value
        assert abs(a - b) <= 1e-12

    def test_tighter_tolerance_does_not_move_away(self, derived):
        ref = derived["numerics"]["int_cos_100p2"]
        f = lambda p: np.cos(100 * p * p)
        loose = integrate_adaptive(f, 0.0, 1.0, QuadratureSettings(1e-6, 1e-300)).value.real
        tight = integrate_adaptive(f, 0.0, 1.0, QuadratureSettings(5e-7, 1e-300)).value.real
        assert abs(tight - ref) <= abs(loose - ref) + 1e-15

    @pytest.mark.parametrize("n", [5, 16, 40])
    def test_gauss_legendre_moments(self, n):
        x, w = gauss_legendre(n)
        assert np.sum(w) == pytest.approx(2.0)
        assert np.dot(w, x ** (2 * n - 2)) == pytest.approx(2.0 / (2 * n - 1), rel=1e-12)

    def test_gauss_jacobi_weight(self):
        # int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^(a+b+1) B(a+1, b+1)
        a, b = -0.25, 0.5
        x, w = gauss_jacobi(20, a, b)
        beta = math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)
        assert np.sum(w) == pytest.approx(2 ** (a + b + 1) * beta, rel=1e-12)

    def test_gauss_jacobi_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            gauss_jacobi(5, -1.0, 0.0)

    def test_settings_validation(self):
        with pytest.raises(ValueError):
            QuadratureSettings(0.0, 1e-10)
        with pytest.raises(ValueError):
            QuadratureSettings(1e-10, 1e-10, 0)
        with pytest.raises(ValueError):
            DerivativeSettings(base_step=-1.0)
