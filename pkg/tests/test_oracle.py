import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasekit.core_model import AmplitudeSpec, GeneralPhase, OscillatoryProblem, PowerFn, constant
from phasekit.erdelyi_expansion import ray_estimate_constants
from phasekit.numerics import nth_derivative
from phasekit.oracle import (RaySpec, oscillatory_integral, phi_zero_closed_form, ray_decay_check,
                             ray_integral, ray_quadrature)

from conftest import as_complex, singular_stationary

SQRT_PI = math.sqrt(math.pi)


def linear_problem(mu1=1.0, reg=None):
    return OscillatoryProblem(0.0, 1.0, AmplitudeSpec(mu1, 1.0, reg or constant(1.0)),
                              GeneralPhase(1.0, 1.0, constant(1.0)))


class TestOscillatoryIntegral:
    def test_linear_phase(self):
        got = oscillatory_integral(linear_problem(), 10.0).value
        assert got == pytest.approx((cmath.exp(10j) - 1) / 10j, abs=1e-13)

    @pytest.mark.parametrize("omega", ["10", "100", "1000"])
    def test_singular_stationary_against_mpmath(self, derived, omega):
        got = oscillatory_integral(singular_stationary(), float(omega)).value
        ref = as_complex(derived["singular_stationary"][omega])
        assert abs(got - ref) <= 1e-9 * abs(ref)

    def test_singular_power_integral(self):
        # int_0^1 p^(mu-1) exp(i omega p) dp at omega -> 0 limit is 1/mu
        got = oscillatory_integral(linear_problem(0.25), 1e-8).value
        assert got == pytest.approx(4.0, rel=1e-7)

    def test_additive_under_splitting(self):
        pr = singular_stationary(mu=0.5)
        whole = oscillatory_integral(pr, 300.0).value
        left = OscillatoryProblem(0.0, 0.4, AmplitudeSpec(0.5, 1.0, constant(1.0)), pr.phase)
        right = OscillatoryProblem(0.4, 1.0, AmplitudeSpec(1.0, 1.0, PowerFn(0.0, 1.0, -0.5)), pr.phase)
        total = oscillatory_integral(left, 300.0).value + oscillatory_integral(right, 300.0, check=False).value
        assert abs(total - whole) <= 1e-9 * abs(whole)

    def test_large_omega(self):
        pr = singular_stationary()
        got = oscillatory_integral(pr, 1e6).value
        lead = (SQRT_PI / 2) * cmath.exp(-0.25j * math.pi) * 1e-3
        assert abs(got - lead) < 0.05 * abs(lead)

    def test_invalid_problem(self):
        with pytest.raises(ValueError):
            oscillatory_integral(linear_problem(1.5), 1.0)


class TestRays:
    def test_closed_form_anchor(self):
        ref = -SQRT_PI * cmath.exp(0.25j * math.pi)
        assert phi_zero_closed_form(1, 1.0, 0.5, 0, 1.0) == pytest.approx(ref, rel=1e-15)
        assert ray_integral(RaySpec(1, 1.0, 0.5, 0, 0.0, 1.0)) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("omega", [1.0, 4.0, 100.0])
    def test_stationary_anchor(self, omega):
        ref = -(SQRT_PI / 2) * cmath.exp(-0.25j * math.pi) * omega ** -0.5
        assert phi_zero_closed_form(2, 2.0, 1.0, 0, omega) == pytest.approx(ref, rel=1e-15)
        assert ray_integral(RaySpec(2, 2.0, 1.0, 0, 0.0, omega)) == pytest.approx(ref, rel=1e-10)

    def test_first_primitive_bounded(self):
        a = ray_estimate_constants(1, 2.0)[0]
        for s in (0.0, 0.05, 0.5, 2.0):
            for omega in (1.0, 10.0, 1e3):
                val = ray_integral(RaySpec(1, 2.0, 1.0, 0, s, omega))
                assert abs(val) <= a * omega ** -0.5 * (1 + 1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 2), st.sampled_from([1.0, 1.5, 2.0, 3.0]), st.sampled_from([0.25, 0.5, 1.0]),
           st.floats(0.1, 2.0), st.sampled_from([1.0, 10.0]))
    def test_first_primitive_derivative(self, j, rho, mu, s, omega):
        f = lambda x: np.array([ray_integral(RaySpec(j, rho, mu, 0, float(v), omega)) for v in np.ravel(x)])
        d = nth_derivative(f, s, 1, domain=(0.0, math.inf), length=s)
        sigma = 1 if j == 1 else -1
        expected = s ** (mu - 1) * cmath.exp(sigma * 1j * omega * s ** rho)
        assert abs(d - expected) <= 1e-5 * abs(expected)

    @pytest.mark.parametrize("rho,n,s", [(1.0, 0, 0.0), (2.0, 1, 0.3), (3.0, 2, 1.0)])
    def test_tail_truncation(self, monkeypatch, rho, n, s):
        import phasekit.oracle as oracle
        ray = RaySpec(1, rho, 0.5, n, s, 10.0)
        base = ray_integral(ray)
        # T = (E/omega)^(1/rho) doubles when E grows by 2^rho
        monkeypatch.setattr(oracle, "TAIL_EXPONENT", oracle.TAIL_EXPONENT * 2.0 ** rho)
        longer = ray_integral(ray)
        assert abs(longer - base) <= 1e-10 * abs(base)

    def test_rejects_bad_rays(self):
        for args in [(3, 2.0, 1.0, 0, 0.0, 1.0), (1, 0.5, 1.0, 0, 0.0, 1.0),
                     (1, 2.0, 1.0, 0, -1.0, 1.0), (1, 2.0, 1.0, 0, 0.0, 0.0)]:
            with pytest.raises(ValueError):
                RaySpec(*args)


class TestDecayCheck:
    @pytest.mark.parametrize("s,omega", [(0.0, 1.0), (0.7, 3.0), (5.0, 0.2)])
    def test_linear_equality_case(self, s, omega):
        assert ray_decay_check(1.0, s, omega, np.linspace(0.0, 10.0, 21))

    def test_quadratic(self):
        assert ray_decay_check(2.0, 1.0, 1.0, [0.1, 1.0, 10.0])

    def test_cubic_log_grid(self):
        assert ray_decay_check(3.0, 0.5, 5.0, np.logspace(-3, 1, 100))
