import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phasekit.core_model import (AmplitudeSpec, DomainError, GeneralPhase, OscillatoryProblem,
                                 Polynomial, PowerFn, QuadraticPhase, as_general, constant,
                                 eval_amplitude, eval_phase, mirror_problem, sobolev_norm,
                                 sup_norm, validate_problem)


def problem(mu1=0.75, mu2=1.0, reg=None, phase=None, p1=0.0, p2=1.0):
    return OscillatoryProblem(p1, p2, AmplitudeSpec(mu1, mu2, reg or constant(1.0)),
                              phase or QuadraticPhase(1.0, 0.0))


class TestValidation:
    def test_quadratic_singular_ok(self):
        assert validate_problem(problem()).ok

    def test_mu_out_of_range(self):
        rep = validate_problem(problem(mu1=1.5))
        assert "mu1 outside (0,1]" in rep.violations

    def test_regular_part_vanishing_at_singular_end(self):
        rep = validate_problem(problem(mu1=0.5, reg=Polynomial([0.0, 1.0])))
        assert "regular part vanishes at singular endpoint" in rep.violations

    def test_reversed_interval(self):
        rep = validate_problem(problem(p1=1.0, p2=0.0))
        assert not rep and "p1 < p2" in rep.violations[0]

    def test_nonpositive_phase_part(self):
        ph = GeneralPhase(1.0, 1.0, Polynomial([-0.5, 1.0]))
        assert "nondegenerate phase part not positive" in validate_problem(problem(phase=ph)).violations

    def test_rho_below_one(self):
        ph = GeneralPhase(0.5, 1.0, constant(1.0))
        assert "rho1 below 1" in validate_problem(problem(phase=ph)).violations

    def test_inconsistent_phase_values(self):
        ph = GeneralPhase(1.0, 1.0, constant(1.0), 0.0, 2.0)
        assert "phase values inconsistent with phase derivative" in validate_problem(problem(phase=ph)).violations

    def test_collects_several(self):
        rep = validate_problem(problem(mu1=0.0, mu2=2.0))
        assert len(rep.violations) == 2


class TestAmplitude:
    def test_regular(self):
        pr = problem(mu1=1.0)
        assert [eval_amplitude(pr, p) for p in (0.0, 0.3, 1.0)] == [1.0, 1.0, 1.0]

    def test_power(self):
        assert eval_amplitude(problem(), 1.0 / 16.0) == pytest.approx(2.0, rel=1e-15)

    def test_two_sided(self):
        assert eval_amplitude(problem(0.5, 0.5), 0.5) == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("p", [0.0, -0.1, 1.1])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            eval_amplitude(problem(), p)

    @given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.01, 0.99))
    def test_mirror_keeps_modulus(self, mu1, mu2, x):
        reg = Polynomial([1.0, 0.5, -0.25])
        pr = problem(mu1, mu2, reg, QuadraticPhase(0.3, 1.0))
        mr = mirror_problem(pr)
        assert (mr.amplitude.mu1, mr.amplitude.mu2) == (mu2, mu1)
        assert abs(eval_amplitude(mr, -x)) == pytest.approx(abs(eval_amplitude(pr, x)), rel=1e-12)


class TestPhase:
    def test_quadratic_value(self):
        assert eval_phase(problem(phase=QuadraticPhase(1.0, 1.0)), 0.0) == 0.0

    def test_quadratic_slope(self):
        assert eval_phase(problem(phase=QuadraticPhase(1.0, 1.0)), 0.0, 1) == 2.0

    def test_general_reproduces_quadratic_slope(self):
        p0 = 1.0
        gp = GeneralPhase(1.0, 2.0, constant(2.0), -1.0, 0.0)
        pr = problem(phase=gp)
        for p in np.linspace(0.0, 1.0, 9):
            assert eval_phase(pr, p, 1) == pytest.approx(2.0 * (p0 - p), abs=1e-14)
            assert eval_phase(pr, p) == pytest.approx(-(p - p0) ** 2, abs=1e-13)

    def test_factorisation_consistency(self):
        g = Polynomial([1.0, 0.5, 0.25])
        gp = GeneralPhase(1.5, 2.5, g, 0.3)
        pr = problem(phase=gp)
        psi1, psi2 = pr.psi_endpoints()
        from phasekit.numerics import integrate_adaptive
        direct = integrate_adaptive(lambda p: pr.dpsi(p), 0.0, 1.0).value.real
        assert psi2 - psi1 == pytest.approx(direct, rel=1e-10)

    def test_as_general_stationary_end(self):
        gp = as_general(problem()).phase
        assert (gp.rho1, gp.rho2) == (1.0, 2.0)

    def test_as_general_rejects_interior_stationary_point(self):
        with pytest.raises(ValueError):
            as_general(problem(phase=QuadraticPhase(0.5, 0.0)))

    def test_order_check(self):
        with pytest.raises(ValueError):
            eval_phase(problem(), 0.5, 2)


class TestNorms:
    def test_polynomial_sup_uses_interior_extremum(self):
        f = Polynomial([0.0, 1.0, -1.0])  # p - p^2, max 1/4 at 1/2
        assert sup_norm(f, 0.0, 1.0) == 0.25

    def test_sobolev(self):
        f = Polynomial([2.0, -1.0])
        assert sobolev_norm(f, 1.0, 2.0) == 2.0

    def test_sampled_sup(self):
        f = PowerFn(-1.0, 1.0, 0.5)
        assert sup_norm(f, 0.0, 3.0) == pytest.approx(2.0)

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=6))
    def test_polynomial_sup_dominates_samples(self, coeffs):
        f = Polynomial(coeffs)
        grid = np.linspace(-1.0, 2.0, 301)
        assert sup_norm(f, -1.0, 2.0) >= np.max(np.abs(f(grid))) * (1 - 1e-12) - 1e-12
