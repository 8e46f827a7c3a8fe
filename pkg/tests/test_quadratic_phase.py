import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from phasekit.core_model import (AmplitudeSpec, GeneralPhase, OscillatoryProblem, Polynomial,
                                 QuadraticPhase, constant)
from phasekit.cutpoint_expansion import expand_cutpoint
from phasekit.numerics import gamma_real
from phasekit.oracle import oscillatory_integral
from phasekit.quadratic_phase import (CASE_ABOVE, CASE_BELOW, CASE_HALF, InvalidCaseError,
                                      ThresholdError, curve_problem, curve_regime, default_delta,
                                      expand_full, expand_half, exponent_inequalities, half_problem)

from conftest import interior_quadratic

SQRT_PI = math.sqrt(math.pi)


class TestHalf:
    @pytest.mark.parametrize("mu", [0.25, 0.5, 0.75])
    def test_side1_exponents(self, mu):
        hx = expand_half(interior_quadratic(mu, 0.5), 1, 100.0)
        g, d = 2 * hx_delta(mu) - 1, hx_delta(mu)
        got = [(e.alpha, e.beta) for e in hx.ledger]
        want = [(2 - mu, 1), (1 - mu, 1), (4 - mu, 2), (1 + g - mu, d), (g - mu, d), (3 - mu, 1.5)]
        assert got == pytest.approx(want, abs=1e-15)

    @pytest.mark.parametrize("mu", [0.25, 0.75])
    def test_side1_third_constant(self, mu):
        hx = expand_half(interior_quadratic(mu, 0.5), 1, 100.0)
        assert hx.ledger[2].constant == pytest.approx((1 - mu) * 2 ** (3 - mu) / 3 * 1.0, rel=1e-15)

    def test_regular_amplitude(self):
        pr = interior_quadratic(1.0, 0.5)
        hx = expand_half(pr, 1, 100.0)
        assert hx.ledger[2].constant == 0.0
        k = hx.terms[0]
        assert abs(k.coefficient) == pytest.approx(gamma_real(1.0) / 2 * 1.0, rel=1e-15)

    def test_side2_exponents(self):
        mu = 0.75
        hx = expand_half(interior_quadratic(mu, 0.5), 2, 100.0)
        d = hx_delta(mu)
        assert [(e.alpha, e.beta) for e in hx.ledger] == [(2 - mu, d), (1 - mu, d)]

    @pytest.mark.parametrize("mu", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("side", [1, 2])
    def test_terms_match_general_cutpoint(self, mu, side):
        pr = interior_quadratic(mu, 0.375)
        omega = 250.0
        hx = expand_half(pr, side, omega)
        cp = expand_cutpoint(half_problem(pr, side), None, omega)
        ours = sorted((t.value(hx.gap, omega) for t in hx.terms), key=abs)
        theirs = sorted((t.value(omega) for t in cp.terms), key=abs)
        if side == 2:
            # the reflected half's regular end -p2 contributes zero since u(p2) = 0
            assert abs(theirs[0]) <= 1e-15
            theirs = theirs[1:]
        for a, b in zip(ours, theirs):
            assert abs(a - b) <= 1e-12 * abs(a)

    def test_side2_needs_root(self):
        with pytest.raises(InvalidCaseError):
            expand_half(interior_quadratic(0.75, 0.5, coeffs=(1.0,)), 2, 10.0)

    def test_rejects_general_phase(self):
        pr = OscillatoryProblem(1.0, 2.0, AmplitudeSpec(0.5, 1.0, constant(1.0)),
                                GeneralPhase(1.0, 1.0, constant(1.0)))
        with pytest.raises(InvalidCaseError):
            expand_half(pr, 1, 10.0)

    def test_rejects_stationary_point_outside(self):
        with pytest.raises(InvalidCaseError):
            expand_full(interior_quadratic(0.5, 1.5), 10.0)


def hx_delta(mu):
    return default_delta(mu)


class TestFull:
    def test_above_half(self):
        mu = 0.75
        ex = expand_full(interior_quadratic(mu, 0.5), 100.0)
        assert ex.case == CASE_ABOVE and len(ex.ledger) == 9
        lead = ex.leading[0]
        assert (lead.label, lead.gap_exponent, lead.omega_exponent) == ("stationary", -0.25, -0.5)
        first = ex.ledger[0]
        assert first.constant == pytest.approx(gamma_real(mu) / 2 ** mu * 1.0, rel=1e-15)
        assert (first.alpha, first.beta) == (mu, mu)

    def test_below_half(self):
        mu = 0.25
        ex = expand_full(interior_quadratic(mu, 0.5), 100.0)
        assert ex.case == CASE_BELOW and len(ex.ledger) == 9
        lead = ex.leading[0]
        assert (lead.label, lead.gap_exponent, lead.omega_exponent) == ("singular", -0.25, -0.25)
        first = ex.ledger[0]
        assert first.constant == pytest.approx(SQRT_PI, rel=1e-15)
        assert (first.alpha, first.beta) == (1 - mu, 0.5)

    def test_half(self):
        ex = expand_full(interior_quadratic(0.5, 0.5), 100.0)
        assert ex.case == CASE_HALF and len(ex.ledger) == 8
        assert {t.label for t in ex.leading} == {"stationary", "singular"}

    @pytest.mark.parametrize("mu", [0.25, 0.5, 0.75])
    def test_decay_ordering_and_sign(self, mu):
        ex = expand_full(interior_quadratic(mu, 0.5), 100.0)
        assert all(e.beta > ex.leading_decay for e in ex.ledger)
        # delta >= (mu+1)/2 keeps every gap exponent nonnegative
        assert all(e.alpha >= 0 for e in ex.ledger)

    @pytest.mark.parametrize("mu", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("frac", [0.25, 0.75])
    def test_ledger_bounds_oracle(self, mu, frac):
        pr = interior_quadratic(mu, frac)
        for omega in (1e2, 1e3):
            ex = expand_full(pr, omega)
            err = abs(oscillatory_integral(pr, omega).value - ex.approximation())
            assert err <= ex.bound_value() * (1 + 1e-6)

    @pytest.mark.parametrize("delta", [0.5, 1.0, 0.2])
    def test_invalid_delta(self, delta):
        with pytest.raises(ValueError):
            expand_full(interior_quadratic(0.25, 0.5), 10.0, delta)


class TestCurve:
    @pytest.mark.parametrize("mu,eps,lead", [(0.75, 0.1, -0.475), (0.25, 0.1, -0.225), (0.5, 0.2, -0.4)])
    def test_leading_exponent(self, mu, eps, lead):
        cr = curve_regime(interior_quadratic(mu, 0.5), eps, 1e4)
        assert cr.leading_exponent == pytest.approx(lead, abs=1e-15)
        assert cr.certificate
        assert cr.p0 == pytest.approx(1.0 + 1e4 ** -eps, rel=1e-15)

    def test_threshold(self):
        # (p2 - p1)^(-1/eps) = 2^10 for an interval of width 1/2
        pr = OscillatoryProblem(1.0, 1.5, AmplitudeSpec(0.5, 1.0, Polynomial([3.0, -2.0])), QuadraticPhase(1.2))
        with pytest.raises(ThresholdError):
            curve_problem(pr, 0.1, 1000.0)
        assert curve_problem(pr, 0.1, 1100.0).phase.p0 < 1.5

    @pytest.mark.parametrize("eps", [0.0, 0.5, 0.6])
    def test_epsilon_range(self, eps):
        with pytest.raises(ValueError, match="epsilon must lie in"):
            curve_problem(interior_quadratic(0.5, 0.5), eps, 1e3)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 0.99), st.floats(0.01, 0.45))
    def test_dominance_with_default_delta(self, mu, eps):
        rows = exponent_inequalities(mu, eps)
        assert len(rows) == (8 if mu == 0.5 else 9)
        assert all(ok for *_, ok in rows)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.01, 0.99), st.floats(0.01, 0.45), st.floats(0.0, 1.0))
    def test_dominance_for_admissible_delta(self, mu, eps, t):
        lo = max(mu, 0.5 + eps, 0.5 * (mu + 1))
        delta = lo + t * (0.999 - lo)
        assume(lo < delta < 1.0)
        assert all(ok for *_, ok in exponent_inequalities(mu, eps, delta))
