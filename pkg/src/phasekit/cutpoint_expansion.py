"""
One-term expansion with a sharp cut at an interior point q.

Splitting the integral at q and integrating each piece by parts once along
the complex rays leaves two boundary terms at q.  Their leading parts cancel
exactly (both equal exp(i omega psi(q)) U(q) / (i omega psi'(q)) with opposite
signs), so what remains is

    I = A1 + A2 + R1^(1) + R1^(2) + R2^(1) + R2^(2),

    A_j    = exp(i omega psi(p_j)) k_j(0) theta_j omega^(-mu_j/rho_j)
    R1^(1) = -exp(i omega psi(p1)) int_0^{s_1} phi^(1)(s) k_1'(s) ds
    R1^(2) = +exp(i omega psi(p2)) int_0^{s_2} phi^(2)(s) k_2'(s) ds
    R2^(j) = -i ((mu_j - rho_j)/rho_j) omega^-1 exp(i omega psi(p_j)) k_j(s_j)
             * int over ray(s_j) of z^(mu_j - rho_j - 1) exp(+-i omega z^rho_j) dz

with phi^(j) the first ray primitive.  The bounds follow from
|phi^(j)(s)| <= s^(mu-1) Gamma(1/rho)/rho omega^(-1/rho) and from
|z| >= s_j on the ray.  None of the constants depends on a cut-off function,
which is what keeps them finite when the interval shrinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .core_model import OscillatoryProblem, as_general, validate_problem
from .erdelyi_expansion import (BOUND_SETTINGS, ExpansionTerm, RemainderBound, balance_for,
                                endpoint_data, theta_coefficient, uses_refined_bound)
from .numerics import (QuadratureSettings, gamma_real, integrate_adaptive,
                       integrate_endpoint_singular)
from .oracle import RaySpec, ray_integral, ray_quadrature
from .substitution import Diffeo, KFactor


@dataclass
class CutpointSide:
    side: int
    leading: ExpansionTerm
    bound_R1: RemainderBound
    bound_R2: RemainderBound
    s_end: float


@dataclass
class CutpointExpansion:
    q: float
    omega: float
    sides: Tuple[CutpointSide, CutpointSide]

    @property
    def terms(self):
        return [sd.leading for sd in self.sides]

    def approximation(self) -> complex:
        return sum(t.value(self.omega) for t in self.terms)

    def bound_value(self) -> float:
        return sum(sd.bound_R1.value(self.omega) + sd.bound_R2.value(self.omega)
                   for sd in self.sides)

    @property
    def leading_exponent(self) -> float:
        return max(t.omega_exponent for t in self.terms)


def _prepare(problem: OscillatoryProblem, q: Optional[float]):
    problem = as_general(problem)
    rep = validate_problem(problem)
    if not rep.ok:
        raise ValueError("invalid problem: " + "; ".join(rep.violations))
    if q is None:
        q = 0.5 * (problem.p1 + problem.p2)
    if not problem.p1 < q < problem.p2:
        raise ValueError("cut point must lie strictly inside the interval")
    return problem, float(q)


def leading_term(problem: OscillatoryProblem, k: KFactor, omega: float) -> ExpansionTerm:
    side = k.side
    rho, mu = endpoint_data(problem, side)
    psi_j = problem.psi_endpoints()[side - 1]
    coef = complex(np.exp(1j * omega * psi_j)) * k.value_at_zero * theta_coefficient(side, 0, rho, mu)
    return ExpansionTerm(coef, -mu / rho)


def r2_bound_constant(problem: OscillatoryProblem, q: float, side: int,
                      diffeo: Optional[Diffeo] = None) -> float:
    """((rho - mu)/rho) Gamma(1/rho) |U(q) / phi'(q)| phi(q)^(-rho)."""
    problem, q = _prepare(problem, q)
    rho, mu = endpoint_data(problem, side)
    if rho == mu:
        return 0.0
    if diffeo is None:
        diffeo = Diffeo(problem, side, q)
    s = diffeo.s_end
    return ((rho - mu) / rho * gamma_real(1.0 / rho)
            * abs(float(problem.amplitude_values(q)) / float(diffeo.derivative(q))) * s ** (-rho))


def expand_cutpoint(problem: OscillatoryProblem, q: Optional[float] = None,
                    omega: float = 1.0, gamma: float = 0.5,
                    settings: QuadratureSettings = BOUND_SETTINGS) -> CutpointExpansion:
    """Leading terms at both endpoints plus the four remainder bounds."""
    problem, q = _prepare(problem, q)
    sides = []
    for side in (1, 2):
        rho, mu = endpoint_data(problem, side)
        diffeo = Diffeo(problem, side, q)
        k = KFactor(problem, diffeo)
        lead = leading_term(problem, k, omega)

        def dk(s, k=k):
            return np.abs(k.derivative(s, 1))

        if uses_refined_bound(rho, mu):
            bc = balance_for(1, rho, gamma)
            res = integrate_endpoint_singular(dk, diffeo.s_end, 1.0 - gamma, settings)
            integral, err = float(res.value.real), float(res.error)
            r1 = RemainderBound(bc.L * (integral + err), -bc.delta, bc.L * err, True)
        else:
            res = integrate_endpoint_singular(dk, diffeo.s_end, mu, settings)
            integral, err = float(res.value.real), float(res.error)
            a = gamma_real(1.0 / rho) / rho
            r1 = RemainderBound(a * (integral + err), -1.0 / rho, a * err, False)
        r2 = RemainderBound(r2_bound_constant(problem, q, side, diffeo), -(1.0 + 1.0 / rho))
        sides.append(CutpointSide(side, lead, r1, r2, diffeo.s_end))
    return CutpointExpansion(q, float(omega), (sides[0], sides[1]))


def exact_remainders(problem: OscillatoryProblem, q: Optional[float], omega: float,
                     settings: QuadratureSettings = QuadratureSettings(1e-9, 1e-300, 20_000)
                     ) -> Dict[str, complex]:
    """The four remainder terms evaluated by quadrature (for verification).

    Keys: ``R1_1``, ``R1_2``, ``R2_1``, ``R2_2``.
    """
    problem, q = _prepare(problem, q)
    psi = problem.psi_endpoints()
    out = {}
    for side in (1, 2):
        rho, mu = endpoint_data(problem, side)
        diffeo = Diffeo(problem, side, q)
        k = KFactor(problem, diffeo)
        phase = complex(np.exp(1j * omega * psi[side - 1]))

        def integrand(u, k=k, rho=rho, mu=mu, side=side):
            # s = u^(1/mu) keeps the s^mu behaviour of phi near 0 smooth
            s = u ** (1.0 / mu)
            phis = np.array([ray_integral(RaySpec(side, rho, mu, 0, float(x), omega))
                             for x in s.ravel()]).reshape(s.shape)
            jac = u ** (1.0 / mu - 1.0) / mu if mu != 1.0 else 1.0
            return phis * k.derivative(s, 1) * jac

        val = integrate_adaptive(integrand, 0.0, diffeo.s_end ** mu, settings).value
        out[f"R1_{side}"] = (-phase if side == 1 else phase) * val
        if rho == mu:
            out[f"R2_{side}"] = 0j
        else:
            ray = ray_quadrature(side, rho, mu - rho, 0, diffeo.s_end, omega)
            out[f"R2_{side}"] = (-1j * (mu - rho) / rho / omega * phase
                                 * float(k(diffeo.s_end)) * ray)
    return out
