"""
N-term endpoint expansion with a smooth cut-off, and its remainder bound.

Each endpoint p_j contributes

    A_N^(j) = exp(i omega psi(p_j)) * sum_{n<N} theta(j, n) k_j^(n)(0) omega^(-(n+mu_j)/rho_j)

and the remainder of side j is bounded by

    Gamma(N/rho)/((N-1)! rho) * omega^(-N/rho) * int_0^{s_j} s^(mu-1) |d^N (nu_j k_j)| ds,

or, for a regular endpoint (mu_j = 1) of order rho_j >= 2, by the balanced
estimate L * omega^(-delta) * int_0^{s_j} s^(-gamma) |d^N (nu_j k_j)| ds.

The cut-off nu equals 1 near p1 and 0 near p2; nu_1 = nu o phi_1^(-1) and
nu_2 = (1 - nu) o phi_2^(-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .core_model import OscillatoryProblem, as_general, validate_problem
from .numerics import (DerivativeSettings, QuadratureSettings, gamma_real,
                       integrate_endpoint_singular, nth_derivative, solve_monotone_root)
from .substitution import Diffeo, KFactor

MAX_ORDER = 3
BOUND_SETTINGS = QuadratureSettings(rel_tol=1e-7, abs_tol=1e-300, max_subdivisions=20_000)


# ---------------------------------------------------------------------------
# Cut-off
# ---------------------------------------------------------------------------

def smooth_step(x, n: int = 0):
    """0 for x <= 0, 1 for x >= 1, C-infinity with flat junctions.

    ``n`` (0..3) selects a derivative, computed in closed form from the
    logistic function of z = 1/(1-x) - 1/x.
    """
    if not 0 <= n <= 3:
        raise ValueError("smooth_step derivatives are available up to order 3")
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xi = np.where(inside, x, 0.5)
    z = np.clip(1.0 / (1.0 - xi) - 1.0 / xi, -700.0, 700.0)
    sig = 1.0 / (1.0 + np.exp(-z))
    if n == 0:
        out = np.where(x >= 1, 1.0, np.where(inside, sig, 0.0))
        return out if out.ndim else float(out)
    comp = 1.0 / (1.0 + np.exp(z))  # 1 - sig without cancellation
    s1 = sig * comp
    s2 = s1 * (comp - sig)
    s3 = s2 * (comp - sig) - 2.0 * s1 * s1
    a, b = 1.0 / xi, 1.0 / (1.0 - xi)
    z1 = a * a + b * b
    z2 = 2.0 * (b ** 3 - a ** 3)
    z3 = 6.0 * (a ** 4 + b ** 4)
    with np.errstate(over="ignore", invalid="ignore"):
        if n == 1:
            val = s1 * z1
        elif n == 2:
            val = s2 * z1 * z1 + s1 * z2
        else:
            val = s3 * z1 ** 3 + 3.0 * s2 * z1 * z2 + s1 * z3
    # once the logistic factor underflows the derivative is zero, not 0 * inf
    val = np.where(inside & (s1 > 0), val, 0.0)
    return val if val.ndim else float(val)


@dataclass(frozen=True)
class CutoffFamily:
    """nu = 1 on [p1, p1+eta], 0 on [p2-eta, p2], smooth monotone in between."""

    p1: float
    p2: float
    eta: float

    def __post_init__(self):
        if not 0 < self.eta < (self.p2 - self.p1) / 2:
            raise ValueError("eta must lie in (0, (p2-p1)/2)")

    def __call__(self, p, n: int = 0):
        """nu or its n-th derivative (n <= 3)."""
        width = self.p2 - self.p1 - 2 * self.eta
        x = (np.asarray(p, dtype=float) - self.p1 - self.eta) / width
        if n == 0:
            return 1.0 - smooth_step(x)
        return -smooth_step(x, n) / width ** n


def default_eta(problem: OscillatoryProblem) -> float:
    return (problem.p2 - problem.p1) / 4.0


# ---------------------------------------------------------------------------
# Terms, bounds and constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionTerm:
    coefficient: complex
    omega_exponent: float

    def value(self, omega: float) -> complex:
        return self.coefficient * omega ** self.omega_exponent


@dataclass(frozen=True)
class RemainderBound:
    """constant * omega^omega_exponent.  ``quad_error`` is already included."""

    constant: float
    omega_exponent: float
    quad_error: float = 0.0
    refined: bool = False

    def value(self, omega: float) -> float:
        return self.constant * omega ** self.omega_exponent


@dataclass(frozen=True)
class BalanceConstants:
    a: float
    b: float
    c: float
    rho: float
    N: int
    gamma: float
    K_rho: float
    L: float
    delta: float

    def residual(self) -> float:
        return self.a * self.K_rho ** self.rho - self.b * self.K_rho - self.c


def theta_coefficient(j: int, n: int, rho: float, mu: float) -> complex:
    sigma = 1 if j == 1 else -1
    return (sigma / (math.factorial(n) * rho) * gamma_real((n + mu) / rho)
            * complex(np.exp(sigma * 1j * math.pi * (n + mu) / (2.0 * rho))))


def ray_estimate_constants(N: int, rho: float) -> Tuple[float, float, float]:
    """Constants (a, b, c) of the ray-function estimates for order N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    a = gamma_real(N / rho) / (math.factorial(N - 1) * rho)
    if N == 1:
        b = 1.0 / rho
        c = (rho - 1.0) * gamma_real(1.0 / rho) / rho ** 2
    else:
        b = gamma_real((N - 1) / rho) / (rho ** 2 * math.factorial(N - 2))
        c = (rho - 1.0) * gamma_real(N / rho) / (rho ** 2 * math.factorial(N - 1))
    return a, b, c


def balance(a: float, b: float, c: float, rho: float, N: int, gamma: float) -> BalanceConstants:
    """Positive root K of a K^rho = b K + c, then L = a K^gamma, delta = (gamma+N)/rho."""
    if not rho >= 2:
        raise ValueError("balance requires rho >= 2")
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if not (a > 0 and b >= 0 and c >= 0 and b + c > 0):
        raise ValueError("balance requires a > 0 and b, c >= 0 not both zero")
    hi = 1.0 + (b + c) / a
    lo = 1e-12 * hi
    K = solve_monotone_root(lambda k: a * k ** rho - b * k - c, lo, hi)
    return BalanceConstants(a, b, c, rho, N, gamma, K, a * K ** gamma, (gamma + N) / rho)


def balance_for(N: int, rho: float, gamma: float) -> BalanceConstants:
    a, b, c = ray_estimate_constants(N, rho)
    return balance(a, b, c, rho, N, gamma)


# ---------------------------------------------------------------------------
# Expansion
# ---------------------------------------------------------------------------

@dataclass
class SideExpansion:
    side: int
    terms: List[ExpansionTerm]
    bound: RemainderBound
    s_end: float


@dataclass
class Expansion:
    omega: float
    N: int
    eta: float
    sides: Tuple[SideExpansion, SideExpansion]

    @property
    def terms(self) -> List[ExpansionTerm]:
        return [t for sd in self.sides for t in sd.terms]

    def approximation(self) -> complex:
        return sum(t.value(self.omega) for t in self.terms)

    def bound_value(self) -> float:
        return sum(sd.bound.value(self.omega) for sd in self.sides)

    @property
    def leading_exponent(self) -> float:
        return max(t.omega_exponent for t in self.terms)


def endpoint_data(problem: OscillatoryProblem, side: int):
    ph = problem.phase
    rho = ph.rho1 if side == 1 else ph.rho2
    mu = problem.amplitude.mu1 if side == 1 else problem.amplitude.mu2
    return rho, mu


def uses_refined_bound(rho: float, mu: float) -> bool:
    return mu == 1.0 and rho >= 2.0


def expansion_terms(problem: OscillatoryProblem, side: int, N: int, omega: float,
                    k: Optional[KFactor] = None) -> List[ExpansionTerm]:
    """A_N for one side.  Derivatives of k at 0 come from a midpoint-cut map,
    so they do not depend on any cut-off parameter."""
    rho, mu = endpoint_data(problem, side)
    if k is None:
        mid = 0.5 * (problem.p1 + problem.p2)
        k = KFactor(problem, Diffeo(problem, side, mid))
    psi_j = problem.psi_endpoints()[side - 1]
    phase = complex(np.exp(1j * omega * psi_j))
    terms = []
    for n in range(N):
        dk = k.value_at_zero if n == 0 else float(np.real(k.derivative(0.0, n)))
        coef = phase * theta_coefficient(side, n, rho, mu) * dk
        terms.append(ExpansionTerm(coef, -(n + mu) / rho))
    return terms


def _weighted_abs_integral(fn, s_end: float, weight: float,
                           settings: QuadratureSettings) -> Tuple[float, float]:
    res = integrate_endpoint_singular(lambda s: np.abs(fn(s)), s_end, weight, settings)
    return float(res.value.real), float(res.error)


def expand(problem: OscillatoryProblem, N: int = 1, eta: Optional[float] = None,
           omega: float = 1.0, gamma: float = 0.5,
           settings: QuadratureSettings = BOUND_SETTINGS) -> Expansion:
    """Smooth cut-off expansion to N terms with remainder bounds on both sides."""
    if not 1 <= N <= MAX_ORDER:
        raise ValueError(f"N must lie in 1..{MAX_ORDER}")
    problem = as_general(problem)
    rep = validate_problem(problem)
    if not rep.ok:
        raise ValueError("invalid problem: " + "; ".join(rep.violations))
    if eta is None:
        eta = default_eta(problem)
    nu = CutoffFamily(problem.p1, problem.p2, eta)
    sides = []
    for side in (1, 2):
        rho, mu = endpoint_data(problem, side)
        terms = expansion_terms(problem, side, N, omega)
        q = problem.p2 - eta if side == 1 else problem.p1 + eta
        diffeo = Diffeo(problem, side, q)
        k = KFactor(problem, diffeo)
        if side == 1:
            def cut(s, d=diffeo):
                return nu(d.inverse(s))
        else:
            def cut(s, d=diffeo):
                return 1.0 - nu(d.inverse(s))

        def product(s, k=k, cut=cut):
            return cut(s) * k(s)

        def dN(s, product=product, s_end=diffeo.s_end):
            return nth_derivative(product, s, N, domain=(0.0, s_end))

        if uses_refined_bound(rho, mu):
            bc = balance_for(N, rho, gamma)
            integral, err = _weighted_abs_integral(dN, diffeo.s_end, 1.0 - gamma, settings)
            bound = RemainderBound(bc.L * (integral + err), -bc.delta, bc.L * err, True)
        else:
            a = gamma_real(N / rho) / (math.factorial(N - 1) * rho)
            integral, err = _weighted_abs_integral(dN, diffeo.s_end, mu, settings)
            bound = RemainderBound(a * (integral + err), -N / rho, a * err, False)
        sides.append(SideExpansion(side, terms, bound, diffeo.s_end))
    return Expansion(float(omega), N, float(eta), (sides[0], sides[1]))
