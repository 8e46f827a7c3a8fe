"""
Ground-truth evaluation by direct quadrature.

* :func:`oscillatory_integral` evaluates the problem integral itself.  The
  interval is split at its midpoint, each singular endpoint is removed by
  a power substitution, and panels are pre-split so that the phase advances by
  at most 8*pi across any panel before adaptive refinement starts.
* :func:`ray_integral` evaluates the complex-ray primitives

      phi_{n+1}(s) = ((-1)^(n+1) / n!) * integral over the ray
                     z = s + t exp(+-i pi / (2 rho)), t >= 0,
                     of (z - s)^n z^(mu-1) exp(+-i omega z^rho) dz

  along which the exponential decays like exp(-omega t^rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core_model import OscillatoryProblem, QuadraticPhase, validate_problem
from .numerics import (EPS, QuadResult, QuadratureSettings, gamma_real, integrate_adaptive,
                       integrate_panels)

ORACLE_SETTINGS = QuadratureSettings(rel_tol=1e-10, abs_tol=1e-15, max_subdivisions=400_000)
RAY_SETTINGS = QuadratureSettings(rel_tol=1e-12, abs_tol=1e-300, max_subdivisions=20_000)

_PHASE_STEP = 8.0 * math.pi
TAIL_EXPONENT = 45.0


# ---------------------------------------------------------------------------
# Problem integral
# ---------------------------------------------------------------------------

def oscillatory_integral(problem: OscillatoryProblem, omega: float,
                         settings: QuadratureSettings = ORACLE_SETTINGS,
                         breakpoints: Sequence[float] = (),
                         check: bool = True) -> QuadResult:
    """Integral of U exp(i omega psi) over [p1, p2] by brute-force quadrature.

    The variable ``t`` runs over ``[0, VL + VR]``.  On ``[0, VL]`` it is
    ``v = (p - p1)^mu1``; on ``[VL, VL + VR]`` it is ``VL + VR - (p2 - p)^mu2``.
    Both maps absorb the endpoint singularities exactly.
    """
    if check:
        rep = validate_problem(problem)
        if not rep.ok:
            raise ValueError("invalid problem: " + "; ".join(rep.violations))
    omega = float(omega)
    p1, p2 = problem.p1, problem.p2
    mu1, mu2 = problem.amplitude.mu1, problem.amplitude.mu2
    mid = 0.5 * (p1 + p2)
    VL = (mid - p1) ** mu1
    VR = (p2 - mid) ** mu2
    total = VL + VR

    def p_of_t(t):
        t = np.asarray(t, dtype=float)
        left = t <= VL
        p = np.empty_like(t)
        p[left] = p1 + t[left] ** (1.0 / mu1)
        p[~left] = p2 - np.maximum(total - t[~left], 0.0) ** (1.0 / mu2)
        return p, left

    # the phase is taken relative to psi(p1); the constant factor goes outside
    ref = float(problem.psi_endpoints()[0])

    def integrand(t):
        p, left = p_of_t(t)
        out = np.empty(t.shape, dtype=complex)
        pl, pr = p[left], p[~left]
        out[left] = problem.amplitude_factor(1, pl) / mu1
        out[~left] = problem.amplitude_factor(2, pr) / mu2
        return out * np.exp(1j * omega * (problem.psi(p) - ref))

    def t_of_p(p):
        return (p - p1) ** mu1 if p <= mid else total - (p2 - p) ** mu2

    cuts = [mid]
    ph = problem.phase
    if isinstance(ph, QuadraticPhase) and p1 < ph.p0 < p2:
        cuts.append(ph.p0)
    cuts += [b for b in breakpoints if p1 < b < p2]
    t_cuts = sorted({t_of_p(c) for c in cuts} | {0.0, total})
    edges = np.unique(np.concatenate([
        np.linspace(t_cuts[i], t_cuts[i + 1], 17) for i in range(len(t_cuts) - 1)]))
    edges = _resolve_phase(edges, lambda t: omega * problem.psi(p_of_t(t)[0]))
    # rounding in omega*psi(p) and in p itself limits the attainable accuracy
    pe = p_of_t(edges)[0]
    noise = 4.0 * EPS * omega * float(np.max(np.abs(problem.psi(pe) - ref))
                                      + np.max(np.abs(pe)) * np.max(np.abs(problem.dpsi(pe))))
    res = integrate_panels(integrand, edges[:-1], edges[1:], settings, noise)
    return QuadResult(res.value * complex(np.exp(1j * omega * ref)), res.error, res.panels)


def _resolve_phase(edges: np.ndarray, phase, max_rounds: int = 40) -> np.ndarray:
    for _ in range(max_rounds):
        vals = phase(edges)
        jumps = np.abs(np.diff(vals))
        pieces = np.ceil(jumps / _PHASE_STEP).astype(int)
        if np.all(pieces <= 1):
            return edges
        new = [edges[:1]]
        for i, k in enumerate(pieces):
            k = max(k, 1)
            new.append(np.linspace(edges[i], edges[i + 1], k + 1)[1:])
        edges = np.concatenate(new)
    return edges


# ---------------------------------------------------------------------------
# Ray primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RaySpec:
    """Ray z = s + t exp(sigma i pi / (2 rho)) with sigma = +1 (j = 1) or -1 (j = 2).

    ``n`` selects phi_{n+1}, whose integrand carries (z - s)^n.
    """

    j: int
    rho: float
    mu: float
    n: int
    s: float
    omega: float

    def __post_init__(self):
        if self.j not in (1, 2):
            raise ValueError("ray side j must be 1 or 2")
        if not self.rho >= 1:
            raise ValueError("rho must be at least 1")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.s >= 0:
            raise ValueError("s must be nonnegative")
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    @property
    def sigma(self) -> int:
        return 1 if self.j == 1 else -1


def _power(z: np.ndarray, rho: float) -> np.ndarray:
    if rho == int(rho) and rho <= 8:
        out = np.ones_like(z)
        for _ in range(int(rho)):
            out = out * z
        return out
    return np.exp(rho * np.log(z))


def ray_quadrature(j: int, rho: float, power: float, n: int, s: float, omega: float,
                   settings: QuadratureSettings = RAY_SETTINGS) -> complex:
    """Integral of (z - s)^n z^(power-1) exp(sigma i omega z^rho) dz along the ray.

    ``power`` may be any real number when ``s > 0``; ``n + power > 0`` is
    needed at ``s = 0``.  The ray is truncated at T = (45/omega)^(1/rho).
    """
    sigma = 1 if j == 1 else -1
    direction = np.exp(1j * sigma * math.pi / (2.0 * rho))
    T = (TAIL_EXPONENT / omega) ** (1.0 / rho)
    s = float(s)

    if s == 0.0:
        order = n + power
        if order <= 0:
            raise ValueError("ray integral diverges at s = 0")
        # t = u^(1/order) turns t^(order-1) dt into du / order
        lead = direction ** order / order

        def f(u):
            t = u ** (1.0 / order)
            return lead * np.exp(sigma * 1j * omega * _power(t * direction, rho))

        res = integrate_adaptive(f, 0.0, T ** order, settings)
        return res.value

    kappa = power if 0 < power < 1 else 1.0
    inv = 1.0 / kappa

    def g(u):
        t = u ** inv
        z = s + t * direction
        val = z ** (power - 1.0) * np.exp(sigma * 1j * omega * _power(z, rho))
        if n:
            val = val * (t * direction) ** n
        return val * direction * inv * u ** (inv - 1.0) if kappa != 1.0 else val * direction

    bps = [min(s, T) ** kappa] if s < T else None
    res = integrate_adaptive(g, 0.0, T ** kappa, settings, breakpoints=bps)
    return res.value


def ray_integral(ray: RaySpec, settings: QuadratureSettings = RAY_SETTINGS) -> complex:
    """phi_{n+1} for side j at (s, omega) by quadrature along the ray."""
    raw = ray_quadrature(ray.j, ray.rho, ray.mu, ray.n, ray.s, ray.omega, settings)
    return (-1) ** (ray.n + 1) / math.factorial(ray.n) * raw


def ray_integrals(j: int, rho: float, mu: float, n: int, s_values: Iterable[float],
                  omega: float, settings: QuadratureSettings = RAY_SETTINGS) -> np.ndarray:
    """:func:`ray_integral` over many values of ``s``."""
    return np.array([ray_integral(RaySpec(j, rho, mu, n, float(s), omega), settings)
                     for s in s_values])


def phi_zero_closed_form(j: int, rho: float, mu: float, n: int, omega: float) -> complex:
    """phi_{n+1} at s = 0 in closed form."""
    sigma = 1 if j == 1 else -1
    order = (n + mu) / rho
    return ((-1) ** (n + 1) / math.factorial(n)
            * np.exp(sigma * 1j * math.pi * (n + mu) / (2.0 * rho))
            * gamma_real(order) / rho * omega ** (-order))


def ray_decay_check(rho: float, s: float, omega: float,
                        t_samples: Iterable[float]) -> bool:
    """True iff |exp(sigma i omega z^rho)| <= exp(-omega t^rho)(1 + 1e-12)
    for z on both rays through ``s`` at every sampled ``t``.

    Compared on the logarithmic scale so that large exponents do not
    underflow.
    """
    t = np.asarray(list(t_samples), dtype=float)
    slack = math.log1p(1e-12)
    for sigma in (1, -1):
        z = s + t * np.exp(1j * sigma * math.pi / (2.0 * rho))
        log_mod = -sigma * omega * _power(z, rho).imag
        if not np.all(log_mod <= -omega * t ** rho + slack):
            return False
    return True
