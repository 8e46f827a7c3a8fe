"""
Changes of variables that straighten the phase near each endpoint.

Side 1 maps p in [p1, q] to s = (psi(p) - psi(p1))^(1/rho1); side 2 maps
p in [q, p2] to s = (psi(p2) - psi(p))^(1/rho2).  With h = |p - p_j| both are
written as

    s = h * A(h)^(1/rho),

where A(h) is the weighted average of psi' returned by
``OscillatoryProblem.phase_average``.  A is smooth and positive up to h = 0,
so the map, its derivative and the regular factor

    k(s) = U(p) s^(1-mu) dp/ds

are evaluated in closed form everywhere, including s = 0, without any
0 * infinity cancellation.  On side 1 this reads k = F(p) A^((1-mu)/rho) / s'(p)
with F the amplitude stripped of its side-1 power.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core_model import OscillatoryProblem, validate_problem
from .numerics import DerivativeSettings, gauss_legendre, nth_derivative


class RootBracketFailure(ValueError):
    """The phase is not monotone on the requested side."""


_TABLE = 65
_NEWTON_STEPS = 60


class Diffeo:
    """Endpoint-straightening map for one side of a problem."""

    def __init__(self, problem: OscillatoryProblem, side: int, q: float):
        if side not in (1, 2):
            raise ValueError("side must be 1 or 2")
        if not problem.p1 < q < problem.p2:
            raise ValueError("cut point must lie strictly inside the interval")
        ph = problem._general()
        self.problem = problem
        self.side = side
        self.q = float(q)
        self.rho = ph.rho1 if side == 1 else ph.rho2
        self.endpoint = problem.p1 if side == 1 else problem.p2
        self.h_max = abs(self.q - self.endpoint)
        self.domain = (problem.p1, self.q) if side == 1 else (self.q, problem.p2)
        # bracket table for the inverse
        self._h_grid = np.linspace(0.0, self.h_max, _TABLE)
        self._s_grid = self._s_of_h(self._h_grid)
        if not np.all(np.diff(self._s_grid) > 0):
            raise RootBracketFailure("phase is not monotone on this side")
        self.s_end = float(self._s_grid[-1])

    # -- helpers in the h variable --------------------------------------------
    def average(self, h):
        return self.problem.phase_average(self.side, h)

    def _s_of_h(self, h):
        return h * self.average(h) ** (1.0 / self.rho)

    def _p(self, h):
        return self.endpoint + h if self.side == 1 else self.endpoint - h

    def _slope(self, h, avg=None):
        """|ds/dp| at distance h from the endpoint."""
        if avg is None:
            avg = self.average(h)
        return self.problem.side_factor(self.side, self._p(h)) * avg ** (1.0 / self.rho - 1.0) / self.rho

    def h_of_s(self, s):
        """Invert s = h A(h)^(1/rho) by safeguarded Newton on a cached bracket."""
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()
        if np.any(flat < -1e-15 * self.s_end) or np.any(flat > self.s_end * (1 + 1e-12)):
            raise ValueError("s outside [0, s_end]")
        flat = np.clip(flat, 0.0, self.s_end)
        idx = np.clip(np.searchsorted(self._s_grid, flat, side="right") - 1, 0, _TABLE - 2)
        lo, hi = self._h_grid[idx], self._h_grid[idx + 1]
        slo, shi = self._s_grid[idx], self._s_grid[idx + 1]
        h = lo + (hi - lo) * (flat - slo) / (shi - slo)
        for _ in range(_NEWTON_STEPS):
            avg = self.average(h)
            resid = h * avg ** (1.0 / self.rho) - flat
            lo = np.where(resid < 0, h, lo)
            hi = np.where(resid > 0, h, hi)
            step = resid / self._slope(h, avg)
            new = h - step
            outside = (new <= lo) | (new >= hi)
            new = np.where(outside, 0.5 * (lo + hi), new)
            done = np.abs(new - h) <= 4e-16 * np.maximum(self.h_max, 1e-300)
            h = new
            if np.all(done):
                break
        h = np.where(flat == 0.0, 0.0, h)
        return h.reshape(s.shape) if s.ndim else float(h[0])

    # -- public map ---------------------------------------------------------
    def forward(self, p):
        return self._s_of_h(np.abs(np.asarray(p, dtype=float) - self.endpoint))

    def derivative(self, p):
        """ds/dp: positive on side 1, negative on side 2."""
        h = np.abs(np.asarray(p, dtype=float) - self.endpoint)
        sl = self._slope(h)
        return sl if self.side == 1 else -sl

    def inverse(self, s):
        return self._p(self.h_of_s(s))

    def inverse_derivative(self, s):
        return 1.0 / self.derivative(self.inverse(s))

    def slope_at_endpoint(self) -> float:
        """|ds/dp| at the endpoint: (F(p_j)/rho)^(1/rho)."""
        return float(self._slope(0.0))


def build_diffeo(problem: OscillatoryProblem, side: int, q: float) -> Diffeo:
    rep = validate_problem(problem)
    if not rep.ok:
        raise ValueError("invalid problem: " + "; ".join(rep.violations))
    return Diffeo(problem, side, q)


class KFactor:
    """Regular factor k(s) = U(p(s)) s^(1-mu) p'(s) on [0, s_end]."""

    def __init__(self, problem: OscillatoryProblem, diffeo: Diffeo,
                 derivative_settings: DerivativeSettings = DerivativeSettings()):
        self.problem = problem
        self.diffeo = diffeo
        self.side = diffeo.side
        self.mu = problem.amplitude.mu1 if self.side == 1 else problem.amplitude.mu2
        self.s_end = diffeo.s_end
        self.derivative_settings = derivative_settings
        self.value_at_zero = float(self(0.0))

    def __call__(self, s):
        d = self.diffeo
        h = d.h_of_s(s)
        avg = d.average(h)
        p = d._p(h)
        slope = d._slope(h, avg)
        if self.side == 2:
            slope = -slope
        amp = self.problem.amplitude_factor(self.side, p)
        return amp * avg ** ((1.0 - self.mu) / d.rho) / slope

    def averaged(self, s, nodes: int = 16):
        """Same quantity from the mean of p'(s y) over y in [0, 1].

        Independent route used as a cross-check:
        k(s) = (mean |p'|)^(mu-1) F(p(s)) p'(s).
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        x, w = gauss_legendre(nodes)
        y = 0.5 * (x + 1.0)
        inner = np.abs(self.diffeo.inverse_derivative(s[:, None] * y[None, :])) @ (0.5 * w)
        p = self.diffeo.inverse(s)
        out = inner ** (self.mu - 1.0) * self.problem.amplitude_factor(self.side, p) \
            * self.diffeo.inverse_derivative(s)
        return out

    def derivative(self, s, n: int):
        if n == 0:
            return self(s)
        return nth_derivative(self, s, n, self.derivative_settings, domain=(0.0, self.s_end))


def build_k(problem: OscillatoryProblem, diffeo: Diffeo,
            derivative_settings: Optional[DerivativeSettings] = None) -> KFactor:
    return KFactor(problem, diffeo, derivative_settings or DerivativeSettings())


def k_derivative(kf: KFactor, s, n: int):
    """n-th derivative of k at s; one-sided stencils at the ends of [0, s_end]."""
    if n > 4:
        raise ValueError("derivative order above 4 is not supported")
    return kf.derivative(s, n)
