"""
Problem model for integrals of the form

    I(omega) = integral over [p1, p2] of U(p) exp(i omega psi(p)) dp,

with amplitude U(p) = (p - p1)^(mu1 - 1) (p2 - p)^(mu2 - 1) u(p) and either

* a general phase with psi'(p) = (p - p1)^(rho1 - 1) (p2 - p)^(rho2 - 1) g(p),
  g > 0 (the endpoints are stationary of real order), or
* a quadratic phase psi(p) = -(p - p0)^2 + c.

``u`` is the regular part of the amplitude and ``g`` the non-degenerate part
of the phase.  Both are :class:`SmoothFn` instances that return exact or
closed-form derivatives.

Complex quantities are plain Python ``complex`` values throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .numerics import jacobi_unit

ArrayLike = Union[float, np.ndarray]


class DomainError(ValueError):
    """Evaluation requested at a point where the quantity is singular."""


# ---------------------------------------------------------------------------
# Smooth functions with derivatives
# ---------------------------------------------------------------------------

class SmoothFn:
    """Real function of one variable that can report its derivatives.

    Subclasses implement ``_eval(p, n)`` for ``n <= max_order``.  Calls are
    vectorised over ``p``.
    """

    max_order: int = 0

    def __call__(self, p: ArrayLike, n: int = 0):
        if n < 0 or n > self.max_order:
            raise ValueError(f"derivative order {n} not supported (max {self.max_order})")
        return self._eval(np.asarray(p, dtype=float), n)

    def _eval(self, p: np.ndarray, n: int):  # pragma: no cover - abstract
        raise NotImplementedError

    def __mul__(self, other: "SmoothFn") -> "SmoothFn":
        if isinstance(other, (int, float)):
            return Scaled(self, float(other))
        return Product(self, other)

    __rmul__ = __mul__

    def compose_affine(self, a: float, b: float) -> "SmoothFn":
        """The function ``p -> self(a p + b)``."""
        return Affine(self, a, b)


class Polynomial(SmoothFn):
    """Polynomial with ascending coefficients; exact derivatives of every order."""

    max_order = 10 ** 6

    def __init__(self, coefficients: Sequence[float]):
        coeffs = [float(c) for c in coefficients] or [0.0]
        self.coefficients = tuple(coeffs)
        self._polys = [np.polynomial.Polynomial(coeffs)]

    def _deriv(self, n: int):
        while len(self._polys) <= n:
            self._polys.append(self._polys[-1].deriv())
        return self._polys[n]

    def _eval(self, p, n):
        out = self._deriv(n)(p)
        return out if np.ndim(out) else float(out)

    def __repr__(self):
        return f"Polynomial({list(self.coefficients)})"


def constant(value: float) -> Polynomial:
    return Polynomial([value])


class FunctionFn(SmoothFn):
    """Wraps an evaluator ``fn(p, n)``."""

    def __init__(self, fn: Callable[[np.ndarray, int], np.ndarray], max_order: int):
        self._fn = fn
        self.max_order = int(max_order)

    def _eval(self, p, n):
        return self._fn(p, n)


class PowerFn(SmoothFn):
    """``(sign * (p - base))^exponent`` for ``sign * (p - base) > 0``."""

    max_order = 10 ** 6

    def __init__(self, base: float, sign: float, exponent: float):
        self.base, self.sign, self.exponent = float(base), float(sign), float(exponent)

    def _eval(self, p, n):
        coef = 1.0
        for k in range(n):
            coef *= self.exponent - k
        if coef == 0.0:
            return np.zeros_like(p) if np.ndim(p) else 0.0
        x = self.sign * (p - self.base)
        return coef * self.sign ** n * x ** (self.exponent - n)


class Product(SmoothFn):
    def __init__(self, f: SmoothFn, g: SmoothFn):
        self.f, self.g = f, g
        self.max_order = min(f.max_order, g.max_order)

    def _eval(self, p, n):
        return sum(math.comb(n, k) * self.f(p, k) * self.g(p, n - k) for k in range(n + 1))


class Scaled(SmoothFn):
    def __init__(self, f: SmoothFn, c: float):
        self.f, self.c = f, float(c)
        self.max_order = f.max_order

    def _eval(self, p, n):
        return self.c * self.f(p, n)


class Affine(SmoothFn):
    def __init__(self, f: SmoothFn, a: float, b: float):
        self.f, self.a, self.b = f, float(a), float(b)
        self.max_order = f.max_order

    def _eval(self, p, n):
        return self.a ** n * self.f(self.a * p + self.b, n)


# ---------------------------------------------------------------------------
# Amplitude and phase descriptions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeSpec:
    mu1: float
    mu2: float
    regular: SmoothFn


@dataclass(frozen=True)
class GeneralPhase:
    """psi'(p) = (p - p1)^(rho1 - 1) (p2 - p)^(rho2 - 1) g(p) with g > 0.

    ``psi_p1`` anchors the phase.  ``psi_p2`` is optional; when given it must
    agree with the integral of psi' (checked by :func:`validate_problem`).
    """

    rho1: float
    rho2: float
    nondegenerate: SmoothFn
    psi_p1: float = 0.0
    psi_p2: Optional[float] = None


@dataclass(frozen=True)
class QuadraticPhase:
    """psi(p) = -(p - p0)^2 + c."""

    p0: float
    c: float = 0.0


PhaseSpec = Union[GeneralPhase, QuadraticPhase]

_JACOBI_NODES = 32


@dataclass(frozen=True)
class OscillatoryProblem:
    p1: float
    p2: float
    amplitude: AmplitudeSpec
    phase: PhaseSpec

    @property
    def length(self) -> float:
        return self.p2 - self.p1

    # -- amplitude ---------------------------------------------------------
    def amplitude_factor(self, side: int, p: ArrayLike):
        """The amplitude with side ``side``'s singular power removed.

        Side 1: ``(p2 - p)^(mu2 - 1) u(p)``; side 2: ``(p - p1)^(mu1 - 1) u(p)``.
        """
        a = self.amplitude
        p = np.asarray(p, dtype=float)
        if side == 1:
            return (self.p2 - p) ** (a.mu2 - 1.0) * a.regular(p) if a.mu2 != 1 else a.regular(p)
        return (p - self.p1) ** (a.mu1 - 1.0) * a.regular(p) if a.mu1 != 1 else a.regular(p)

    def amplitude_values(self, p: ArrayLike):
        a = self.amplitude
        p = np.asarray(p, dtype=float)
        out = a.regular(p)
        if a.mu1 != 1.0:
            out = out * (p - self.p1) ** (a.mu1 - 1.0)
        if a.mu2 != 1.0:
            out = out * (self.p2 - p) ** (a.mu2 - 1.0)
        return out

    # -- phase ---------------------------------------------------------------
    def side_factor(self, side: int, p: ArrayLike):
        """Non-degenerate phase part times the opposite endpoint's power.

        Side 1: ``(p2 - p)^(rho2 - 1) g(p)``; side 2: ``(p - p1)^(rho1 - 1) g(p)``.
        """
        ph = self._general()
        p = np.asarray(p, dtype=float)
        g = ph.nondegenerate(p)
        if side == 1:
            return g if ph.rho2 == 1 else (self.p2 - p) ** (ph.rho2 - 1.0) * g
        return g if ph.rho1 == 1 else (p - self.p1) ** (ph.rho1 - 1.0) * g

    def phase_average(self, side: int, h: ArrayLike):
        """Weighted mean of the side factor over the segment of length ``h``.

        Side 1: ``integral_0^1 y^(rho1-1) F1(p1 + h y) dy``, so that
        ``psi(p1 + h) - psi(p1) = h^rho1 * average``.  Side 2 is the mirror
        image at ``p2``.  Evaluated by Gauss-Jacobi quadrature.
        """
        ph = self._general()
        rho = ph.rho1 if side == 1 else ph.rho2
        y, w = jacobi_unit(_JACOBI_NODES, rho - 1.0)
        h = np.asarray(h, dtype=float)
        if side == 1:
            pts = self.p1 + h[..., None] * y
        else:
            pts = self.p2 - h[..., None] * y
        return self.side_factor(side, pts) @ w

    def phase_increment(self) -> float:
        """psi(p2) - psi(p1) from psi' by Gauss-Jacobi quadrature."""
        ph = self._general()
        y, w = jacobi_unit(_JACOBI_NODES, ph.rho1 - 1.0, ph.rho2 - 1.0)
        d = self.length
        return d ** (ph.rho1 + ph.rho2 - 1.0) * float(ph.nondegenerate(self.p1 + d * y) @ w)

    def psi_endpoints(self):
        ph = self.phase
        if isinstance(ph, QuadraticPhase):
            return (-(self.p1 - ph.p0) ** 2 + ph.c, -(self.p2 - ph.p0) ** 2 + ph.c)
        psi2 = ph.psi_p2 if ph.psi_p2 is not None else ph.psi_p1 + self.phase_increment()
        return ph.psi_p1, psi2

    def psi(self, p: ArrayLike):
        ph = self.phase
        p = np.asarray(p, dtype=float)
        if isinstance(ph, QuadraticPhase):
            return -(p - ph.p0) ** 2 + ph.c
        psi1, psi2 = self.psi_endpoints()
        mid = 0.5 * (self.p1 + self.p2)
        left = p <= mid
        out = np.empty(p.shape)
        h1 = p[left] - self.p1
        out[left] = psi1 + h1 ** ph.rho1 * self.phase_average(1, h1)
        h2 = self.p2 - p[~left]
        out[~left] = psi2 - h2 ** ph.rho2 * self.phase_average(2, h2)
        return out if out.ndim else float(out)

    def dpsi(self, p: ArrayLike):
        ph = self.phase
        p = np.asarray(p, dtype=float)
        if isinstance(ph, QuadraticPhase):
            return -2.0 * (p - ph.p0)
        out = ph.nondegenerate(p)
        if ph.rho1 != 1:
            out = out * (p - self.p1) ** (ph.rho1 - 1.0)
        if ph.rho2 != 1:
            out = out * (self.p2 - p) ** (ph.rho2 - 1.0)
        return out

    def _general(self) -> GeneralPhase:
        if not isinstance(self.phase, GeneralPhase):
            raise TypeError("operation requires a general (factored) phase")
        return self.phase


# ---------------------------------------------------------------------------
# Validation and direct evaluation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def chebyshev_points(a: float, b: float, n: int = 64) -> np.ndarray:
    k = np.arange(n)
    return 0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * k + 1) * np.pi / (2 * n))


def validate_problem(problem: OscillatoryProblem) -> ValidationReport:
    """Collect every violated assumption of ``problem``."""
    rep = ValidationReport()
    p1, p2 = problem.p1, problem.p2
    if not (math.isfinite(p1) and math.isfinite(p2)):
        rep.violations.append("interval endpoints must be finite")
        return rep
    if not p1 < p2:
        rep.violations.append("interval endpoints must satisfy p1 < p2")
        return rep
    amp = problem.amplitude
    for name, mu in (("mu1", amp.mu1), ("mu2", amp.mu2)):
        if not (math.isfinite(mu) and 0.0 < mu <= 1.0):
            rep.violations.append(f"{name} outside (0,1]")
    grid = chebyshev_points(p1, p2)
    ugrid = np.asarray(amp.regular(grid), dtype=float)
    if not np.all(np.isfinite(ugrid)):
        rep.violations.append("regular part not finite on the interval")
    scale = max(float(np.max(np.abs(ugrid))), 1e-300) if ugrid.size else 1.0
    for mu, end in ((amp.mu1, p1), (amp.mu2, p2)):
        if mu != 1.0 and abs(float(amp.regular(end))) <= 1e-14 * scale:
            rep.violations.append("regular part vanishes at singular endpoint")
            break
    ph = problem.phase
    if isinstance(ph, QuadraticPhase):
        if not (math.isfinite(ph.p0) and math.isfinite(ph.c)):
            rep.violations.append("quadratic phase parameters must be finite")
    else:
        for name, rho in (("rho1", ph.rho1), ("rho2", ph.rho2)):
            if not (math.isfinite(rho) and rho >= 1.0):
                rep.violations.append(f"{name} below 1")
        g = np.asarray(ph.nondegenerate(grid), dtype=float)
        if not np.all(g > 0):
            rep.violations.append("nondegenerate phase part not positive")
        elif ph.psi_p2 is not None and not rep.violations:
            inc = problem.phase_increment()
            if abs(ph.psi_p2 - ph.psi_p1 - inc) > 1e-9 * max(1.0, abs(inc)):
                rep.violations.append("phase values inconsistent with phase derivative")
    return rep


def eval_amplitude(problem: OscillatoryProblem, p: float) -> complex:
    """U(p), refusing singular endpoints."""
    amp = problem.amplitude
    if p < problem.p1 or p > problem.p2:
        raise DomainError("point outside the interval")
    if (p == problem.p1 and amp.mu1 < 1) or (p == problem.p2 and amp.mu2 < 1):
        raise DomainError("amplitude is singular at this endpoint")
    return complex(problem.amplitude_values(p))


def eval_phase(problem: OscillatoryProblem, p: float, n: int = 0) -> float:
    """psi(p) for ``n = 0`` or psi'(p) for ``n = 1``."""
    if n not in (0, 1):
        raise ValueError("eval_phase supports derivative orders 0 and 1")
    if p < problem.p1 or p > problem.p2:
        raise DomainError("point outside the interval")
    return float(problem.psi(p) if n == 0 else problem.dpsi(p))


# ---------------------------------------------------------------------------
# Transformations
# ---------------------------------------------------------------------------

def sup_norm(f: SmoothFn, a: float, b: float, n: int = 0, samples: int = 2049) -> float:
    """Maximum of ``|f^(n)|`` on [a, b].

    Exact for polynomials (endpoints plus real critical points); otherwise a
    sampled maximum on a Chebyshev-like grid.
    """
    if isinstance(f, Polynomial):
        poly = f._deriv(n)
        # negligible leading coefficients would send the critical points astray
        poly = poly.trim(1e-15 * max(float(np.max(np.abs(poly.coef))), 1e-300))
        crit = poly.deriv().roots() if poly.degree() >= 2 else np.array([])
        crit = np.real(crit[np.abs(np.imag(crit)) <= 1e-12 * (1.0 + np.abs(crit))])
        pts = np.concatenate([[a, b], crit[(crit > a) & (crit < b)]])
        return float(np.max(np.abs(poly(pts))))
    x = np.concatenate([[a, b], a + (b - a) * 0.5 * (1 - np.cos(np.linspace(0, np.pi, samples)))])
    return float(np.max(np.abs(f(x, n))))


def sobolev_norm(f: SmoothFn, a: float, b: float) -> float:
    """``sup|f| + sup|f'|`` on [a, b]."""
    return sup_norm(f, a, b, 0) + sup_norm(f, a, b, 1)


def mirror_problem(problem: OscillatoryProblem) -> OscillatoryProblem:
    """Reflect ``p -> -p``.  The new problem lives on [-p2, -p1].

    Only quadratic phases are supported; reflection maps
    -(p - p0)^2 + c to -(p + p0)^2 + c.
    """
    ph = problem.phase
    if not isinstance(ph, QuadraticPhase):
        raise TypeError("mirroring is implemented for quadratic phases")
    amp = problem.amplitude
    new_amp = AmplitudeSpec(amp.mu2, amp.mu1, amp.regular.compose_affine(-1.0, 0.0))
    return OscillatoryProblem(-problem.p2, -problem.p1, new_amp, QuadraticPhase(-ph.p0, ph.c))


def as_general(problem: OscillatoryProblem) -> OscillatoryProblem:
    """Recast an increasing quadratic phase in factored form.

    Requires ``p0 >= p2``: for ``p0 == p2`` the right endpoint is stationary
    (rho2 = 2, g = 2); otherwise psi' = 2(p0 - p) > 0 with rho1 = rho2 = 1.
    """
    ph = problem.phase
    if isinstance(ph, GeneralPhase):
        return problem
    if ph.p0 < problem.p2:
        raise ValueError("quadratic phase is not increasing on the whole interval")
    psi1, psi2 = problem.psi_endpoints()
    if ph.p0 == problem.p2:
        gp = GeneralPhase(1.0, 2.0, constant(2.0), psi1, psi2)
    else:
        gp = GeneralPhase(1.0, 1.0, Polynomial([2.0 * ph.p0, -2.0]), psi1, psi2)
    return OscillatoryProblem(problem.p1, problem.p2, problem.amplitude, gp)
