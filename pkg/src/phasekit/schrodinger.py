"""
Free Schrodinger evolution of band-limited data with a singular frequency.

The datum has Fourier transform (p - p1)^(mu-1) u(p) on [p1, p2] and zero
elsewhere, with u(p2) = 0.  The solution

    u(t, x) = (1/2pi) int_{p1}^{p2} F u0(p) exp(-i t p^2 + i x p) dp

is an oscillatory integral with large parameter t and quadratic phase
psi(p) = -(p - p0)^2 + p0^2, p0 = x/(2t).  Where p0 sits relative to the band
decides the decay:

* inside the cone 2(p1+eps) < x/t < 2p2: t^(-1/2) or t^(-mu),
* outside the band: t^(-mu) from the singular frequency alone,
* on the critical line x = 2 p1 t: t^(-mu/2),
* on the curve x/t = 2p1 + 2t^(-eps): the rates are shifted by eps.

All coefficients below include the 1/(2pi) of the solution formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .core_model import (AmplitudeSpec, OscillatoryProblem, Polynomial, QuadraticPhase, SmoothFn,
                         sobolev_norm, sup_norm)
from .numerics import (QuadratureSettings, gamma_real, gauss_legendre, integrate_adaptive,
                       integrate_endpoint_singular, jacobi_unit)
from .oracle import ORACLE_SETTINGS, oscillatory_integral
from .quadratic_phase import (CASE_ABOVE, CASE_BELOW, CASE_HALF, classify, curve_regime,
                              default_delta, expand_full, leading_curve_exponent)

TWO_PI = 2.0 * math.pi
DEFAULT_ZETA = 1.0 / TWO_PI


class RegionError(ValueError):
    """The space-time point lies outside the region an expansion requires."""


class BoundViolation(AssertionError):
    """A computed solution value exceeds its proven bound."""


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialData:
    mu: float
    p1: float
    p2: float
    utilde: SmoothFn

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if not (math.isfinite(self.p1) and math.isfinite(self.p2) and self.p1 < self.p2):
            raise ValueError("band must satisfy p1 < p2")
        scale = max(sup_norm(self.utilde, self.p1, self.p2), 1e-300)
        if abs(float(self.utilde(self.p2))) > 1e-12 * scale:
            raise ValueError("regular part must vanish at p2")
        if float(self.utilde(self.p1)) == 0.0:
            raise ValueError("regular part must not vanish at p1")

    @classmethod
    def from_polynomial(cls, mu: float, p1: float, p2: float,
                        coefficients: Sequence[float]) -> "InitialData":
        """Polynomial regular part; multiplied by (p2 - p) unless it already vanishes at p2."""
        poly = Polynomial(coefficients)
        scale = max(float(np.max(np.abs(coefficients))), 1e-300) * max(1.0, abs(p2)) ** len(coefficients)
        if abs(float(poly(p2))) > 1e-13 * scale:
            poly = Polynomial(np.convolve(np.asarray(coefficients, dtype=float), [p2, -1.0]))
        return cls(mu, p1, p2, poly)

    @property
    def width(self) -> float:
        return self.p2 - self.p1

    def fourier(self, p):
        """F u0(p): (p - p1)^(mu-1) u(p) inside (p1, p2], zero outside."""
        p = np.asarray(p, dtype=float)
        inside = (p > self.p1) & (p <= self.p2)
        safe = np.where(inside, p, self.p2)
        out = np.where(inside, (safe - self.p1) ** (self.mu - 1.0) * self.utilde(safe), 0.0)
        return out if out.ndim else float(out)

    def problem(self, t: float, x: float) -> OscillatoryProblem:
        """U = F u0 / 2pi against exp(i t psi), psi = -(p - p0)^2 + p0^2."""
        p0 = x / (2.0 * t)
        reg = self.utilde
        if isinstance(reg, Polynomial):
            reg = Polynomial([c / TWO_PI for c in reg.coefficients])
        else:
            reg = reg * (1.0 / TWO_PI)
        amp = AmplitudeSpec(self.mu, 1.0, reg)
        return OscillatoryProblem(self.p1, self.p2, amp, QuadraticPhase(p0, p0 * p0))

    def norms(self) -> Tuple[float, float, float]:
        """(sup |u|, sup |u| + sup |u'|, sup |u'|) over the band."""
        sup = sup_norm(self.utilde, self.p1, self.p2)
        dsup = sup_norm(self.utilde, self.p1, self.p2, 1)
        return sup, sup + dsup, dsup


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------

def _ratio(t: float, x: float) -> Fraction:
    if not t > 0:
        raise ValueError("t must be positive")
    return Fraction(x) / Fraction(t)


@dataclass(frozen=True)
class Cone:
    """2a < x/t < 2b."""

    a: float
    b: float

    def contains(self, t: float, x: float) -> bool:
        r = _ratio(t, x)
        return 2 * Fraction(self.a) < r < 2 * Fraction(self.b)


@dataclass(frozen=True)
class Curve:
    """x/t = 2a + 2 t^(-eps)."""

    a: float
    eps: float

    def edge(self, t: float) -> Fraction:
        return 2 * Fraction(self.a) + 2 * Fraction(t ** (-self.eps))

    def point(self, t: float) -> float:
        """x on the curve at time t, rounded up so that x/t >= edge holds exactly."""
        edge = self.edge(t)
        x = float(edge * Fraction(t))
        while Fraction(x) / Fraction(t) < edge:
            x = float(np.nextafter(x, math.inf))
        return x

    def contains(self, t: float, x: float, rel: float = 1e-12) -> bool:
        edge = self.edge(t)
        return abs(_ratio(t, x) - edge) <= Fraction(rel) * abs(edge) + Fraction(1e-300)


@dataclass(frozen=True)
class Region:
    """2a + 2 t^(-eps) <= x/t < 2b and t > (b - a)^(-1/eps)."""

    a: float
    b: float
    eps: float

    @property
    def threshold(self) -> float:
        return (self.b - self.a) ** (-1.0 / self.eps)

    def contains(self, t: float, x: float) -> bool:
        if not t > self.threshold:
            return False
        r = _ratio(t, x)
        return Curve(self.a, self.eps).edge(t) <= r < 2 * Fraction(self.b)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeReport:
    """Leading coefficient(s) at one point, the leading t-exponent and the ledger.

    ``ledger`` holds (constant, t-exponent) pairs.
    """

    coefficients: Tuple[complex, ...]
    leading_exponent: float
    ledger: Tuple[Tuple[float, float], ...]
    label: str
    t: float
    x: float

    def approximation(self) -> complex:
        return sum(self.coefficients) * self.t ** self.leading_exponent

    def bound(self) -> float:
        return sum(c * self.t ** e for c, e in self.ledger)


def _ledger_in_t(expansion, eps_floor: Optional[float] = None, curve_eps: Optional[float] = None):
    out = []
    for e in expansion.ledger:
        if curve_eps is not None:
            out.append((e.constant, e.curve_exponent(curve_eps)))
        else:
            out.append((e.constant * eps_floor ** (-e.alpha), -e.beta))
    return tuple(out)


def stationary_coefficient(data: InitialData, t: float, x: float) -> complex:
    """(1/(2 sqrt(pi))) e^(-i pi/4) e^(i x^2/4t) u(x/2t) (x/2t - p1)^(mu-1)."""
    p0 = x / (2.0 * t)
    return (1.0 / (2.0 * math.sqrt(math.pi)) * complex(np.exp(-0.25j * math.pi + 1j * x * x / (4.0 * t)))
            * float(data.utilde(p0)) * (p0 - data.p1) ** (data.mu - 1.0))


def singular_coefficient(data: InitialData, t: float, x: float, side: int = 2) -> complex:
    """Gamma(mu)/(2^(mu+1) pi) e^(+-i pi mu/2) e^(-i t p1^2 + i x p1) u(p1) |x/2t - p1|^(-mu).

    ``side`` 2 means x/2t > p1 (sign +), side 1 means x/2t < p1 (sign -).
    """
    p0 = x / (2.0 * t)
    sign = 1.0 if side == 2 else -1.0
    mu = data.mu
    return (gamma_real(mu) / (2.0 ** (mu + 1) * math.pi)
            * complex(np.exp(sign * 0.5j * math.pi * mu + 1j * (x * data.p1 - t * data.p1 ** 2)))
            * float(data.utilde(data.p1)) * abs(p0 - data.p1) ** (-mu))


def cone_expansion(data: InitialData, eps: float, t: float, x: float,
                   delta: Optional[float] = None) -> RegimeReport:
    """Uniform expansion in the cone 2(p1 + eps) < x/t < 2 p2."""
    if not (eps > 0 and data.p1 + eps < data.p2):
        raise ValueError("eps must satisfy 0 < eps < p2 - p1")
    if not Cone(data.p1 + eps, data.p2).contains(t, x):
        raise RegionError("point outside the cone")
    mu = data.mu
    if delta is None:
        delta = default_delta(mu)
    if delta < 0.5 * (mu + 1.0):
        raise ValueError("delta must be at least (mu+1)/2 for a uniform cone bound")
    exp = expand_full(data.problem(t, x), t, delta)
    h = stationary_coefficient(data, t, x)
    k = singular_coefficient(data, t, x)
    case = classify(mu)
    if case == CASE_ABOVE:
        coefs, lead = (h,), -0.5
    elif case == CASE_HALF:
        coefs, lead = (h, k), -0.5
    else:
        coefs, lead = (k,), -mu
    return RegimeReport(coefs, lead, _ledger_in_t(exp, eps_floor=eps), "cone/" + case, t, x)


def outside_constant(data: InitialData, eps: float, side: int) -> float:
    """Remainder constant (of t^-1) left (side 1) or right (side 2) of the band."""
    mu = data.mu
    _, sob, _ = data.norms()
    reach = data.p2 + 1.0 / eps if side == 1 else 1.0 / eps - data.p1
    return (1.0 / (4.0 * math.pi * mu) * reach * data.width ** mu * sob
            * ((1.0 - mu) / 2.0 * reach * eps ** -4 + eps ** -2 + eps ** -3))


def outside_cone_expansion(data: InitialData, eps: float, t: float, x: float) -> RegimeReport:
    """Expansion with the stationary point at distance > eps outside the band."""
    if not (eps > 0 and -1.0 / eps < data.p1 - eps and data.p2 + eps < 1.0 / eps):
        raise ValueError("eps too large: the outside cones are empty")
    if Cone(-1.0 / eps, data.p1 - eps).contains(t, x):
        side = 1
    elif Cone(data.p2 + eps, 1.0 / eps).contains(t, x):
        side = 2
    else:
        raise RegionError("point in neither outside cone")
    k = singular_coefficient(data, t, x, side)
    return RegimeReport((k,), -data.mu, ((outside_constant(data, eps, side), -1.0),),
                        f"outside/{'left' if side == 1 else 'right'}", t, x)


def critical_coefficient(data: InitialData, t: float) -> complex:
    """(1/2) Gamma(mu/2) e^(-i pi mu/4) e^(i t p1^2) u(p1), without normalization."""
    mu = data.mu
    return (0.5 * gamma_real(0.5 * mu) * complex(np.exp(-0.25j * math.pi * mu + 1j * t * data.p1 ** 2))
            * float(data.utilde(data.p1)))


def critical_constant(data: InitialData) -> float:
    """(sqrt(pi)/(2 mu)) (p2 - p1)^mu sup|u'|, without normalization."""
    return math.sqrt(math.pi) / (2.0 * data.mu) * data.width ** data.mu * data.norms()[2]


def critical_line_expansion(data: InitialData, t: float, zeta: float = DEFAULT_ZETA) -> RegimeReport:
    """Expansion on x = 2 p1 t, where the stationary point meets the singular frequency."""
    if not t > 0:
        raise ValueError("t must be positive")
    x = 2.0 * data.p1 * t
    return RegimeReport((zeta * critical_coefficient(data, t),), -0.5 * data.mu,
                        ((zeta * critical_constant(data), -0.5),), "critical", t, x)


def region_constant(data: InitialData) -> float:
    """Coefficient of the leading power in the uniform region bound."""
    sup = data.norms()[0]
    mu = data.mu
    case = classify(mu)
    if case == CASE_ABOVE:
        return sup / (2.0 * math.sqrt(math.pi))
    if case == CASE_HALF:
        return (1.0 / (2.0 * math.sqrt(math.pi)) + gamma_real(mu) / 2.0 ** (mu + 1)) * sup
    return gamma_real(mu) / 2.0 ** (mu + 1) * sup


@dataclass(frozen=True)
class RegionBound:
    value: float
    leading_exponent: float
    leading_constant: float
    ledger: Tuple[Tuple[float, float], ...]
    oracle: Optional[complex] = None


def region_uniform_bound(data: InitialData, eps: float, t: float, x: float,
                         verify: bool = False,
                         settings: QuadratureSettings = ORACLE_SETTINGS) -> RegionBound:
    """Bound on |u(t, x)| valid uniformly in the curved region next to the critical line."""
    if not 0.0 < eps < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    if not Region(data.p1, data.p2, eps).contains(t, x):
        raise RegionError("point outside the curved region")
    mu = data.mu
    exp = expand_full(data.problem(t, x), t, default_delta(mu, eps))
    lead = leading_curve_exponent(mu, eps)
    c0 = region_constant(data)
    ledger = _ledger_in_t(exp, curve_eps=eps)
    value = c0 * t ** lead + sum(c * t ** e for c, e in ledger)
    oracle = None
    if verify:
        oracle = u_oracle(data, t, x, settings)
        if abs(oracle) > value:
            raise BoundViolation(f"|u| = {abs(oracle):.6g} exceeds bound {value:.6g}")
    return RegionBound(value, lead, c0, ledger, oracle)


def curve_coefficients(data: InitialData, t: float, eps: float) -> Tuple[complex, complex]:
    """(H, K) on the curve x/t = 2 p1 + 2 t^(-eps); both carry the 1/(2pi)."""
    p0 = data.p1 + t ** (-eps)
    x = 2.0 * p0 * t
    mu = data.mu
    h = (1.0 / (2.0 * math.sqrt(math.pi)) * complex(np.exp(-0.25j * math.pi + 1j * t * p0 * p0))
         * float(data.utilde(p0)))
    k = (gamma_real(mu) / (2.0 ** (mu + 1) * math.pi)
         * complex(np.exp(0.5j * math.pi * mu + 1j * (x * data.p1 - t * data.p1 ** 2)))
         * float(data.utilde(data.p1)))
    return h, k


def boundary_curve_expansion(data: InitialData, eps: float, t: float) -> RegimeReport:
    """Expansion on the left edge of the curved region, where its rates are attained."""
    region = Region(data.p1, data.p2, eps)
    if not 0.0 < eps < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    if not t > region.threshold:
        raise RegionError(f"t must exceed {region.threshold:.6g}")
    x = Curve(data.p1, eps).point(t)
    mu = data.mu
    regime = curve_regime(data.problem(t, x), eps, t, c_of_p0=lambda p0: p0 * p0)
    h, k = curve_coefficients(data, t, eps)
    case = classify(mu)
    coefs = {CASE_ABOVE: (h,), CASE_HALF: (h, k), CASE_BELOW: (k,)}[case]
    return RegimeReport(coefs, regime.leading_exponent, regime.exponents, "curve/" + case, t, x)


# ---------------------------------------------------------------------------
# Evaluation of u
# ---------------------------------------------------------------------------

def u_oracle(data: InitialData, t: float, x: float,
             settings: QuadratureSettings = ORACLE_SETTINGS) -> complex:
    """u(t, x) by adaptive quadrature of the oscillatory integral."""
    if not t > 0:
        raise ValueError("t must be positive")
    return complex(oscillatory_integral(data.problem(t, x), t, settings, check=False).value)


_GL_NODES = 20


@lru_cache(maxsize=32)
def _first_panel_rule(mu: float):
    return jacobi_unit(_GL_NODES, mu - 1.0)


def _nodes(data: InitialData, panels: int):
    """Quadrature nodes and weights (including the singular factor) for F u0 over the band."""
    w = data.width / panels
    y, wy = _first_panel_rule(data.mu)
    first_p = data.p1 + w * y
    first_w = wy * w ** data.mu * data.utilde(first_p)
    x, wx = gauss_legendre(_GL_NODES)
    lefts = data.p1 + w * np.arange(1, panels)
    p = (lefts[:, None] + 0.5 * w * (x[None, :] + 1.0)).ravel()
    wp = np.tile(0.5 * w * wx, panels - 1) * data.fourier(p) if panels > 1 else np.empty(0)
    return np.concatenate([first_p, p]), np.concatenate([first_w, wp])


def u_batch(data: InitialData, t: float, xs, chunk: int = 256) -> np.ndarray:
    """u(t, x) at many x by fixed panel quadrature.

    Panels are sized so that the phase turns by at most 2pi on each one; the
    panel touching p1 uses a Gauss-Jacobi rule for the (p - p1)^(mu-1) factor.
    """
    xs = np.asarray(xs, dtype=float)
    flat = xs.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, chunk):
        xc = flat[start:start + chunk]
        lo, hi = float(xc.min()), float(xc.max())
        slope = max(abs(lo - 2 * t * data.p1), abs(lo - 2 * t * data.p2),
                    abs(hi - 2 * t * data.p1), abs(hi - 2 * t * data.p2))
        panels = max(4, int(math.ceil(slope * data.width / TWO_PI)))
        p, w = _nodes(data, panels)
        phase = np.outer(xc, p) - t * p * p
        out[start:start + chunk] = (np.exp(1j * phase) @ w) / TWO_PI
    return out.reshape(xs.shape)


# ---------------------------------------------------------------------------
# L2 statements
# ---------------------------------------------------------------------------

def band_norm(data: InitialData, lo: Optional[float] = None) -> float:
    """||F u0||_{L2(lo, p2)}, lo defaulting to p1."""
    if lo is None or lo <= data.p1:
        if data.mu <= 0.5:
            raise ValueError("F u0 is not square integrable for mu <= 1/2")
        res = integrate_endpoint_singular(lambda s: data.utilde(data.p1 + s) ** 2, data.width,
                                          2.0 * data.mu - 1.0,
                                          QuadratureSettings(1e-12, 1e-300, 20_000))
    else:
        res = integrate_adaptive(lambda p: data.fourier(p) ** 2, lo, data.p2,
                                 QuadratureSettings(1e-12, 1e-300, 20_000))
    return math.sqrt(float(np.real(res.value)))


@dataclass(frozen=True)
class EnergyWindow:
    windowed: float
    limit: float
    bound: float
    window: Tuple[float, float]


def energy_window(data: InitialData, eps: float, t: float, delta: Optional[float] = None) -> EnergyWindow:
    """L2 norm of u(t, .) over (2(p1+eps)t, 2 p2 t) against its large-t limit."""
    if data.mu <= 0.5:
        raise ValueError("the energy statement needs mu > 1/2")
    if not 0 < eps < data.width:
        raise ValueError("eps must satisfy 0 < eps < p2 - p1")
    a, b = 2.0 * (data.p1 + eps) * t, 2.0 * data.p2 * t
    # |u|^2 oscillates on the x-scale 2pi/(p2-p1); aim for two periods per panel
    panels = max(int(math.ceil(32 * (data.width - eps))),
                 int(math.ceil((b - a) * data.width / (4.0 * math.pi))))
    gx, gw = gauss_legendre(16)
    h = (b - a) / panels
    xs = (a + h * np.arange(panels)[:, None] + 0.5 * h * (gx[None, :] + 1.0)).ravel()
    ws = np.tile(0.5 * h * gw, panels)
    vals = u_batch(data, t, xs)
    windowed = math.sqrt(float(np.sum(ws * np.abs(vals) ** 2)))
    limit = band_norm(data, data.p1 + eps) / math.sqrt(TWO_PI)
    # the cone ledger is evaluated at an interior point; its constants do not depend on it
    mid = 0.5 * (a + b)
    report = cone_expansion(data, eps, t, mid, delta)
    scale = math.sqrt(2.0 * (data.width - eps))
    bound = sum(scale * c * t ** (e + 0.5) for c, e in report.ledger)
    return EnergyWindow(windowed, limit, bound, (a, b))


def plancherel_norm(data: InitialData, t: float, pad: Optional[float] = None) -> Tuple[float, float]:
    """(||u(t, .)||_{L2} on a wide window, ||F u0||_{L2} / sqrt(2pi)).

    |u|^2 is band-limited to |k| <= p2 - p1 < 2pi, so the unit-step
    trapezoid sum is exact on the line; only the window truncation errs.
    """
    if pad is None:
        pad = max(40.0 * math.sqrt(t), 4000.0)
    lo = math.floor(2.0 * min(data.p1, data.p2, 0.0) * t - pad)
    hi = math.ceil(2.0 * max(data.p2, data.p1, 0.0) * t + pad)
    if data.width >= TWO_PI:
        raise ValueError("unit-step sum needs p2 - p1 < 2pi")
    xs = np.arange(lo, hi + 1, dtype=float)
    vals = u_batch(data, t, xs)
    return math.sqrt(float(np.sum(np.abs(vals) ** 2))), band_norm(data) / math.sqrt(TWO_PI)


# ---------------------------------------------------------------------------
# Normalization on the critical line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaEstimate:
    value: float
    fits: Tuple[float, float, float]
    spread: float
    ratios: Tuple[float, ...]

    @property
    def stable(self) -> bool:
        return self.spread <= 0.01


def _fit_limit(ts: np.ndarray, ratios: np.ndarray) -> float:
    basis = np.stack([np.ones_like(ts), ts ** -0.5, 1.0 / ts], axis=1)
    coef, *_ = np.linalg.lstsq(basis, ratios, rcond=None)
    return float(coef[0])


def estimate_zeta(data: InitialData, ts: Sequence[float],
                  settings: QuadratureSettings = ORACLE_SETTINGS) -> ZetaEstimate:
    """Limit of |u(t, 2 p1 t)| t^(mu/2) / |L| as t grows.

    The ratio approaches the limit like t^(-1/2), so the limit is read off a
    fit of zeta + b t^(-1/2) + c t^(-1).  Fits on the lower half, the upper
    half and the whole sweep are compared; ``spread`` is their largest
    relative deviation from the full fit.
    """
    ts = np.asarray(sorted(ts), dtype=float)
    if ts.size < 6:
        raise ValueError("need at least 6 sweep points")
    lead = abs(critical_coefficient(data, 0.0))
    ratios = np.array([abs(u_oracle(data, t, 2.0 * data.p1 * t, settings)) * t ** (0.5 * data.mu) / lead
                       for t in ts])
    half = ts.size // 2
    full = _fit_limit(ts, ratios)
    low = _fit_limit(ts[:half + 1], ratios[:half + 1])
    high = _fit_limit(ts[half - 1:], ratios[half - 1:])
    spread = max(abs(low - full), abs(high - full)) / abs(full)
    return ZetaEstimate(full, (low, high, full), spread, tuple(float(r) for r in ratios))
