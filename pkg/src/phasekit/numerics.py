"""
Shared numerical kernels.

Contents
--------
gamma_real                  gamma function for real arguments with a domain check
solve_monotone_root         bracketed bisection with secant acceleration
nth_derivative              finite differences with Richardson extrapolation
integrate_adaptive          vectorised adaptive Gauss-Kronrod (7/15)
integrate_endpoint_singular integral of s^(mu-1) g(s) over [0, S]
gauss_legendre, gauss_jacobi fixed rules (Jacobi via Golub-Welsch)

All integrands are expected to accept numpy arrays and return arrays of the
same shape, real or complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

EPS = np.finfo(float).eps

ArrayFn = Callable[[np.ndarray], np.ndarray]


class NumericsError(ArithmeticError):
    """Base class for failures inside the numerical kernels."""


class RootBracketError(NumericsError):
    """The function does not change sign on the supplied bracket."""


class RootConvergenceError(NumericsError):
    """The root iteration hit its iteration cap."""


class StencilDomainError(NumericsError):
    """A finite-difference stencil does not fit into the allowed domain."""


class QuadratureBudgetError(NumericsError):
    """Adaptive quadrature ran out of subdivisions.

    The best available estimate and its error guess are attached so callers
    can decide whether to use them anyway.
    """

    def __init__(self, message: str, estimate: complex, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")

    def tightened(self, factor: float) -> "QuadratureSettings":
        return QuadratureSettings(self.rel_tol * factor, self.abs_tol * factor,
                                  self.max_subdivisions)


@dataclass(frozen=True)
class DerivativeSettings:
    """Step control for :func:`nth_derivative`.

    ``base_step`` is a relative step: the actual step is
    ``base_step * length`` where ``length`` is the size of the domain of the
    function being differentiated.  ``None`` selects the step that balances
    truncation against rounding for the extrapolated order actually achieved.
    """

    base_step: Optional[float] = None
    richardson_levels: int = 3

    def __post_init__(self):
        if self.base_step is not None and not self.base_step > 0:
            raise ValueError("base_step must be positive")
        if self.richardson_levels < 1:
            raise ValueError("richardson_levels must be at least 1")


class QuadResult(NamedTuple):
    value: complex
    error: float
    panels: int


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

def gamma_real(x: float) -> float:
    """Gamma function for real ``x > 0`` (``math.gamma`` with a domain check)."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"gamma_real requires x > 0, got {x!r}")
    return math.gamma(x)


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def solve_monotone_root(f: Callable[[float], float], lo: float, hi: float,
                        max_iter: int = 400) -> float:
    """Root of ``f`` on ``[lo, hi]`` given a sign change.

    Each step tries the secant (false-position) point of the current bracket
    and falls back to bisection whenever the bracket fails to halve.  Stops
    once ``|f(r)| <= 1e-12 * scale`` and the bracket is narrower than
    ``1e-14 * |r|`` (``scale`` is the larger of ``|f|`` at the initial ends).
    """
    lo, hi = float(lo), float(hi)
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = float(f(lo)), float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (flo * fhi < 0.0):
        raise RootBracketError(f"no sign change on [{lo}, {hi}]: f = {flo}, {fhi}")
    scale = max(abs(flo), abs(fhi))
    tiny = 1e-300

    best, fbest = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    for _ in range(max_iter):
        width = hi - lo
        if abs(fbest) <= 1e-12 * scale and width <= max(1e-14 * abs(best), tiny):
            return best
        # secant candidate, kept strictly inside the bracket
        x = hi - fhi * (hi - lo) / (fhi - flo)
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
        fx = float(f(x))
        if fx == 0.0:
            return x
        if flo * fx < 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
        if abs(fx) < abs(fbest):
            best, fbest = x, fx
        if hi - lo > 0.5 * width:
            m = 0.5 * (lo + hi)
            if m <= lo or m >= hi:
                # bracket is two adjacent floats
                return best
            fm = float(f(m))
            if fm == 0.0:
                return m
            if flo * fm < 0.0:
                hi, fhi = m, fm
            else:
                lo, flo = m, fm
            if abs(fm) < abs(fbest):
                best, fbest = m, fm
        if not (lo <= best <= hi):
            best, fbest = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    raise RootConvergenceError(f"root iteration did not converge on [{lo}, {hi}]")


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def _central_weights(n: int) -> Tuple[np.ndarray, np.ndarray]:
    k = np.arange(n + 1)
    offsets = n / 2.0 - k
    weights = np.array([(-1) ** j * math.comb(n, j) for j in range(n + 1)], float)
    return offsets, weights


def _forward_weights(n: int) -> Tuple[np.ndarray, np.ndarray]:
    k = np.arange(n + 1)
    weights = np.array([(-1) ** (n - j) * math.comb(n, j) for j in range(n + 1)], float)
    return k.astype(float), weights


def nth_derivative(f: ArrayFn, s, n: int,
                   settings: DerivativeSettings = DerivativeSettings(),
                   domain: Tuple[float, float] = (-math.inf, math.inf),
                   length: Optional[float] = None):
    """n-th derivative of ``f`` at ``s`` (scalar or array) for ``1 <= n <= 4``.

    A central stencil is used when it fits inside ``domain``; otherwise a
    forward or backward stencil is chosen automatically.  The estimate is
    refined by Richardson extrapolation over step halvings.

    Parameters
    ----------
    f : callable
        Vectorised function, real or complex.
    s : float or ndarray
        Evaluation point(s) inside ``domain``.
    domain : (lo, hi)
        Interval on which ``f`` may be evaluated.
    length : float, optional
        Length scale for the step.  Defaults to the domain length, or to
        ``max(1, |s|)`` for an unbounded domain.
    """
    if not 1 <= n <= 4:
        raise ValueError("nth_derivative supports 1 <= n <= 4")
    lo, hi = float(domain[0]), float(domain[1])
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    scalar = np.ndim(s) == 0
    if np.any(s_arr < lo) or np.any(s_arr > hi):
        raise StencilDomainError("evaluation point outside the domain")
    levels = settings.richardson_levels
    if length is None:
        if math.isfinite(hi - lo):
            length = hi - lo
        else:
            length = max(1.0, float(np.max(np.abs(s_arr))))

    central_order = 2 * levels
    forward_order = levels
    if settings.base_step is not None:
        h_c = h_f = settings.base_step * length
    else:
        # the finest Richardson step is 2^(levels-1) times smaller; widen the
        # base step so that the finest one still balances rounding
        h_c = length * (EPS * 2.0 ** (n * (levels - 1))) ** (1.0 / (n + central_order))
        h_f = length * (EPS * 2.0 ** (n * (levels - 1))) ** (1.0 / (n + forward_order))

    c_off, c_w = _central_weights(n)
    f_off, f_w = _forward_weights(n)
    half_span = n * h_c / 2.0
    use_central = (s_arr - half_span >= lo) & (s_arr + half_span <= hi)
    use_forward = ~use_central & (s_arr + n * h_f <= hi)
    use_backward = ~use_central & ~use_forward & (s_arr - n * h_f >= lo)
    if not np.all(use_central | use_forward | use_backward):
        raise StencilDomainError("domain too short for the finite-difference stencil")

    out = np.empty(s_arr.shape, dtype=complex)
    is_complex = False
    groups = (
        (use_central, c_off, c_w, h_c, 4.0),
        (use_forward, f_off, f_w, h_f, 2.0),
        (use_backward, -f_off, f_w * (-1) ** n, h_f, 2.0),
    )
    for mask, off, w, h0, ratio in groups:
        if not np.any(mask):
            continue
        pts = s_arr[mask]
        steps = h0 / 2.0 ** np.arange(levels)
        # shape (levels, npts, nstencil)
        grid = pts[None, :, None] + steps[:, None, None] * off[None, None, :]
        np.clip(grid, lo, hi, out=grid)
        vals = np.asarray(f(grid.ravel())).reshape(grid.shape)
        if np.iscomplexobj(vals):
            is_complex = True
        table = [(vals[l] @ w) / steps[l] ** n for l in range(levels)]
        # Richardson: central error series in h^2, one-sided in h
        for k in range(1, levels):
            fac = ratio ** k
            table = [(fac * table[l + 1] - table[l]) / (fac - 1.0)
                     for l in range(len(table) - 1)]
        out[mask] = table[0]
    if not is_complex:
        out = out.real
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# Quadrature rules
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes sit at odd positions of GK_NODES
G_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=256)
def gauss_jacobi(n: int, alpha: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule for weight ``(1-x)^alpha (1+x)^beta`` on [-1, 1].

    Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
    three-term recurrence.
    """
    a, b = float(alpha), float(beta)
    if a <= -1 or b <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = (2 * k + ab) * (2 * k + ab + 2)
        diag = np.where(denom != 0, (b * b - a * a) / denom, (b - a) / (ab + 2))
    diag[0] = (b - a) / (ab + 2)
    kk = np.arange(1, n, dtype=float)
    num = 4 * kk * (kk + a) * (kk + b) * (kk + ab)
    den = (2 * kk + ab) ** 2 * (2 * kk + ab + 1) * (2 * kk + ab - 1)
    off = np.sqrt(num / den)
    jac = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    x, v = np.linalg.eigh(jac)
    mu0 = 2.0 ** (ab + 1) * math.exp(math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(ab + 2))
    w = mu0 * v[0, :] ** 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def jacobi_unit(n: int, power_at_zero: float, power_at_one: float = 0.0
                ) -> Tuple[np.ndarray, np.ndarray]:
    """Rule on [0, 1] for weight ``y^power_at_zero (1-y)^power_at_one``."""
    x, w = gauss_jacobi(n, power_at_one, power_at_zero)
    scale = 2.0 ** (power_at_zero + power_at_one + 1)
    return (x + 1.0) / 2.0, w / scale


# ---------------------------------------------------------------------------
# Adaptive quadrature
# ---------------------------------------------------------------------------

def integrate_adaptive(f: ArrayFn, a: float, b: float,
                       settings: QuadratureSettings = QuadratureSettings(),
                       breakpoints: Optional[Sequence[float]] = None,
                       initial_panels: int = 1) -> QuadResult:
    """Adaptive Gauss-Kronrod (7/15) integral of ``f`` over ``[a, b]``.

    All active panels are evaluated in one vectorised call per sweep.  A panel
    is accepted once its Kronrod-Gauss discrepancy falls below its share
    (proportional to width) of ``max(abs_tol, rel_tol * |I|)``; the rest are
    bisected.  ``breakpoints`` seed the initial partition.
    """
    a, b = float(a), float(b)
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = [a]
    if breakpoints is not None:
        edges += sorted(float(p) for p in breakpoints if a < p < b)
    edges.append(b)
    edges = np.asarray(edges)
    if initial_panels > 1:
        edges = np.unique(np.concatenate([
            np.linspace(edges[i], edges[i + 1], initial_panels + 1)
            for i in range(len(edges) - 1)]))
    return _gk_loop(f, edges[:-1], edges[1:], settings, sign)


def integrate_panels(f: ArrayFn, lefts: np.ndarray, rights: np.ndarray,
                     settings: QuadratureSettings = QuadratureSettings(),
                     noise: float = 0.0) -> QuadResult:
    """Adaptive integral over a prepared partition (``lefts[i]``, ``rights[i]``).

    ``noise`` is the relative rounding error of the integrand values beyond
    machine precision (for example a large phase times eps).  Panels whose
    error is at that level are not refined further.
    """
    lefts = np.asarray(lefts, float)
    rights = np.asarray(rights, float)
    return _gk_loop(f, lefts, rights, settings, 1.0, noise)


def _gk_apply(f, lefts, rights, noise=0.0):
    centers = 0.5 * (lefts + rights)
    halfw = 0.5 * (rights - lefts)
    x = centers[:, None] + halfw[:, None] * GK_NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise NumericsError("integrand returned a non-finite value")
    kron = halfw * (fx @ GK_WEIGHTS)
    gauss = halfw * (fx[:, 1::2] @ G_WEIGHTS)
    raw = np.abs(kron - gauss)
    # QUADPACK's scaling of |K - G| against the mean deviation, with a
    # rounding floor
    resabs = halfw * (np.abs(fx) @ GK_WEIGHTS)
    mean = kron / np.where(halfw > 0, 2.0 * halfw, 1.0)
    resasc = halfw * (np.abs(fx - mean[:, None]) @ GK_WEIGHTS)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * raw / resasc) ** 1.5)
    err = np.where((resasc > 0) & (raw > 0), scaled, raw)
    floor = (50.0 * EPS + noise) * resabs
    err = np.maximum(err, floor)
    return kron, err, err > floor


def _gk_loop(f, lefts, rights, settings, sign, noise=0.0) -> QuadResult:
    # Every panel keeps its Kronrod value and error guess.  Each sweep bisects
    # the panels carrying most of the error until the error sum meets the
    # tolerance.
    vals, errs, live = _gk_apply(f, lefts, rights, noise)
    panels_used = len(lefts)
    while True:
        estimate = vals.sum()
        tol = max(settings.abs_tol, settings.rel_tol * abs(estimate))
        total_err = errs.sum()
        if total_err <= tol:
            return QuadResult(sign * complex(estimate), float(total_err), panels_used)
        widths = rights - lefts
        splittable = widths > 64 * EPS * np.maximum(np.abs(0.5 * (lefts + rights)), 1e-300)
        worst = errs.max()
        pick = splittable & live & (errs >= 0.05 * worst)
        if not np.any(pick):
            # only rounding noise is left: report what we have
            return QuadResult(sign * complex(estimate), float(total_err), panels_used)
        panels_used += int(pick.sum())
        if panels_used > settings.max_subdivisions:
            raise QuadratureBudgetError(
                "adaptive quadrature exhausted its subdivision budget",
                sign * complex(estimate), float(total_err))
        lp, rp = lefts[pick], rights[pick]
        mids = 0.5 * (lp + rp)
        nl = np.concatenate([lp, mids])
        nr = np.concatenate([mids, rp])
        nv, ne, nlive = _gk_apply(f, nl, nr, noise)
        keep = ~pick
        lefts = np.concatenate([lefts[keep], nl])
        rights = np.concatenate([rights[keep], nr])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        live = np.concatenate([live[keep], nlive])


def integrate_endpoint_singular(g: ArrayFn, S: float, mu: float,
                                settings: QuadratureSettings = QuadratureSettings(),
                                breakpoints: Optional[Sequence[float]] = None) -> QuadResult:
    """Integral of ``s^(mu-1) g(s)`` over ``[0, S]`` for ``mu`` in (0, 1].

    Substituting ``s = u^(1/mu)`` gives ``(1/mu) * integral of g(u^(1/mu))``
    over ``[0, S^mu]``, which has no endpoint singularity.  Breakpoints are
    given in the ``s`` variable.
    """
    if not 0 < mu <= 1:
        raise ValueError("weight exponent mu must lie in (0, 1]")
    S = float(S)
    if mu == 1.0:
        return integrate_adaptive(g, 0.0, S, settings, breakpoints)
    inv = 1.0 / mu

    def h(u):
        return g(u ** inv)

    bps = None if breakpoints is None else [p ** mu for p in breakpoints if 0 < p < S]
    res = integrate_adaptive(h, 0.0, S ** mu, settings, bps)
    return QuadResult(res.value * inv, res.error * inv, res.panels)
