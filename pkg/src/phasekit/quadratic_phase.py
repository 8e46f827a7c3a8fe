"""
Quadratic phases with an interior stationary point.

The integral of U(p) = (p - p1)^(mu-1) u(p) against exp(i omega psi) with
psi(p) = c - (p - p0)^2 and p1 < p0 < p2 is split at p0.  Each half is a
two-endpoint problem that the cut-point expansion handles with constants in
closed form.  Every remainder has the shape

    C * (p0 - p1)^(-alpha) * omega^(-beta)

so it is stored as a :class:`LedgerEntry`.  The leading coefficients are

    H = sqrt(pi) exp(-i pi/4) exp(i omega c) u(p0)                 (at p0)
    K = Gamma(mu)/2^mu exp(i pi mu/2) exp(i omega psi(p1)) u(p1)   (at p1)

carried with (p0 - p1)^(mu-1) omega^(-1/2) and (p0 - p1)^(-mu) omega^(-mu).
Which of them leads depends on mu against 1/2.

Setting p0 = p1 + omega^(-eps) turns each entry into a pure power of
omega; :func:`curve_regime` does this and certifies that the remainder
still decays faster than the leading term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .core_model import (AmplitudeSpec, OscillatoryProblem, PowerFn, QuadraticPhase, as_general,
                         sobolev_norm, sup_norm)
from .erdelyi_expansion import balance_for
from .numerics import gamma_real

CASE_ABOVE = "mu>1/2"
CASE_HALF = "mu=1/2"
CASE_BELOW = "mu<1/2"

DELTA_CAP = 0.99


class InvalidCaseError(ValueError):
    """The problem does not have the quadratic structure this module needs."""


class ThresholdError(ValueError):
    """omega is too small for p1 + omega^(-eps) to lie inside the interval."""


@dataclass(frozen=True)
class LedgerEntry:
    constant: float
    alpha: float
    beta: float
    label: str

    def __post_init__(self):
        if not self.constant >= 0:
            raise ValueError(f"ledger constant must be nonnegative ({self.label})")

    def value(self, gap: float, omega: float) -> float:
        """constant * gap^(-alpha) * omega^(-beta), with gap = p0 - p1."""
        if self.constant == 0.0:
            return 0.0
        return self.constant * gap ** (-self.alpha) * omega ** (-self.beta)

    def curve_exponent(self, eps: float) -> float:
        """omega exponent once gap = omega^(-eps)."""
        return -self.beta + eps * self.alpha


@dataclass(frozen=True)
class LeadingTerm:
    coefficient: complex
    gap_exponent: float
    omega_exponent: float
    label: str

    def value(self, gap: float, omega: float) -> complex:
        return self.coefficient * gap ** self.gap_exponent * omega ** self.omega_exponent


@dataclass(frozen=True)
class HalfExpansion:
    side: int
    terms: Tuple[LeadingTerm, ...]
    ledger: Tuple[LedgerEntry, ...]
    gap: float
    omega: float

    def approximation(self) -> complex:
        return sum(t.value(self.gap, self.omega) for t in self.terms)

    def bound_value(self) -> float:
        return sum(e.value(self.gap, self.omega) for e in self.ledger)


@dataclass(frozen=True)
class QuadraticExpansion:
    case: str
    leading: Tuple[LeadingTerm, ...]
    ledger: Tuple[LedgerEntry, ...]
    delta: float
    gamma: float
    gap: float
    omega: float

    def approximation(self) -> complex:
        return sum(t.value(self.gap, self.omega) for t in self.leading)

    def bound_value(self) -> float:
        return sum(e.value(self.gap, self.omega) for e in self.ledger)

    @property
    def leading_decay(self) -> float:
        """Magnitude of the leading omega exponent (1/2 or mu)."""
        return -self.leading[0].omega_exponent


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

def classify(mu: float) -> str:
    if mu > 0.5:
        return CASE_ABOVE
    if mu == 0.5:
        return CASE_HALF
    return CASE_BELOW


def default_delta(mu: float, eps: float = 0.0) -> float:
    """Halfway between the binding lower constraint and 1, capped at 0.99."""
    m = max(mu, 0.5 + eps, 0.5 * (mu + 1.0))
    return min(m + 0.5 * (1.0 - m), DELTA_CAP)


def check_delta(mu: float, delta: float) -> None:
    if not 0.5 < delta < 1.0:
        raise ValueError("delta must lie in (1/2, 1)")
    if mu < 0.5 and not delta > mu:
        raise ValueError("delta must exceed mu when mu < 1/2")


def _quadratic(problem: OscillatoryProblem) -> QuadraticPhase:
    ph = problem.phase
    if not isinstance(ph, QuadraticPhase):
        raise InvalidCaseError("phase is not quadratic")
    if not problem.p1 < ph.p0 < problem.p2:
        raise InvalidCaseError("stationary point must lie strictly inside the interval")
    if problem.amplitude.mu2 != 1.0:
        raise InvalidCaseError("amplitude must be regular at p2")
    return ph


def _check_root_at_p2(problem: OscillatoryProblem, norm: float) -> None:
    end = abs(float(problem.amplitude.regular(problem.p2)))
    if end > 1e-12 * max(norm, 1e-300):
        raise InvalidCaseError("regular part must vanish at p2")


def _norms(problem: OscillatoryProblem) -> Tuple[float, float]:
    reg = problem.amplitude.regular
    return (sup_norm(reg, problem.p1, problem.p2),
            sobolev_norm(reg, problem.p1, problem.p2))


# ---------------------------------------------------------------------------
# Leading coefficients
# ---------------------------------------------------------------------------

def stationary_coefficient(problem: OscillatoryProblem, omega: float) -> complex:
    ph = _quadratic(problem)
    u0 = float(problem.amplitude.regular(ph.p0))
    return math.sqrt(math.pi) * complex(np.exp(-0.25j * math.pi + 1j * omega * ph.c)) * u0


def singular_coefficient(problem: OscillatoryProblem, omega: float) -> complex:
    _quadratic(problem)
    mu = problem.amplitude.mu1
    u1 = float(problem.amplitude.regular(problem.p1))
    psi1 = float(problem.psi(problem.p1))
    return (gamma_real(mu) / 2.0 ** mu
            * complex(np.exp(0.5j * math.pi * mu + 1j * omega * psi1)) * u1)


# ---------------------------------------------------------------------------
# Ledgers
# ---------------------------------------------------------------------------

def _side1_ledger(mu: float, gamma: float, delta: float, L: float,
                  sup: float, sob: float) -> List[LedgerEntry]:
    g = L / (1.0 - gamma)
    return [
        LedgerEntry(2.0 ** (2 - mu) / mu * (2 - mu) * sob, 2 - mu, 1.0, "side1/R1"),
        LedgerEntry(2.0 ** (1 - mu) / mu * sob, 1 - mu, 1.0, "side1/R2"),
        LedgerEntry((1 - mu) * 2.0 ** (3 - mu) / 3.0 * sup, 4 - mu, 2.0, "side1/R3"),
        LedgerEntry(g * 2.0 ** (2 - mu) * (1 - mu) * sob, 1 + gamma - mu, delta, "side1/R4"),
        LedgerEntry(g * 2.0 ** (1 - mu) * sob, gamma - mu, delta, "side1/R5"),
        LedgerEntry(math.sqrt(math.pi) * 2.0 ** (2 - mu) * sup, 3 - mu, 1.5, "side1/R6"),
    ]


def _side2_ledger(mu: float, gamma: float, delta: float, L: float, length: float,
                  sob: float) -> List[LedgerEntry]:
    g = L / (1.0 - gamma) * length ** (1.0 - gamma)
    return [
        LedgerEntry(g * (1 - mu) * sob, 2 - mu, delta, "side2/R1"),
        LedgerEntry(g * sob, 1 - mu, delta, "side2/R2"),
    ]


def _resolve_delta(mu: float, delta: Optional[float]) -> Tuple[float, float, float]:
    if delta is None:
        delta = default_delta(mu)
    check_delta(mu, delta)
    gamma = 2.0 * delta - 1.0
    return delta, gamma, balance_for(1, 2.0, gamma).L


def expand_half(problem: OscillatoryProblem, side: int, omega: float,
                delta: Optional[float] = None) -> HalfExpansion:
    """Leading terms and remainder ledger for [p1, p0] (side 1) or [p0, p2] (side 2)."""
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    ph = _quadratic(problem)
    mu = problem.amplitude.mu1
    delta, gamma, L = _resolve_delta(mu, delta)
    sup, sob = _norms(problem)
    gap = ph.p0 - problem.p1
    half_h = LeadingTerm(0.5 * stationary_coefficient(problem, omega), mu - 1.0, -0.5,
                         "stationary/2")
    if side == 1:
        k = LeadingTerm(singular_coefficient(problem, omega), -mu, -mu, "singular")
        terms = (k, half_h)
        ledger = _side1_ledger(mu, gamma, delta, L, sup, sob)
    else:
        _check_root_at_p2(problem, sup)
        terms = (half_h,)
        ledger = _side2_ledger(mu, gamma, delta, L, problem.length, sob)
    return HalfExpansion(side, terms, tuple(ledger), gap, float(omega))


def expand_full(problem: OscillatoryProblem, omega: float,
                delta: Optional[float] = None) -> QuadraticExpansion:
    """Case-wise leading term(s) with the combined 9 / 8 / 9 entry ledger."""
    ph = _quadratic(problem)
    mu = problem.amplitude.mu1
    delta, gamma, L = _resolve_delta(mu, delta)
    sup, sob = _norms(problem)
    _check_root_at_p2(problem, sup)
    gap = ph.p0 - problem.p1
    case = classify(mu)
    h = LeadingTerm(stationary_coefficient(problem, omega), mu - 1.0, -0.5, "stationary")
    k = LeadingTerm(singular_coefficient(problem, omega), -mu, -mu, "singular")
    body = (_side1_ledger(mu, gamma, delta, L, sup, sob)
            + _side2_ledger(mu, gamma, delta, L, problem.length, sob))
    if case == CASE_ABOVE:
        leading = (h,)
        ledger = [LedgerEntry(gamma_real(mu) / 2.0 ** mu * sup, mu, mu, "singular")] + body
    elif case == CASE_HALF:
        leading = (h, k)
        ledger = body
    else:
        leading = (k,)
        ledger = [LedgerEntry(math.sqrt(math.pi) * sup, 1.0 - mu, 0.5, "stationary")] + body
    return QuadraticExpansion(case, leading, tuple(ledger), delta, gamma, gap, float(omega))


# ---------------------------------------------------------------------------
# Sub-problems (used to cross-check against the general cut-point expansion)
# ---------------------------------------------------------------------------

def half_problem(problem: OscillatoryProblem, side: int) -> OscillatoryProblem:
    """The half-interval problem in increasing-phase form.

    Side 2 is reflected by p -> -p, so it lives on [-p2, -p0].
    """
    ph = _quadratic(problem)
    amp = problem.amplitude
    if side == 1:
        sub = OscillatoryProblem(problem.p1, ph.p0, AmplitudeSpec(amp.mu1, 1.0, amp.regular), ph)
        return as_general(sub)
    if side != 2:
        raise ValueError("side must be 1 or 2")
    reflected = PowerFn(-problem.p1, -1.0, amp.mu1 - 1.0) * amp.regular.compose_affine(-1.0, 0.0)
    sub = OscillatoryProblem(-problem.p2, -ph.p0, AmplitudeSpec(1.0, 1.0, reflected),
                             QuadraticPhase(-ph.p0, ph.c))
    return as_general(sub)


# ---------------------------------------------------------------------------
# Curve regime
# ---------------------------------------------------------------------------

def leading_curve_exponent(mu: float, eps: float) -> float:
    case = classify(mu)
    if case == CASE_ABOVE:
        return -0.5 + eps * (1.0 - mu)
    if case == CASE_HALF:
        return -0.5 + 0.5 * eps
    return -mu + eps * mu


def exponent_inequalities(mu: float, eps: float, delta: Optional[float] = None
                          ) -> List[Tuple[str, float, float, bool]]:
    """One row per ledger entry: (label, entry exponent, leading exponent, entry < leading).

    Pure exponent arithmetic; the ledger constants play no role.
    """
    if delta is None:
        delta = default_delta(mu, eps)
    gamma = 2.0 * delta - 1.0
    entries = _side1_ledger(mu, gamma, delta, 1.0, 1.0, 1.0) + \
        _side2_ledger(mu, gamma, delta, 1.0, 1.0, 1.0)
    case = classify(mu)
    if case == CASE_ABOVE:
        entries = [LedgerEntry(1.0, mu, mu, "singular")] + entries
    elif case == CASE_BELOW:
        entries = [LedgerEntry(1.0, 1.0 - mu, 0.5, "stationary")] + entries
    lead = leading_curve_exponent(mu, eps)
    return [(e.label, e.curve_exponent(eps), lead, e.curve_exponent(eps) < lead)
            for e in entries]


@dataclass(frozen=True)
class CurveRegime:
    epsilon: float
    omega: float
    p0: float
    leading_exponent: float
    expansion: QuadraticExpansion
    exponents: Tuple[Tuple[float, float], ...]
    certificate: bool

    def leading_value(self) -> complex:
        """Sum of the leading coefficients times omega^leading_exponent."""
        return sum(t.coefficient for t in self.expansion.leading) * self.omega ** self.leading_exponent

    def bound_value(self) -> float:
        return sum(c * self.omega ** e for c, e in self.exponents)


def curve_problem(problem: OscillatoryProblem, eps: float, omega: float,
                  c_of_p0: Optional[Callable[[float], float]] = None) -> OscillatoryProblem:
    """Copy of ``problem`` with p0 = p1 + omega^(-eps)."""
    if not 0.0 < eps < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    ph = problem.phase
    if not isinstance(ph, QuadraticPhase):
        raise InvalidCaseError("phase is not quadratic")
    threshold = problem.length ** (-1.0 / eps)
    if not omega > threshold:
        raise ThresholdError(f"omega must exceed (p2-p1)^(-1/eps) = {threshold:.6g}")
    p0 = problem.p1 + omega ** (-eps)
    c = ph.c if c_of_p0 is None else float(c_of_p0(p0))
    return OscillatoryProblem(problem.p1, problem.p2, problem.amplitude, QuadraticPhase(p0, c))


def curve_regime(problem: OscillatoryProblem, eps: float, omega: float,
                 delta: Optional[float] = None,
                 c_of_p0: Optional[Callable[[float], float]] = None) -> CurveRegime:
    """Expansion along p0 = p1 + omega^(-eps), written in pure powers of omega."""
    moved = curve_problem(problem, eps, omega, c_of_p0)
    mu = moved.amplitude.mu1
    if delta is None:
        delta = default_delta(mu, eps)
    exp = expand_full(moved, omega, delta)
    lead = leading_curve_exponent(mu, eps)
    pairs = tuple((e.constant, e.curve_exponent(eps)) for e in exp.ledger)
    certificate = (delta > 0.5 + eps and (mu >= 0.5 or delta > mu)
                   and all(e < lead for _, e in pairs))
    return CurveRegime(eps, float(omega), moved.phase.p0, lead, exp, pairs, certificate)
