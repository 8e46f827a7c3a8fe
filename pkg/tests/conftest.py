import json
from pathlib import Path

import pytest

from phasekit.core_model import AmplitudeSpec, OscillatoryProblem, Polynomial, QuadraticPhase, constant
from phasekit.schrodinger import InitialData

FIXTURES = Path(__file__).parent / "fixtures"


def load_derived():
    return json.loads((FIXTURES / "derived_values.json").read_text())


def as_complex(pair):
    return complex(pair[0], pair[1])


def singular_stationary(d=1.0, mu=0.75, p1=0.0):
    """(p - p1)^(mu-1) against -(p - p2)^2 on [p1, p1 + d]: singular left end, stationary right end."""
    p2 = p1 + d
    return OscillatoryProblem(p1, p2, AmplitudeSpec(mu, 1.0, constant(1.0)), QuadraticPhase(p2, 0.0))


def interior_quadratic(mu, gap, p1=1.0, p2=2.0, coeffs=(2.0, -1.0)):
    """Quadratic phase with its stationary point gap to the right of p1; u = 2 - p by default."""
    return OscillatoryProblem(p1, p2, AmplitudeSpec(mu, 1.0, Polynomial(coeffs)),
                              QuadraticPhase(p1 + gap, 0.0))


def band_data(mu):
    return InitialData.from_polynomial(mu, 1.0, 2.0, [2.0, -1.0])


@pytest.fixture(scope="session")
def derived():
    return load_derived()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
