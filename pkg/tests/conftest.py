import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from quasih.dynamics import StateH1, Trajectory
from quasih.model import ModelParams, random_unitary2

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def params(draw, diagonal=True):
    g = draw(st.floats(0.3, 3.0))
    kappa = g * draw(st.floats(-0.95, 0.95))
    nu = draw(st.floats(0.1, 3.0))
    n = draw(st.integers(1, 16))
    x1 = draw(st.floats(0.2, 5.0))
    x2 = x1 if diagonal else draw(st.floats(0.2, 5.0))
    return ModelParams(nu, g, kappa, n, x1, x2)


@st.composite
def trajectories(draw):
    p = draw(params(diagonal=True))
    alpha = draw(st.floats(0.0, 1.0))
    ph1, ph2 = draw(st.floats(0, 2 * math.pi)), draw(st.floats(0, 2 * math.pi))
    w = random_unitary2(draw(st.integers(0, 2**32)))
    return Trajectory(p, StateH1.from_alpha(p, alpha, ph1, ph2), w)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240611))


@pytest.fixture
def base_params():
    """g = 1, kappa = 0.6, nu = 1, N = 1, x = 1 with real amplitudes."""
    return ModelParams(nu=1.0, g=1.0, kappa=0.6)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance(capsys):
    """Record and print one PASS/FAIL line per acceptance criterion."""

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
