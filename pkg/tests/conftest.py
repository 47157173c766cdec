import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from logsplit import DomainSpec, GaussonSpec, gausson_field

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Sweeps inside the test process stay serial unless the caller opts in.
os.environ.setdefault("LOGSPLIT_WORKERS", "1")

B1 = math.pi ** -0.25


@pytest.fixture(scope="session")
def domain1d():
    return DomainSpec.cube(1, 16.0, 1 / 64)


@pytest.fixture(scope="session")
def gausson1d():
    return GaussonSpec(lam=-1.0, b=B1, v=(1.0,))


@pytest.fixture(scope="session")
def u0(domain1d, gausson1d):
    return gausson_field(gausson1d, domain1d, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    """Emit one PASS/FAIL line, shown inline and repeated in the terminal summary."""
    def emit(passed: bool, label: str, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed
    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
