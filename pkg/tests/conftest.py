import functools

import pytest
from hypothesis import HealthCheck, settings

from twomatrix.equilibrium_measures import equilibrium_triple
from twomatrix.spectral_curve import ModelParams

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# one parameter point per case of the phase diagram
CASE_POINTS = {
    "I": (0.0, 1.0),
    "II": (-2.0, 0.5),
    "III": (-2.0, 1.4),
    "IV": (0.0, 2.0),
}
EL_POINTS = [(0.0, 1.0), (-2.0, 1.0), (3.0, 1.0), (-2.0, 1.4)]


@functools.lru_cache(maxsize=None)
def params(t, tau):
    return ModelParams(t, tau)


@functools.lru_cache(maxsize=None)
def triple(t, tau):
    return equilibrium_triple(params(t, tau))


ACCEPTANCE_LINES = {}


@pytest.fixture
def record_criterion():
    """Store a one-line verdict for an acceptance criterion and echo it."""

    def record(number, passed, detail):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
