import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, text, info=())`` records and prints one result line, then asserts."""

    def record(n, ok, text, info=()):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}"
        ACCEPTANCE_LINES[n] = [line] + [f"              {i}" for i in info]
        print("\n".join(ACCEPTANCE_LINES[n]))
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        for line in ACCEPTANCE_LINES[n]:
            terminalreporter.write_line(line)
