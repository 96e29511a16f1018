"""Shared fixtures and the acceptance-report terminal hook."""

import math

import pytest

from qvsp import K_DRUDE, NA_ATOM, NanosphereScatterer, RotationSpec

# (name, passed, detail) tuples recorded by the acceptance tests; printed
# in the terminal summary so every criterion shows one pass/fail line even
# when pytest captures stdout.
ACCEPTANCE_RECORDS: list[tuple[str, bool, str]] = []


@pytest.fixture
def atom():
    return NA_ATOM


@pytest.fixture
def sphere50():
    return NanosphereScatterer(radius=50e-9, material=K_DRUDE)


@pytest.fixture
def sphere35():
    return NanosphereScatterer(radius=35e-9, material=K_DRUDE)


@pytest.fixture
def rot():
    return RotationSpec.about_z(2.0 * math.pi * 5e9)


@pytest.fixture
def record_acceptance():
    """Recorder used by the acceptance tests: call before asserting."""

    def _record(name: str, passed: bool, detail: str):
        ACCEPTANCE_RECORDS.append((name, passed, detail))

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RECORDS:
        return
    terminalreporter.section("acceptance checks")
    for name, passed, detail in ACCEPTANCE_RECORDS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}: {detail}")
