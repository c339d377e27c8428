import numpy as np
import pytest

from hitchin_acs import acs

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Log one acceptance line; printed in the terminal summary."""

    def _record(criterion: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ao_minus_samples():
    return [acs.sample(1000 + i, require_AO_minus=True) for i in range(25)]
