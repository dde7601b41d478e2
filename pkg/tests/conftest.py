import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def naive_k(a):
    """Oracle: K straight from the defining quotient, no stabilization."""
    a = np.asarray(a, dtype=complex)
    c = a @ a.conj().T - a.conj().T @ a
    num = np.sum(np.abs(c) ** 2)
    n2 = np.sum(np.abs(a) ** 2)
    return num / (n2 ** 2 - abs(np.trace(a @ a)) ** 2)


def c_direct(parts):
    """Oracle: C_pi as a float by direct summation."""
    return 12.0 / sum(k * (k * k - 1) for k in parts)


#: (criterion number, passed, summary line) filled in by test_acceptance.py
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
