import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def hermitian(rng, n, real=False):
    a = rng.standard_normal((n, n))
    if not real:
        a = a + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


ACCEPTANCE_RESULTS = []


def record_criterion(number, title, passed, detail):
    line = f"CRITERION {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_RESULTS.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
