import numpy as np
import pytest

from spps.spectral import SLProblemSpec


def example_spec(N=100, M=3000, **kw):
    """``-u'' = lambda u`` on (0, pi), ``u(0) = 0``, ``u(pi) = -lambda^2 u(pi)``."""
    return SLProblemSpec(0.0, np.pi, q=0.0, beta1=1.0, beta1p=1.0, phi_poly=(0, 0, -1),
                         N=N, M=M, convention="schrodinger", **kw)


@pytest.fixture(scope="session")
def example_poly():
    from spps.spectral import char_polynomial, problem_family

    spec = example_spec()
    return char_polynomial(spec, problem_family(spec))


_ACCEPTANCE = []
_SESSION_START = []


def pytest_sessionstart(session):
    import time

    _SESSION_START.append(time.perf_counter())


@pytest.fixture
def acceptance():
    """``record(label, passed, detail)`` prints a pass/fail line and keeps it for the summary."""

    def record(label, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    import time

    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)
    elapsed = time.perf_counter() - _SESSION_START[0]
    ok = elapsed <= 300
    terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] full test session runtime: {elapsed:.1f} s (limit 300 s)")
