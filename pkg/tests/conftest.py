import math

import pytest
from sympy.solvers.diophantine.diophantine import diop_DN


def squarefree_nonsquare(d: int) -> bool:
    if d < 2:
        return False
    p = 2
    while p * p <= d:
        if d % (p * p) == 0:
            return False
        p += 1
    return True


def sympy_pell(d: int, N: int = 1):
    """Fundamental solution of x^2 - d y^2 = N from sympy, or None."""
    sols = diop_DN(d, N)
    return min(sols, key=lambda s: abs(s[1])) if sols else None


@pytest.fixture(scope="session")
def small_squarefree():
    return [d for d in range(2, 2000) if squarefree_nonsquare(d)]


_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion and assert it."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        _VERDICTS.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
