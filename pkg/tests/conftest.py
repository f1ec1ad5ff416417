import pytest

from swexner.exact import ExactSolution
from swexner.sediment_laws import GrassLaw

_CRITERIA = []


@pytest.fixture
def grass():
    return GrassLaw(0.005)


@pytest.fixture
def bench_sol(grass):
    """Grass benchmark: q=1, A_g = alpha = beta = 0.005, C=1."""
    return ExactSolution(q=1.0, alpha=0.005, beta=0.005, C=1.0, law=grass)


@pytest.fixture
def criterion():
    """Record one acceptance criterion outcome for the terminal summary."""

    def record(number, name, passed, detail=""):
        _CRITERIA.append((number, name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name}: {detail}")
