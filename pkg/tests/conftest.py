import pytest

from mcaoi import kernels

ACCEPTANCE_LINES = []


@pytest.fixture(params=sorted(kernels.implementations()))
def impl(request):
    """Each kernel backend available in this build."""
    return kernels.implementations()[request.param]


@pytest.fixture
def record_acceptance():
    def record(number, name, passed, detail):
        status = "PASS" if passed else "FAIL"
        if passed is None:
            status = "REPORT"
        ACCEPTANCE_LINES.append(f"criterion {number:>2} [{status}] {name}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
