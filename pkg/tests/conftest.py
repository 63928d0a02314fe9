import pytest

from kmseg import kernels

ACCEPTANCE_LINES = []


@pytest.fixture(params=kernels.available())
def backend(request):
    """Run the test once per importable kernel backend."""
    previous = kernels.BACKEND
    kernels.use(request.param)
    yield request.param
    kernels.use(previous)


@pytest.fixture
def record(request):
    """Append a PASS/FAIL line for an acceptance criterion to the summary."""
    def _record(criterion, passed, detail):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] {criterion}: {detail}")
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
