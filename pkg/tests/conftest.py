import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Records a one-line verdict for an acceptance criterion."""

    def report(name, passed, detail):
        ACCEPTANCE_LINES.append(f"{name:4s} {'PASS' if passed else 'FAIL'}  {detail}")

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
