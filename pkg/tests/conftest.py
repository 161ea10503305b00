import pytest

_LINES = []


@pytest.fixture
def report_line():
    """Record a one-line verdict shown in the terminal summary."""
    return _LINES.append


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
