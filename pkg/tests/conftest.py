import pytest

from rbo.schedule import BroadcastCycle

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_log():
    """Append one verdict line per acceptance criterion; printed at the end."""
    return _ACCEPTANCE.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture
def cycle8():
    """The k=3 cycle 10, 20, ..., 80 used by the worked examples."""
    return BroadcastCycle(3, (10, 20, 30, 40, 50, 60, 70, 80))
