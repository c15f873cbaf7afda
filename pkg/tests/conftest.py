import pytest
from hypothesis import settings

# statistical campaigns and compiled-kernel warmup make wall-clock
# deadlines meaningless here
settings.register_profile("no_deadline", deadline=None)
settings.load_profile("no_deadline")

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collector for one PASS/FAIL line per acceptance check."""
    return _acceptance_lines.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
