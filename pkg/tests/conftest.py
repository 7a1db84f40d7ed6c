import pytest

from riskmaps.acceptance import CampaignContext

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def campaign():
    """The built-in campaign on the frozen calibration, run once per session."""
    return CampaignContext.build()


@pytest.fixture
def report_criterion():
    def report(line):
        ACCEPTANCE_LINES.append(line)
        print(line)
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda ln: int(ln.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
