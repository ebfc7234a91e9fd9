import math

import pytest

from twrelay.channel import ChannelGains, PowerBudget


def sq(g12, g1r, g21, g2r, gr1, gr2):
    """Gains from squared amplitudes, in the usual argument order."""
    return ChannelGains.from_squared(g12, g1r, g21, g2r, gr1, gr2)


@pytest.fixture
def unit_power():
    return PowerBudget(1.0, 1.0, 1.0)


LOG2_3 = math.log2(3)
LOG2_7 = math.log2(7)


# one summary line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
