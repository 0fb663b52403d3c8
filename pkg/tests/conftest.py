import math

import pytest

from crnoma.config import BASELINE, db_to_linear


@pytest.fixture
def baseline():
    return BASELINE


@pytest.fixture
def fig2_point():
    """Ideal network, no ITC, P_T = 10 dB."""
    return BASELINE.replace(p_t=db_to_linear(10.0), i_itc=math.inf)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
