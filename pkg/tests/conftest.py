import math
import sys

import pytest

from qtele import quadcore as qc

AMP, PHASE = 0.0, math.pi / 2


@pytest.fixture
def coherent_input():
    return qc.field_of(qc.make_source("signal-carrier", 1, 1, 4, 4), 1.0)


@pytest.fixture
def vac():
    return qc.field_of(qc.vacuum())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
