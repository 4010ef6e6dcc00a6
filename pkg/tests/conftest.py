import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ppboundary import models  # noqa: E402
from ppboundary.algebra import kraus_to_superop  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def pinching():
    k = models.pinching_kraus()
    return kraus_to_superop(k), k


@pytest.fixture(scope="session")
def qtau_map():
    k = models.qtau_kraus()
    return kraus_to_superop(k), k


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria from the project brief")
