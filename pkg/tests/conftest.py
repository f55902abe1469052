import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from branchlab import generate_random  # noqa: E402


@pytest.fixture(scope="session")
def random_200_600():
    return generate_random(200, 600, 42)


@pytest.fixture(scope="session")
def random_500_1500():
    return generate_random(500, 1500, 7)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
