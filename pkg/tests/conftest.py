from pathlib import Path

import numpy as np
import pytest

from probqos import HPolytope

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def unit_square() -> HPolytope:
    return HPolytope(
        np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]]),
        np.array([0.0, 1.0, 0.0, 1.0]),
        ("x", "y"),
    )


def pytest_terminal_summary(terminalreporter):
    # Echo the acceptance-gate verdicts even when stdout capture is on.
    try:
        import test_acceptance
    except ImportError:
        return
    lines = getattr(test_acceptance, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def triangle() -> HPolytope:
    # x >= 0, y >= 0, x + y <= 1
    return HPolytope(
        np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]]),
        np.array([0.0, 0.0, 1.0]),
        ("x", "y"),
    )
