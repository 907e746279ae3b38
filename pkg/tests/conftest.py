import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sparse_ramsey.ensemble import EnsembleSpec, sample_gnp  # noqa: E402
from sparse_ramsey.experiments import colour_edges  # noqa: E402


@pytest.fixture(scope="session")
def host800():
    g = sample_gnp(EnsembleSpec(800, 0.3, 1))
    return g, colour_edges(g, "random", 2, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture
def acceptance():
    """Record one criterion outcome; the summary lists them after the run."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"CRITERION {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE.append((number, ok, line))

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
