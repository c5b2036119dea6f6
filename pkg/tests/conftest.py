import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from capcover.grid import FREE, OBSTACLE, GridMap, parse_map  # noqa: E402

DATA = Path(__file__).parent / "data"


def known_map(text: str) -> GridMap:
    """A map whose known view equals its truth (everything already sensed)."""
    gm = parse_map(text)
    gm.known[:] = np.where(gm.truth, OBSTACLE, FREE)
    return gm


def random_truth(rng: np.random.Generator, rows: int, cols: int, density: float) -> np.ndarray:
    return rng.random((rows, cols)) < density


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[n])
