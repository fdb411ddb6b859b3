import numpy as np
import pytest

from spintop.core import DensityMatrix

import _acceptance_log


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> DensityMatrix:
    """Full-rank random state from a Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260822)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_log.LINES:
            terminalreporter.write_line(line)
