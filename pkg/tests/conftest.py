from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from krselect.measures import AtomicMeasure, PointSet

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


def weights_strategy(n: int):
    return st.lists(st.floats(0.0, 10.0, allow_nan=False), min_size=n, max_size=n).filter(
        lambda w: sum(w) > 1e-3
    )


@st.composite
def measure_pair(draw, max_n: int = 8, scalar: bool = True):
    """Two probability measures on a shared random scalar support."""
    n = draw(st.integers(1, max_n))
    vals = draw(st.lists(st.integers(-40, 40), min_size=n, max_size=n, unique=True))
    ps = PointSet.from_values([v / 4 for v in vals])
    w1 = np.array(draw(weights_strategy(n)))
    w2 = np.array(draw(weights_strategy(n)))
    return AtomicMeasure(ps, w1 / w1.sum()), AtomicMeasure(ps, w2 / w2.sum())


def rand_probs(rng: np.random.Generator, n: int, sparsity: float = 0.8) -> np.ndarray:
    w = rng.random(n) * (rng.random(n) < sparsity)
    w[rng.integers(n)] += 1e-3
    return w / w.sum()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
