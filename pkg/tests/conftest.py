import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from calmeasure.core import ScoredDataset

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def datasets(draw, max_n=60, tie_heavy=False):
    """Small scored datasets; ``tie_heavy`` draws scores from a coarse grid."""
    n = draw(st.integers(1, max_n))
    if tie_heavy:
        scores = draw(st.lists(st.sampled_from([0.0, 0.125, 0.25, 0.5, 0.75, 1.0]), min_size=n, max_size=n))
    else:
        scores = draw(
            st.lists(st.floats(0, 1, allow_nan=False, allow_subnormal=False), min_size=n, max_size=n)
        )
    labels = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return ScoredDataset.from_arrays(scores, labels)


def random_dataset(rng: np.random.Generator, n: int, grid: int | None = None) -> ScoredDataset:
    """Uniform scores (optionally snapped to ``grid`` levels), labels ~ Bernoulli(score)."""
    s = rng.random(n)
    if grid:
        s = np.round(s * grid) / grid
    y = (rng.random(n) < s).astype(int)
    return ScoredDataset.from_arrays(s, y)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# One line per acceptance criterion, collected by tests/test_acceptance.py.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
