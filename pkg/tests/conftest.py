import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from transportc.graph_model import ExpressionGraph

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("default")

NINE_EDGES = [(1, 3), (1, 4), (2, 3), (3, 5), (3, 6), (4, 7), (5, 8), (6, 9), (7, 9)]

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_from(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture
def nine() -> ExpressionGraph:
    return ExpressionGraph.build(NINE_EDGES)


@pytest.fixture
def example_h() -> ExpressionGraph:
    # drawn top to bottom, so out-orders follow the figure's vertical order
    return ExpressionGraph.build(
        [(10, 13), (11, 12), (10, 14), (12, 14), (12, 15), (13, 15), (13, 16)],
        vertices=[str(i) for i in range(10, 17)],
        source_order=["10", "11"],
        out_orders={"10": ["14", "13"], "11": ["12"], "12": ["14", "15"], "13": ["15", "16"]},
    )


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.line(k))
