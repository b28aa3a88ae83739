from pathlib import Path

import numpy as np
import pytest

from lvdcflow import load_grid, prepare

CASES = Path(__file__).resolve().parents[1] / "cases"
FEEDER10 = CASES / "feeder10.grid"
TWO_NODE = CASES / "two_node.grid"

# (1 + sqrt(1 - 4 * 0.1 * 1.0)) / 2
TWO_NODE_V = 0.5 * (1.0 + 0.6**0.5)


@pytest.fixture
def feeder():
    return load_grid(FEEDER10)


@pytest.fixture
def feeder_prep(feeder):
    return prepare(feeder)


@pytest.fixture
def two_node():
    return load_grid(TWO_NODE)


@pytest.fixture
def two_node_prep(two_node):
    return prepare(two_node)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
