import sys

import numpy as np
import pytest

from cutlimits import named_distribution, population_graph
from cutlimits.graph import product_graph

from oracles import random_product_graph


@pytest.fixture
def square_grid():
    """Uniform 2x2 grid; with t=1 its graph is the 4-cycle 0-1-3-2-0."""
    return named_distribution("uniform", shape=(2, 2))


@pytest.fixture
def square_graph(square_grid):
    return population_graph(square_grid, 1)


@pytest.fixture
def bimodal():
    return named_distribution("bimodal3x3", eps=0.4)


@pytest.fixture
def bimodal_graph(bimodal):
    return population_graph(bimodal, 1)


def make_random_graphs(count, seed=2024, max_m=8):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        m = int(rng.integers(2, max_m + 1))
        x, adj = random_product_graph(rng, m, density=rng.uniform(0.1, 0.9))
        out.append(product_graph(x, adj, "population"))
    return out


@pytest.fixture(scope="session")
def random_graphs():
    return make_random_graphs(100)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
