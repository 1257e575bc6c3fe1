import numpy as np
import pytest

from fracmollify import PipelineConfig, make_grid
from fracmollify.experiments import exact_data

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def cfg():
    return PipelineConfig()


@pytest.fixture(scope="session")
def grid(cfg):
    return cfg.grid


@pytest.fixture(scope="session")
def example1(cfg):
    return exact_data(1, cfg.grid, cfg.exact_model)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(2, 10.0, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def record():
    def _record(number, passed, detail):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append((number, f"criterion {number:2d}: {status}  {detail}"))
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
