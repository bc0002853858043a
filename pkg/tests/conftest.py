import numpy as np
import pytest

import psglab as pg


def pytest_addoption(parser):
    parser.addoption("--skip-slow", action="store_true",
                     help="skip the long-running acceptance sweeps")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance checks")


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--skip-slow"):
        return
    skip = pytest.mark.skip(reason="--skip-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def medium_unit():
    return pg.MediumParams(epsilon=1.0, a=1.0, c=2.0)   # b = 4


@pytest.fixture(scope="session")
def medium_small_eps():
    return pg.MediumParams(epsilon=1e-2, a=1.0, c=1.0)  # b = 100


@pytest.fixture(scope="session")
def kink():
    return pg.TravellingWave.create(0.0, 1.0, 0.0)


@pytest.fixture(scope="session")
def small_grid():
    return pg.SpaceTimeGrid(-12.0, 12.0, 97, 0.5, 26)


@pytest.fixture(scope="session")
def small_table(medium_small_eps, small_grid):
    return pg.build_kernel_table(medium_small_eps, small_grid)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
