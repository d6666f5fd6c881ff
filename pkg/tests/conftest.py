from __future__ import annotations

import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", help="run long acceptance simulations")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return

    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def chain():
    from squeeze_tools import build_lattice

    return build_lattice(8)


@pytest.fixture(scope="session")
def cube():
    from squeeze_tools import build_lattice

    return build_lattice((4, 4, 4))


@pytest.fixture(scope="session")
def couplings():
    from squeeze_tools import SpinCouplings

    return SpinCouplings.from_ratios(-0.18, -1.1)


@pytest.fixture()
def app():
    from squeeze_tools.cli import app

    return app


@pytest.fixture()
def runner(app, tmp_path):
    from squeeze_tools.tests import CLIRunner

    return CLIRunner(app, tmp_path)
