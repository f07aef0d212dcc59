import numpy as np
import pytest

from sinrbal import LayoutConfig, NetworkConfig, db2lin, generate_channels
from sinrbal.experiments import _trial_rng


@pytest.fixture(scope="session")
def desk_cfg():
    """B=2, 2 users per cell, T=8, P=5 dB, unit noise and weights."""
    return NetworkConfig.uniform(2, 2, 8, db2lin(5.0))


@pytest.fixture(scope="session")
def small_cfg():
    # single cell, quick solves
    return NetworkConfig.uniform(1, 2, 4, 2.0)


@pytest.fixture(scope="session")
def flat_layout():
    return LayoutConfig(use_large_scale=False)


@pytest.fixture()
def desk_channels(desk_cfg, flat_layout):
    return generate_channels(flat_layout, desk_cfg, _trial_rng(0, (0, 0, 8)))


@pytest.fixture()
def small_channels(small_cfg, flat_layout):
    return generate_channels(flat_layout, small_cfg, _trial_rng(0, (0, 0, 4)))


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
