import numpy as np
import pytest

from nsch.potential import PotentialParams
from nsch.spectral import Grid


@pytest.fixture
def grid8():
    return Grid(8)


@pytest.fixture
def grid32():
    return Grid(32)


@pytest.fixture
def params():
    """Reference coefficients used throughout the worked examples."""
    return PotentialParams(alpha0=1.0, alpha=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
