import numpy as np
import pytest

from concentra.bubbles import compute_constants
from concentra.domain import annulus, unit_ball


@pytest.fixture(scope="session")
def consts():
    return compute_constants()


@pytest.fixture(scope="session")
def ball():
    return unit_ball()


@pytest.fixture(scope="session")
def thin_annulus():
    return annulus(0.9)


@pytest.fixture(scope="session")
def thick_annulus():
    return annulus(0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
