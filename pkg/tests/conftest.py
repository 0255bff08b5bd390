import numpy as np
import pytest

from fracalc.funcspec import Interval
from fracalc.special import Accuracy


@pytest.fixture(scope="session")
def unit():
    return Interval(0.0, 1.0)


@pytest.fixture(scope="session")
def acc():
    return Accuracy()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(90125)
