import numpy as np
import pytest

from miptlab.clifford_group import get_table


@pytest.fixture(scope="session")
def clifford_table():
    return get_table()


@pytest.fixture()
def rng():
    return np.random.default_rng(20181102)
