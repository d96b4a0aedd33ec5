import numpy as np
import pytest

from .helpers import KET0, PLUS, QUBIT, WEIGHTED, make_state


@pytest.fixture
def qubit():
    return QUBIT


@pytest.fixture
def weighted():
    return WEIGHTED


@pytest.fixture
def diagonal_pair():
    return make_state(QUBIT, np.diag([0.5, 0.5])), make_state(QUBIT, np.diag([0.75, 0.25]))


@pytest.fixture
def pure_pair():
    return make_state(QUBIT, KET0), make_state(QUBIT, PLUS)
