import numpy as np
import pytest

from loccdist.statekit import PureState

SQRT_HALF = 1 / np.sqrt(2)


@pytest.fixture
def ket00():
    return PureState.basis([2, 2], (0, 0))


@pytest.fixture
def bell():
    return PureState([2, 2], np.array([1, 0, 0, 1]) * SQRT_HALF)


@pytest.fixture
def qubit_pair():
    """|0> and |+>, overlap 1/sqrt(2)."""
    return PureState([2], [1, 0]), PureState([2], np.array([1, 1]) * SQRT_HALF)
