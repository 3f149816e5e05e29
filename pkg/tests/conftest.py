import math

import numpy as np
import pytest

from diracsim.hamiltonians import DriveParams, mhz
from diracsim.hilbert import TruncationSpec

G = mhz(10.0)
SQRT2 = math.sqrt(2)


@pytest.fixture(scope="session")
def trunc20():
    return TruncationSpec(20)


@pytest.fixture(scope="session")
def trunc40():
    return TruncationSpec(40)


@pytest.fixture(scope="session")
def params_massless():
    return DriveParams.resonant_mode(lam=0.0)


@pytest.fixture(scope="session")
def params_light():
    return DriveParams.resonant_mode(lam=SQRT2 * G)


@pytest.fixture(scope="session")
def params_heavy():
    return DriveParams.resonant_mode(lam=4 * SQRT2 * G)


@pytest.fixture
def rng():
    return np.random.default_rng(11)
