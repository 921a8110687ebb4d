import numpy as np
import pytest

import irkalab as il


@pytest.fixture
def two_pole_system() -> il.StateSpaceSystem:
    """Diagonal SSS system with poles {-1, -2} and unit residues."""
    return il.diagonal_sss([-1.0, -2.0], [1.0, 1.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
