import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from texnoise.synth import shepp_logan


@pytest.fixture(scope="session")
def phantom128():
    return shepp_logan(128, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
