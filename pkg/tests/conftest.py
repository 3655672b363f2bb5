from __future__ import annotations

import numpy as np
import pytest

from betapot.metric import BetaParams


@pytest.fixture
def iso2() -> BetaParams:
    return BetaParams.isotropic(2)


@pytest.fixture
def aniso2() -> BetaParams:
    return BetaParams((1.0, 1.5))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
