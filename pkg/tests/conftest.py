import numpy as np
import pytest

from rpsbr.core import GameParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=[(0.5, 0.8), (1.0, 0.8), (2.0, 0.6), (0.25, 0.9)], ids=lambda p: f"a{p[0]}-l{p[1]}")
def game(request):
    alpha, lam = request.param
    return GameParams.from_alpha(alpha, lam)
