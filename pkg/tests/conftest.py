import pytest

from deltawalk.model import OneParticleParams, TwoParticleParams


@pytest.fixture
def pair():
    return TwoParticleParams(1.0, 2.0, 3.0, 1)


@pytest.fixture
def single():
    return OneParticleParams(1.0, 2.0, 1)
