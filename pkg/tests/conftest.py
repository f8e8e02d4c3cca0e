import numpy as np
import pytest

from acidlab.forward.fourier import FourierModel
from acidlab.forward.masks import make_mask
from acidlab.forward.radon import RadonModel, uniform_geometry
from acidlab.lab.phantoms import make_phantom, random_phantom_spec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def full_model_16():
    return FourierModel(make_mask("full", 1.0, 16, 0))


@pytest.fixture
def gaussian_model_16():
    return FourierModel(make_mask("gaussian2d", 0.4, 16, 7))


@pytest.fixture
def gaussian_model_8():
    return FourierModel(make_mask("gaussian2d", 0.5, 8, 3))


@pytest.fixture
def radon_model_16():
    return RadonModel(uniform_geometry(16, 10))


@pytest.fixture
def phantom_16():
    return make_phantom(random_phantom_spec(4, 2), 16)


@pytest.fixture
def phantom_8():
    return make_phantom(random_phantom_spec(3, 5), 8)
