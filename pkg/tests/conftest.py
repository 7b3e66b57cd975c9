import numpy as np
import pytest

from fractal_fft.fixtures import FIXTURES


@pytest.fixture(params=sorted(FIXTURES))
def any_system(request):
    return FIXTURES[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def max_level(K: int, cap: int) -> int:
    N = 1
    while K ** (N + 1) <= cap:
        N += 1
    return N
