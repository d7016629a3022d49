import numpy as np
import pytest

from hyperfa import specfun


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay any JIT compilation cost before timed tests run
    nu = np.array([0.5, -1.5, 3.0])
    x = np.array([0.2, 1.0, 40.0])
    specfun.log_bessel_k(nu, x)
    specfun.dlogk_dnu(nu, x)
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
