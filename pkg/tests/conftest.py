import numpy as np
import pytest

from models import BcdOptions, GdOptions
from scenario import dbm_to_watts, default_params, sample_scenario


@pytest.fixture
def params():
    return default_params()


@pytest.fixture
def rng():
    return np.random.default_rng(20250417)


@pytest.fixture
def make_instance():
    """Factory for normalized random (G, p, sigma2) instances."""

    def _make(rng, N, M, sigma2=1.0, p_low=0.05, p_high=2.0):
        G = (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M))) / np.sqrt(2.0)
        p = rng.uniform(p_low, p_high, size=M)
        return G, p, sigma2

    return _make


@pytest.fixture
def scenario(params):
    return sample_scenario(7, params, 4, 4, dbm_to_watts(10.0))


@pytest.fixture
def quick_bcd():
    """Short BCD settings for tests that only need a few passes."""
    return BcdOptions(tol=1e-4, max_iters=8, gd=GdOptions(max_sweeps=5))
