import pytest

from mfbm_asian import ModelParams


@pytest.fixture
def jump_model():
    return ModelParams(s0=100.0, r=0.05, q=0.01, sigma=0.2, epsilon=0.1, hurst=0.8,
                       lam=0.5, mu_j=-0.1, sigma_j=0.2)


@pytest.fixture
def bs_model():
    """Plain Black-Scholes dynamics: no fractional part, no jumps."""
    return ModelParams(s0=100.0, r=0.05, q=0.0, sigma=0.2)
