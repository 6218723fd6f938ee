"""Shared fixtures: moderate-size grids and transformers, cached per session."""

import numpy as np
import pytest

from hyperball.grids import frequency_grid, transform_grid
from hyperball.spectral import RadialTransformer

_cache = {}


def make_transformer(n, lambda_max=30.0, rho_max=12.0):
    key = (n, lambda_max, rho_max)
    if key not in _cache:
        grid = transform_grid(n, rho_max=rho_max, panels_log=15, panels_lin=60, order=12)
        freq = frequency_grid(n, lambda_max=lambda_max, panels=36, order=12)
        _cache[key] = RadialTransformer(grid, freq)
    return _cache[key]


@pytest.fixture(scope="session")
def transformer3():
    return make_transformer(3)


@pytest.fixture(scope="session")
def transformer4():
    return make_transformer(4)


@pytest.fixture(scope="session")
def transformer6():
    return make_transformer(6)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
