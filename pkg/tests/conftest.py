"""Shared test configuration: deterministic hypothesis profile and fixtures."""

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "deterministic",
    deadline=None,
    derandomize=True,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")


@pytest.fixture(scope="session")
def std_grid():
    from levygen import Grid

    return Grid(center=0.0, half_width=20.0, n=1024)


@pytest.fixture(scope="session")
def gaussian_fam():
    from levygen import make_family

    return make_family("gaussian_bump", center=0.0, width=1.0)
