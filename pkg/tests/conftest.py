import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ptdoublet import ContourGrid, EpsilonProfile, build_grid, default_grid

settings.register_profile(
    "suite",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def grid() -> ContourGrid:
    """Reference contour: constant shift eps0 = 1, t in [-12, 12], 2001 points."""
    return default_grid()


@pytest.fixture(scope="session")
def small_grid() -> ContourGrid:
    """Coarse contour for cheap structural checks."""
    return build_grid(EpsilonProfile.constant(1.0), -12.0, 12.0, 201)


@pytest.fixture(scope="session")
def shallow_grid() -> ContourGrid:
    """Contour with eps0 = 0.1, where the t = 0 branch values are frozen."""
    return build_grid(EpsilonProfile.constant(0.1), -12.0, 12.0, 2001)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(91823)
