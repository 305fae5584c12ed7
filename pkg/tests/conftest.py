import hypothesis
import numpy as np
import pytest

from srlab import SystemParams, generate_spoke_target
from srlab.scenario import default_scenario

hypothesis.settings.register_profile(
    "srlab", max_examples=25, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("srlab")


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture(scope="session")
def star_target(scenario):
    """The desk-scale HR star target (pitch 1)."""
    return generate_spoke_target(scenario.star, scenario.grid_size)


@pytest.fixture(scope="session")
def nominal_params():
    return SystemParams()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
