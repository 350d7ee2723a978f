import warnings

import pytest
from hypothesis import settings

from bubblekit.config import PotentialSpec, SystemConfig
from bubblekit.ground_state import solve_ground_state

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

WELL = PotentialSpec(r0=1.0, c=1.0, m=2.0, delta=0.9)


@pytest.fixture(scope="session")
def flat5():
    return SystemConfig.symmetric(5)


@pytest.fixture(scope="session")
def well5(flat5):
    return flat5.with_potentials(WELL, WELL)


@pytest.fixture(scope="session")
def gs_sym(flat5):
    return solve_ground_state(flat5)


@pytest.fixture(scope="session")
def gs_asym():
    return solve_ground_state(SystemConfig.from_p(5, 2.25))


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield
