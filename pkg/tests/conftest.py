import random

import pytest
from hypothesis import HealthCheck, settings

from fibcat import fixtures as fx
from fibcat.generators import random_fibration

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def pi():
    return fx.fixture_fibration()


@pytest.fixture
def rho():
    return fx.twisted_fibration()


@pytest.fixture(params=["pi", "rho", "terminal"])
def any_fixture(request):
    return {"pi": fx.fixture_fibration, "rho": fx.twisted_fibration, "terminal": fx.terminal_fibration}[request.param]()


@pytest.fixture(scope="session")
def random_fibrations():
    """A fixed population standing in for "generated fibrations" in module tests."""
    rng = random.Random(7)
    return [random_fibration(rng, max_arrows=25) for _ in range(60)]
