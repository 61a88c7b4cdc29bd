import hypothesis
import pytest

from countgof.models import Inar1, Poisson, simulate

hypothesis.settings.register_profile(
    "suite", deadline=None, max_examples=50,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("suite")


@pytest.fixture(scope="session")
def inar1_series_100():
    """A fixed null INAR(1) series reused across modules."""
    return simulate(Inar1(0.6, Poisson(4.0)), 100, seed=42)
