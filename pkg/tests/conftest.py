import mpmath
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("arcwise", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("arcwise")


@pytest.fixture(autouse=True)
def _mp256():
    old = mpmath.mp.prec
    mpmath.mp.prec = 256
    yield
    mpmath.mp.prec = old
