import functools

import pytest
from hypothesis import HealthCheck, settings

from gaq.group_model import registry_get

settings.register_profile(
    "gaq",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    derandomize=True,
)
settings.load_profile("gaq")

GROUPS = ("heisenberg-weyl", "su2", "harmonic-oscillator")


@functools.lru_cache(maxsize=None)
def spec(name: str, **pins):
    s = registry_get(name)
    return s.with_pins(**pins) if pins else s


@pytest.fixture(scope="session")
def hw():
    return spec("heisenberg-weyl")


@pytest.fixture(scope="session")
def su2():
    return spec("su2")


@pytest.fixture(scope="session")
def osc():
    return spec("harmonic-oscillator")


@pytest.fixture(scope="session")
def schr():
    return spec("schrodinger-algebra")
