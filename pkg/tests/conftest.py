import functools

import pytest

from parabolic_weingarten.ode import integrate
from parabolic_weingarten.presets import PRESETS, preset


@functools.lru_cache(maxsize=None)
def traced(key: str):
    p = preset(key)
    return integrate(p.relation, p.init)


@pytest.fixture(scope="session")
def preset_trace():
    return traced


@pytest.fixture(scope="session", params=[p.key for p in PRESETS])
def any_preset(request):
    return preset(request.param), traced(request.param)
