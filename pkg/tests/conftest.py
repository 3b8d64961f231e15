import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from shocklab.fluxes import NumericalFlux, burgers
from shocklab.fronts import StepFunction

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion number -> (passed, detail); filled by the acceptance tests
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture
def flux():
    return burgers()


@pytest.fixture(params=["lxf", "eo", "godunov"])
def scheme(request):
    return request.param


@pytest.fixture
def two_shock_data():
    return StepFunction((0.25, 0.5), (2.0, 1.0, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_flux(scheme, lam=None):
    return NumericalFlux(scheme, burgers(), lam)
