import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vprk import make_model, reference_solution
from vprk.models import vortex_exact

# Protocol horizons and the reference step size used by the experiments.
KEPLER_T = 7.0
LV_T = 5.0
REFERENCE_H = 1e-6


@pytest.fixture(scope="session")
def kepler():
    return make_model("kepler")


@pytest.fixture(scope="session")
def vortex2():
    return make_model("vortex2")


@pytest.fixture(scope="session")
def lotka_volterra():
    return make_model("lotka_volterra")


@pytest.fixture(scope="session")
def toy():
    return make_model("toy")


@pytest.fixture(scope="session")
def kepler_reference(kepler):
    """Verner reference trajectory for the Kepler protocol (computed once)."""
    return reference_solution(kepler.system, kepler.q0, KEPLER_T,
                              h_ref=REFERENCE_H, field=kepler.ode_field)


@pytest.fixture(scope="session")
def lv_reference(lotka_volterra):
    return reference_solution(lotka_volterra.system, lotka_volterra.q0, LV_T,
                              h_ref=REFERENCE_H, field=lotka_volterra.ode_field)


@pytest.fixture(scope="session")
def vortex_closed_form(vortex2):
    return lambda t: vortex_exact(vortex2.params, 1.0, t)
