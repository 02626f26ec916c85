import math

import pytest

from carrierland.airframe import (AeroModel, AircraftParams,
                                  default_aero_model)
from carrierland.trimlin import linearize, solve_trim


@pytest.fixture(scope="session")
def params():
    return AircraftParams()


@pytest.fixture(scope="session")
def model():
    return default_aero_model()


@pytest.fixture(scope="session")
def trim(params, model):
    return solve_trim(params, model)


@pytest.fixture(scope="session")
def linear(trim, params, model):
    return linearize(trim, params, model)


@pytest.fixture(scope="session")
def zero_aero_model():
    """Force-free stub: all coefficients zero (cm_de at the sign limit)."""
    return AeroModel(
        cl_base=(0.0,), cd_base=(0.0,), cm_base=(0.0,),
        cl_q=0.0, cm_q=0.0, cl_de=0.0, cd_de=0.0, cm_de=-1e-15,
        alpha_min=math.radians(-90.0), alpha_max=math.radians(90.0),
    )
