import json
import math

import pytest

from carrierland.airframe import (AeroModel, AircraftParams, AircraftState,
                                  ControlInputs, OutOfTableRange,
                                  aero_forces, dynamic_pressure,
                                  state_derivative)
from carrierland.environment import WindSample
from carrierland.integrate import rk4_step


def test_dynamic_pressure_zero_airspeed():
    assert dynamic_pressure(0.0, 1.33) == 0.0


def test_dynamic_pressure_trim_point():
    # 0.5 * 1.33 * 69.1^2, checked by hand
    assert dynamic_pressure(69.1, 1.33) == pytest.approx(3175.24865, rel=1e-9)


def test_dynamic_pressure_unit_case():
    assert dynamic_pressure(1.0, 2.0) == 1.0


def test_aero_forces_zero_airspeed(model, params):
    st = AircraftState(0.0, 0.2, 0.1, 0.3)
    assert aero_forces(st, ControlInputs(0.1, 0.0), model, params) == (0, 0, 0)


def test_trim_lift_balance(model, params, trim):
    """At trim the vertical balance L + T sin(alpha) = m g holds exactly,
    and the weight-carrying reference coefficient mg/(qbar S) is 1.2395."""
    lift, drag, moment = aero_forces(trim.state(), trim.inputs(), model, params)
    mg = params.m * params.g
    assert lift + trim.thrust_star * math.sin(trim.alpha_star) == \
        pytest.approx(mg, rel=1e-9)
    q_s = dynamic_pressure(trim.v_t_star, params.rho) * params.s_ref
    assert mg / q_s == pytest.approx(1.2395, abs=2e-4)
    assert drag >= 0.0


def test_trim_moment_zero(model, params, trim):
    _, _, moment = aero_forces(trim.state(), trim.inputs(), model, params)
    q_sc = dynamic_pressure(trim.v_t_star, params.rho) * params.s_ref * params.c_bar
    assert abs(moment / q_sc) < 1e-10


def test_alpha_out_of_range_raises(model, params):
    st = AircraftState(69.1, 0.0, math.radians(45.0), 0.0)
    with pytest.raises(OutOfTableRange):
        aero_forces(st, ControlInputs(0.0, 0.0), model, params)


def test_drag_positive_over_domain(model, params):
    for alpha_deg in range(-5, 41):
        for de in (params.elevator_min, 0.0, params.elevator_max):
            st = AircraftState(69.1, 0.0, math.radians(alpha_deg), 0.0)
            _, drag, _ = aero_forces(st, ControlInputs(de, 0.0), model, params)
            assert drag > 0.0


def test_trim_derivatives_vanish(model, params, trim):
    d = state_derivative(trim.state(), trim.inputs(), None, model, params)
    for component in d[:4]:
        assert abs(component) < 1e-6


def test_force_free_stub(zero_aero_model, params):
    st = AircraftState(50.0, 0.1, 0.1, 0.0)  # gamma = 0
    d = state_derivative(st, ControlInputs(0.0, 0.0), None,
                         zero_aero_model, params)
    assert d[0] == 0.0       # V' = 0 with no thrust, drag, or path angle
    assert d[3] == pytest.approx(0.0, abs=1e-12)


def test_pure_gravity_deceleration(zero_aero_model, params):
    # gamma = 90 deg, thrust off: airspeed bleeds at exactly g
    st = AircraftState(50.0, math.pi / 2, 0.0, 0.0)
    d = state_derivative(st, ControlInputs(0.0, 0.0), None,
                         zero_aero_model, params)
    assert d[0] == pytest.approx(-params.g, rel=1e-12)


def test_theta_dot_is_q(model, params):
    for q in (-0.3, 0.0, 0.17):
        st = AircraftState(69.1, 0.12, 0.1, q)
        d = state_derivative(st, ControlInputs(-0.05, 20000.0), None,
                             model, params)
        assert d[1] == q


def test_energy_conservation_ballistic(zero_aero_model, params):
    """Force-free flight conserves V^2/2 + g z to integrator accuracy."""
    dt = 0.001
    y = (60.0, math.radians(20.0), 0.0, 0.0, 0.0, 100.0)
    inputs = ControlInputs(0.0, 0.0)

    def f(_t, s):
        st = AircraftState(*s)
        return state_derivative(st, inputs, None, zero_aero_model, params)

    e0 = 0.5 * y[0] ** 2 + params.g * y[5]
    for k in range(10000):
        y = rk4_step(f, y, k * dt, dt)
    e1 = 0.5 * y[0] ** 2 + params.g * y[5]
    assert abs(e1 - e0) / e0 < 1e-6


def test_state_derivative_deterministic(model, params):
    st = AircraftState(70.0, 0.1, 0.08, 0.02, 5.0, 120.0)
    u = ControlInputs(-0.1, 30000.0)
    a = state_derivative(st, u, None, model, params)
    b = state_derivative(st, u, None, model, params)
    assert a == b


def test_wind_shifts_relative_airspeed(model, params, trim):
    """A pure tailwind lowers the aero airspeed and advects the track."""
    st = trim.state()
    u = trim.inputs()
    calm = state_derivative(st, u, None, model, params)
    tail = WindSample(u_g=5.0, w_g=0.0)
    windy = state_derivative(st, u, tail, model, params)
    # less drag at lower relative airspeed: V' increases
    assert windy[0] > calm[0]
    # kinematics pick up the full wind vector
    assert windy[4] == pytest.approx(calm[4] + 5.0, rel=1e-12)
    assert windy[5] == pytest.approx(calm[5], abs=1e-12)


def test_wind_updraft_raises_alpha_forces(model, params, trim):
    st = trim.state()
    u = trim.inputs()
    calm = state_derivative(st, u, None, model, params)
    updraft = state_derivative(st, u, WindSample(0.0, 3.0), model, params)
    # higher effective alpha -> more lift -> alpha' decreases
    assert updraft[2] < calm[2]
    assert updraft[5] == pytest.approx(calm[5] + 3.0, rel=1e-12)


def test_aero_model_file_round_trip(tmp_path, model):
    path = tmp_path / "aero.json"
    model.to_file(path)
    again = AeroModel.from_file(path)
    assert again == model


def test_aero_model_missing_key_rejected(model):
    d = model.to_dict()
    del d["cm_de"]
    with pytest.raises(ValueError, match="cm_de"):
        AeroModel.from_dict(d)


def test_aero_model_requires_nose_down_elevator(model):
    d = model.to_dict()
    d["cm_de"] = 0.2
    with pytest.raises(ValueError):
        AeroModel.from_dict(d)


def test_params_validated():
    with pytest.raises(ValueError):
        AircraftParams(m=-1.0)
    with pytest.raises(ValueError):
        AircraftParams(elevator_min=0.1)
