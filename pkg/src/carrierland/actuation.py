"""
Engine and elevator actuator dynamics with saturation.

Engine: first-order lag on commanded thrust,
    T' = (T_cmd - T) / tau_eng,        tau_eng = 0.625 s

Elevator: unit-DC-gain second-order servo,
    defl'' = w_a^2 (cmd - defl) - 2 zeta_a w_a defl'
with w_a = 30.74 rad/s, zeta_a = 0.509.

Commands are clamped to the physical limits before entering the
actuator dynamics, and the actuator states are clamped again after each
integration step so the servo cannot integrate past its stops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .airframe import AircraftParams

ENGINE_TAU = 0.625          # s, non-afterburner lag
ELEVATOR_OMEGA = 30.74      # rad/s
ELEVATOR_ZETA = 0.509


@dataclass
class EngineState:
    thrust_actual: float = 0.0   # N


@dataclass
class ElevatorState:
    deflection: float = 0.0      # rad
    deflection_rate: float = 0.0  # rad/s


@dataclass
class SaturationFlags:
    elevator: bool = False
    thrust: bool = False


def engine_derivative(state: EngineState, thrust_cmd: float,
                      tau: float = ENGINE_TAU) -> float:
    """d(thrust)/dt of the first-order engine lag."""
    return (thrust_cmd - state.thrust_actual) / tau


def elevator_derivative(state: ElevatorState, delta_e_cmd: float,
                        omega: float = ELEVATOR_OMEGA,
                        zeta: float = ELEVATOR_ZETA):
    """(d(deflection)/dt, d(rate)/dt) of the second-order elevator servo."""
    ddefl = state.deflection_rate
    drate = omega * omega * (delta_e_cmd - state.deflection) \
        - 2.0 * zeta * omega * state.deflection_rate
    return ddefl, drate


def saturate_inputs(delta_e_cmd: float, thrust_cmd: float,
                    params: AircraftParams):
    """Clamp raw commands to physical limits.

    Returns (delta_e, thrust, flags) where flags records per-channel
    clamping for run diagnostics.
    """
    flags = SaturationFlags()
    de = delta_e_cmd
    if de < params.elevator_min:
        de = params.elevator_min
        flags.elevator = True
    elif de > params.elevator_max:
        de = params.elevator_max
        flags.elevator = True
    th = thrust_cmd
    if th < 0.0:
        th = 0.0
        flags.thrust = True
    elif th > params.t_max:
        th = params.t_max
        flags.thrust = True
    return de, th, flags


def clamp_actuator_states(engine: EngineState, elevator: ElevatorState,
                          params: AircraftParams) -> None:
    """Project actuator states back onto their physical ranges.

    The elevator rate is zeroed when the surface is pinned at a stop.
    """
    if engine.thrust_actual < 0.0:
        engine.thrust_actual = 0.0
    elif engine.thrust_actual > params.t_max:
        engine.thrust_actual = params.t_max
    if elevator.deflection < params.elevator_min:
        elevator.deflection = params.elevator_min
        if elevator.deflection_rate < 0.0:
            elevator.deflection_rate = 0.0
    elif elevator.deflection > params.elevator_max:
        elevator.deflection = params.elevator_max
        if elevator.deflection_rate > 0.0:
            elevator.deflection_rate = 0.0


def elevator_peak_overshoot(zeta: float = ELEVATOR_ZETA) -> float:
    """Fractional step-response overshoot of an underdamped second-order lag."""
    return math.exp(-math.pi * zeta / math.sqrt(1.0 - zeta * zeta))
