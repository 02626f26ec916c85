"""
Five-element landing control stack.

A flight-path generator projects the ideal glide path from the moving
landing point.  A guidance PID turns vertical deviation into a sink-rate
command, a sink PI turns sink-rate error into a pitch command, and the
pitch loop turns pitch error into elevator.  A velocity PID holds
airspeed with thrust.  Two pitch controllers are provided: the
observer-compensated PD law (primary) and a plain PID baseline.

Elevator-channel convention: the published pitch-loop partials are
expressed per degree of elevator (dqdot_dq = -0.15 1/s,
dqdot_dde = -0.015 rad s^-2 deg^-1), so the pitch laws compute their
elevator perturbation in degrees and convert to radians when forming
the command.  The plant-facing command and trim offset are radians.

The observer-based law, with e = theta_r - theta_meas and the observer
supplying the rate estimate x2 and disturbance estimate x3:

    U  = kp e - kd x2
    dde_deg = (U - x3) / dqdot_dde
    delta_e_cmd = delta_e_trim + radians(dde_deg)

It also returns the known-input signal h = dqdot_dq x2 + dqdot_dde
dde_deg that the observer needs; dde_deg in h is taken from the
saturated command so that the observer sees the input actually applied
(anti-windup at the authority limit).

All integrators are trapezoidal with clamping anti-windup; derivative
terms act on first-order-filtered signals, never on raw differences of
noisy measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .airframe import AircraftParams
from .environment import LandingPoint
from .observer import ObserverState
from .trimlin import TrimPoint

RAD2DEG = 180.0 / math.pi
DEG2RAD = math.pi / 180.0


@dataclass
class PitchGains:
    kp_theta: float = 88.89          # observer-PD proportional
    kd_theta: float = 26.5186        # observer-PD derivative
    kp_theta2: float = 57.01         # PID baseline
    ki_theta: float = 50.0
    kd_theta2: float = 17.19
    dqdot_dq: float = -0.15          # plant pitch-damping partial, 1/s
    dqdot_dde: float = -0.015        # plant elevator partial, rad s^-2 per deg
    rate_filter_tau: float = 0.01    # s, derivative filter for the PID baseline

    def __post_init__(self):
        if self.dqdot_dde == 0.0:
            raise ValueError("dqdot_dde must be nonzero")


@dataclass
class OuterGains:
    kp_v: float = 1.2
    ki_v: float = 0.4
    kd_v: float = 0.5
    kp_s: float = 0.0061
    ki_s: float = 0.018
    kp_z: float = 0.3
    ki_z: float = 0.02
    kd_z: float = 0.3
    deriv_filter_tau: float = 0.05   # s, guidance derivative filter
    sink_filter_tau: float = 0.0     # s, sink-error smoothing (0 = off)
    # notch on the sink error at the wake ripple frequency seen by the
    # closing aircraft (pattern pumping Doppler-shifted by the closure
    # rate); 0 disables
    sink_notch_omega: float = 7.1    # rad/s
    sink_notch_zeta: float = 0.25
    integrator_limit: float = 10.0   # clamp on each integrator state


@dataclass
class ControlCommand:
    delta_e_cmd: float      # rad, after controller-side saturation
    thrust_cmd: float       # N, before engine clamp
    theta_r: float = 0.0    # rad
    zdot_r: float = 0.0     # m/s, positive up
    v_r: float = 0.0        # m/s
    h_theta: float = 0.0    # known observer input, rad/s^2


def derive_pitch_gains(t_settle: float, damping: float, dqdot_dq: float):
    """(kp, kd) placing the pitch error poles for a 2% settling target.

    omega_n = 4/(t_settle * damping); kp = omega_n^2;
    kd = 2 * damping * omega_n - dqdot_dq.
    """
    if t_settle <= 0.0 or damping <= 0.0:
        raise ValueError("t_settle and damping must be positive")
    omega_n = 4.0 / (t_settle * damping)
    return omega_n * omega_n, 2.0 * damping * omega_n - dqdot_dq


class PitchOPD:
    """Observer-compensated PD pitch law."""

    def __init__(self, gains: PitchGains, trim: TrimPoint,
                 params: AircraftParams):
        self.g = gains
        self.delta_e_trim = trim.delta_e_star
        self._lo = params.elevator_min
        self._hi = params.elevator_max

    def step(self, theta_r: float, theta_meas: float, obs: ObserverState):
        """Return (delta_e_cmd [rad, raw], h_theta [rad/s^2]).

        The command is left unsaturated for the downstream limiter, but
        h is formed from the limit-clipped perturbation so the observer
        sees the input the plant can actually receive; feeding it the
        raw demand winds the disturbance estimate up whenever the
        elevator is pinned.
        """
        g = self.g
        e = theta_r - theta_meas
        e_rate = -obs.x2
        u = g.kp_theta * e + g.kd_theta * e_rate
        dde_deg = (u - obs.x3) / g.dqdot_dde
        cmd = self.delta_e_trim + dde_deg * DEG2RAD
        applied = min(max(cmd, self._lo), self._hi)
        dde_applied_deg = (applied - self.delta_e_trim) * RAD2DEG
        h_theta = g.dqdot_dq * obs.x2 + g.dqdot_dde * dde_applied_deg
        return cmd, h_theta


class PitchPID:
    """Plain PID pitch baseline (observer-free).

    The derivative term differentiates the first-order-filtered pitch
    error, so measurement noise is attenuated but not removed.
    """

    def __init__(self, gains: PitchGains, trim: TrimPoint,
                 params: AircraftParams, integrator_limit: float = 10.0):
        self.g = gains
        self.delta_e_trim = trim.delta_e_star
        self._lo = params.elevator_min
        self._hi = params.elevator_max
        self._int = 0.0
        self._int_limit = integrator_limit
        self._e_filt = None
        self._e_prev = 0.0

    def step(self, theta_r: float, theta_meas: float, dt: float) -> float:
        g = self.g
        e = theta_r - theta_meas
        if self._e_filt is None or dt <= 0.0:
            if self._e_filt is None:
                self._e_filt = e
            e_rate = 0.0
        else:
            tau = g.rate_filter_tau
            alpha = dt / (tau + dt)
            e_filt_new = self._e_filt + alpha * (e - self._e_filt)
            e_rate = (e_filt_new - self._e_filt) / dt
            self._e_filt = e_filt_new
        self._int = _clamp(self._int + 0.5 * (e + self._e_prev) * dt,
                           self._int_limit)
        self._e_prev = e
        u = g.kp_theta2 * e + g.ki_theta * self._int + g.kd_theta2 * e_rate
        dde_deg = u / g.dqdot_dde
        return self.delta_e_trim + dde_deg * DEG2RAD


class VelocityPID:
    """Airspeed hold: PID acceleration demand mapped to thrust.

    Zero error commands the trim thrust (feedforward), so the integrator
    only works against disturbances.
    """

    def __init__(self, gains: OuterGains, trim: TrimPoint,
                 params: AircraftParams):
        self.g = gains
        self.thrust_trim = trim.thrust_star
        self.m = params.m
        self._int = 0.0
        self._e_prev = 0.0

    def preload(self, integral: float) -> None:
        """Seed the integrator (bumpless start away from the trim point)."""
        self._int = integral

    def step(self, v_r: float, v_meas: float, vdot_meas: float,
             dt: float) -> float:
        g = self.g
        e = v_r - v_meas
        e_rate = -vdot_meas
        self._int += 0.5 * (e + self._e_prev) * dt
        self._int = _clamp(self._int, g.integrator_limit)
        self._e_prev = e
        u = g.kp_v * e + g.ki_v * self._int + g.kd_v * e_rate
        return self.thrust_trim + self.m * u


class SinkPI:
    """Sink-rate to pitch-command PI with trim-pitch feedforward.

    An optional first-order filter smooths the sink-rate error before
    the PI acts on it, keeping wake-frequency ripple out of the pitch
    command (the loop cannot reject it anyway).
    """

    def __init__(self, gains: OuterGains, trim: TrimPoint, dt: float = 0.001):
        self.g = gains
        self.theta_trim = trim.theta_star
        self._int = 0.0
        self._e_prev = 0.0
        self._e_filt = None
        self._notch = (NotchFilter(gains.sink_notch_omega,
                                   gains.sink_notch_zeta, dt)
                       if gains.sink_notch_omega > 0.0 else None)

    def preload(self, integral: float) -> None:
        """Seed the integrator (bumpless start away from the trim point)."""
        self._int = integral

    def step(self, zdot_r: float, zdot_meas: float, dt: float) -> float:
        g = self.g
        e = zdot_r - zdot_meas
        if self._notch is not None:
            e = self._notch.step(e)
        tau = g.sink_filter_tau
        if tau > 0.0:
            # short smoothing keeps residual ripple out of the pitch
            # command; kept well below the loop time constant
            if self._e_filt is None:
                self._e_filt = e
            else:
                self._e_filt += dt / (tau + dt) * (e - self._e_filt)
            e = self._e_filt
        self._int += 0.5 * (e + self._e_prev) * dt
        self._int = _clamp(self._int, g.integrator_limit)
        self._e_prev = e
        return self.theta_trim + g.kp_s * e + g.ki_s * self._int


class GuidancePID:
    """Vertical-deviation to sink-rate-command PID.

    The derivative acts on a first-order-filtered error; an optional
    feedforward carries the reference path's own vertical rate so zero
    deviation commands the path rate itself.
    """

    def __init__(self, gains: OuterGains):
        self.g = gains
        self._int = 0.0
        self._e_prev = 0.0
        self._e_filt = None

    def step(self, z_r: float, z_meas: float, dt: float,
             feedforward: float = 0.0) -> float:
        g = self.g
        e = z_r - z_meas
        if self._e_filt is None or dt <= 0.0:
            if self._e_filt is None:
                self._e_filt = e
            e_rate = 0.0
        else:
            tau = g.deriv_filter_tau
            alpha = dt / (tau + dt)
            e_filt_new = self._e_filt + alpha * (e - self._e_filt)
            e_rate = (e_filt_new - self._e_filt) / dt
            self._e_filt = e_filt_new
        self._int += 0.5 * (e + self._e_prev) * dt
        self._int = _clamp(self._int, g.integrator_limit)
        self._e_prev = e
        return feedforward + g.kp_z * e + g.ki_z * self._int + g.kd_z * e_rate


class NotchFilter:
    """Discrete biquad notch (s^2 + w0^2)/(s^2 + 2 zeta w0 s + w0^2).

    Tustin-discretized at the fixed step; unity gain away from w0.
    """

    def __init__(self, omega0: float, zeta: float, dt: float):
        k = 2.0 / dt
        k2 = k * k
        w2 = omega0 * omega0
        a0 = k2 + 2.0 * zeta * omega0 * k + w2
        self.b = ((k2 + w2) / a0, (2.0 * (w2 - k2)) / a0, (k2 + w2) / a0)
        self.a = ((2.0 * (w2 - k2)) / a0, (k2 - 2.0 * zeta * omega0 * k + w2) / a0)
        self._x1 = self._x2 = 0.0
        self._y1 = self._y2 = 0.0
        self._primed = False

    def step(self, x: float) -> float:
        if not self._primed:
            # start at steady state for the first sample (unity DC gain)
            self._x1 = self._x2 = x
            self._y1 = self._y2 = x
            self._primed = True
        y = (self.b[0] * x + self.b[1] * self._x1 + self.b[2] * self._x2
             - self.a[0] * self._y1 - self.a[1] * self._y2)
        self._x2, self._x1 = self._x1, x
        self._y2, self._y1 = self._y1, y
        return y


def flight_path_generator(landing: LandingPoint, aircraft_x: float,
                          glide_slope: float) -> float:
    """Reference altitude on the glide path anchored at the landing point.

    z_r = z_l + tan(glide_slope) * (x_l - x); valid for an approaching
    aircraft (x below x_l).
    """
    return landing.z_l + math.tan(glide_slope) * (landing.x_l - aircraft_x)


def _clamp(value: float, limit: float) -> float:
    if value > limit:
        return limit
    if value < -limit:
        return -limit
    return value
