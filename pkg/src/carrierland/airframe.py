"""
Nonlinear longitudinal rigid-body dynamics of an F/A-18-class airframe.

State variables (SI units, angles in radians):
    V_T    airspeed
    theta  pitch angle
    alpha  angle of attack
    q      pitch rate
    x, z   inertial position (x positive toward the ship, z positive up)

Flight path angle is derived: gamma = theta - alpha.

Equations of motion (body thrust along the longitudinal axis):
    V_T'   = (T cos(alpha) - D)/m - g sin(gamma)
    theta' = q
    alpha' = q - (T sin(alpha) + L)/(m V_T) + g cos(gamma)/V_T
    q'     = M / J_y

Aerodynamic forces use dynamic pressure q_bar = 0.5 rho V^2 with
coefficient build-up

    C_L = cl_base(alpha) + cl_q * q_hat + cl_de * delta_e
    C_D = cd_base(alpha)               + cd_de * delta_e
    C_M = cm_base(alpha) + cm_q * q_hat + cm_de * delta_e

where q_hat = q c_bar / (2 V) is the nondimensional pitch rate and the
base curves are cubic polynomials in alpha, valid on a bounded alpha
range.  Evaluation outside that range raises OutOfTableRange rather
than extrapolating silently.

Gusts perturb the aerodynamics through the relative wind: the airspeed
and angle of attack used for the coefficient lookup are recomputed from
the state velocity minus the local wind vector.  The same wind vector
displaces the inertial trajectory (x' = V_T cos(gamma) + u_wind,
z' = V_T sin(gamma) + w_wind).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources


class OutOfTableRange(RuntimeError):
    """Angle of attack left the aerodynamic table's valid range."""


class NonFiniteDerivative(RuntimeError):
    """A state derivative evaluated to NaN or infinity (model blow-up)."""


@dataclass(frozen=True)
class AircraftParams:
    """Physical constants of the airframe (defaults: 15-tonne strike fighter)."""

    m: float = 15000.0        # mass, kg
    rho: float = 1.33         # air density, kg/m^3 (constant at approach altitude)
    g: float = 9.75           # gravity, m/s^2
    t_max: float = 71172.0    # thrust saturation limit, N
    s_ref: float = 37.16      # wing reference area, m^2
    j_y: float = 205000.0     # pitch-axis inertia, kg m^2
    c_bar: float = 3.51       # mean aerodynamic chord, m
    elevator_min: float = math.radians(-25.0)  # rad
    elevator_max: float = math.radians(10.0)   # rad

    def __post_init__(self):
        for name in ("m", "rho", "g", "t_max", "s_ref", "j_y", "c_bar"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.elevator_min < 0.0 < self.elevator_max:
            raise ValueError("elevator range must straddle zero")


@dataclass(frozen=True)
class AeroModel:
    """Aerodynamic coefficient model: cubic base curves plus linear derivatives.

    Polynomial coefficients are ascending powers of alpha in radians.
    Rate derivatives apply to q_hat = q c_bar/(2 V); deflection
    derivatives are per radian of elevator.
    """

    cl_base: tuple[float, ...]
    cd_base: tuple[float, ...]
    cm_base: tuple[float, ...]
    cl_q: float
    cm_q: float
    cl_de: float
    cd_de: float
    cm_de: float
    alpha_min: float  # rad
    alpha_max: float  # rad

    def __post_init__(self):
        if self.alpha_min >= self.alpha_max:
            raise ValueError("alpha_min must be below alpha_max")
        if self.cm_de >= 0.0:
            raise ValueError("cm_de must be negative (nose-down elevator authority)")

    def check_alpha(self, alpha: float) -> None:
        if not (self.alpha_min <= alpha <= self.alpha_max):
            raise OutOfTableRange(
                f"alpha = {math.degrees(alpha):.2f} deg outside table range "
                f"[{math.degrees(self.alpha_min):.1f}, {math.degrees(self.alpha_max):.1f}] deg"
            )

    def coefficients(self, alpha: float, q_hat: float, delta_e: float):
        """Return (C_L, C_D, C_M) at the given alpha, q_hat and elevator."""
        self.check_alpha(alpha)
        cl = _polyval(self.cl_base, alpha) + self.cl_q * q_hat + self.cl_de * delta_e
        cd = _polyval(self.cd_base, alpha) + self.cd_de * delta_e
        cm = _polyval(self.cm_base, alpha) + self.cm_q * q_hat + self.cm_de * delta_e
        return cl, cd, cm

    def to_dict(self) -> dict:
        return {
            "cl_base": list(self.cl_base),
            "cd_base": list(self.cd_base),
            "cm_base": list(self.cm_base),
            "cl_q": self.cl_q,
            "cm_q": self.cm_q,
            "cl_de": self.cl_de,
            "cd_de": self.cd_de,
            "cm_de": self.cm_de,
            "alpha_min_deg": math.degrees(self.alpha_min),
            "alpha_max_deg": math.degrees(self.alpha_max),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AeroModel":
        required = {"cl_base", "cd_base", "cm_base", "cl_q", "cm_q",
                    "cl_de", "cd_de", "cm_de", "alpha_min_deg", "alpha_max_deg"}
        missing = required - set(d)
        if missing:
            raise ValueError(f"aero model file missing keys: {sorted(missing)}")
        return cls(
            cl_base=tuple(float(c) for c in d["cl_base"]),
            cd_base=tuple(float(c) for c in d["cd_base"]),
            cm_base=tuple(float(c) for c in d["cm_base"]),
            cl_q=float(d["cl_q"]),
            cm_q=float(d["cm_q"]),
            cl_de=float(d["cl_de"]),
            cd_de=float(d["cd_de"]),
            cm_de=float(d["cm_de"]),
            alpha_min=math.radians(float(d["alpha_min_deg"])),
            alpha_max=math.radians(float(d["alpha_max_deg"])),
        )

    @classmethod
    def from_file(cls, path) -> "AeroModel":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_file(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")


_DEFAULT_MODEL = None


def default_aero_model() -> AeroModel:
    """The calibrated default model shipped with the package."""
    global _DEFAULT_MODEL
    if _DEFAULT_MODEL is None:
        text = resources.files("carrierland.data").joinpath("fa18_aero.json").read_text()
        _DEFAULT_MODEL = AeroModel.from_dict(json.loads(text))
    return _DEFAULT_MODEL


@dataclass
class AircraftState:
    v_t: float            # airspeed, m/s
    theta: float          # pitch, rad
    alpha: float          # angle of attack, rad
    q: float              # pitch rate, rad/s
    x: float = 0.0        # inertial position toward the ship, m
    z: float = 0.0        # altitude, m (positive up)

    @property
    def gamma(self) -> float:
        return self.theta - self.alpha

    def as_tuple(self):
        return (self.v_t, self.theta, self.alpha, self.q, self.x, self.z)


@dataclass
class ControlInputs:
    delta_e: float        # elevator deflection, rad
    thrust: float         # engine thrust, N

    def delta_t(self, params: AircraftParams) -> float:
        """Throttle fraction corresponding to the thrust value."""
        return self.thrust / params.t_max


def _polyval(coeffs, x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def dynamic_pressure(v_t: float, rho: float) -> float:
    """Dynamic pressure 0.5 rho V^2 in Pa."""
    return 0.5 * rho * v_t * v_t


def aero_forces(state: AircraftState, inputs: ControlInputs,
                model: AeroModel, params: AircraftParams):
    """Lift, drag and pitching moment (N, N, N m) at the current state."""
    v = state.v_t
    if v == 0.0:
        return 0.0, 0.0, 0.0
    q_hat = state.q * params.c_bar / (2.0 * v)
    cl, cd, cm = model.coefficients(state.alpha, q_hat, inputs.delta_e)
    qbar_s = dynamic_pressure(v, params.rho) * params.s_ref
    return qbar_s * cl, qbar_s * cd, qbar_s * params.c_bar * cm


def state_derivative(state: AircraftState, inputs: ControlInputs,
                     wind, model: AeroModel, params: AircraftParams):
    """Time derivative (V_T', theta', alpha', q', x', z') of the full state.

    `wind` is any object with u_g/w_g attributes (m/s, inertial axes) or
    None for calm air.  The relative wind shifts the airspeed and angle
    of attack used in the aerodynamic lookup; the same wind advects the
    inertial trajectory.
    """
    v = state.v_t
    theta = state.theta
    alpha = state.alpha
    q = state.q
    gamma = theta - alpha
    sin_g = math.sin(gamma)
    cos_g = math.cos(gamma)

    if wind is not None and (wind.u_g != 0.0 or wind.w_g != 0.0):
        vax = v * cos_g - wind.u_g
        vaz = v * sin_g - wind.w_g
        v_air = math.hypot(vax, vaz)
        alpha_air = theta - math.atan2(vaz, vax)
        u_g, w_g = wind.u_g, wind.w_g
    else:
        v_air = v
        alpha_air = alpha
        u_g = w_g = 0.0

    q_hat = q * params.c_bar / (2.0 * v_air) if v_air > 0.0 else 0.0
    cl, cd, cm = model.coefficients(alpha_air, q_hat, inputs.delta_e)
    qbar_s = 0.5 * params.rho * v_air * v_air * params.s_ref
    lift = qbar_s * cl
    drag = qbar_s * cd
    moment = qbar_s * params.c_bar * cm

    thrust = inputs.thrust
    m = params.m
    g = params.g

    v_dot = (thrust * math.cos(alpha) - drag) / m - g * sin_g
    theta_dot = q
    alpha_dot = q - (thrust * math.sin(alpha) + lift) / (m * v) + g * cos_g / v
    q_dot = moment / params.j_y
    x_dot = v * cos_g + u_g
    z_dot = v * sin_g + w_g

    out = (v_dot, theta_dot, alpha_dot, q_dot, x_dot, z_dot)
    for d in out:
        if not math.isfinite(d):
            raise NonFiniteDerivative(f"non-finite state derivative: {out}")
    return out
