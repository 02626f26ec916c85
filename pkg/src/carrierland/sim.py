"""
Closed-loop scenario engine: fixed-step RK4 integration of the coupled
aircraft / actuator / observer / deck-motion system, scenario
orchestration and metric extraction.

The integrated state concatenates aircraft (6), engine (1), elevator
(2), observer (3) and the two deck-motion filters (8).  Controller
commands, the measured pitch, the wind sample and all white-noise draws
are computed once per step and held across the four RK4 stages.

Scenarios:
    pitch_step  step the pitch reference by a fixed angle at t = 0;
                sink and guidance loops off, velocity loop active.
    sink_step   step the commanded sink rate at t = 0; the sink loop
                generates the pitch reference, guidance off.
    approach    full cascade from a point on the glide path, ending at
                touchdown (z <= z_l once x >= x_l) or at the duration cap.

Runs are bit-reproducible: a resolved configuration and seed determine
every sample drawn and every float written to the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .airframe import (AeroModel, AircraftParams, AircraftState,
                       ControlInputs, NonFiniteDerivative, OutOfTableRange,
                       default_aero_model, state_derivative)
from .actuation import (ELEVATOR_OMEGA, ELEVATOR_ZETA, ENGINE_TAU,
                        saturate_inputs)
from .control import (RAD2DEG, GuidancePID, OuterGains, PitchGains,
                      PitchOPD, PitchPID, SinkPI, VelocityPID,
                      flight_path_generator)
from .environment import (Environment, ShipParams, WindParams,
                          _held_sigma, _ship_filter_derivative)
from .integrate import rk4_step
from .observer import ObserverParams, ObserverState, observer_derivative
from .trimlin import LinearModel, TrimPoint, linearize, solve_trim

TRACE_HEADER = (
    "t", "v_t", "theta", "alpha", "q", "x", "z", "gamma", "delta_e",
    "thrust", "theta_r", "zdot_r", "z_r", "x1", "x2", "x3", "d_true",
    "u_g", "w_g", "u1", "u2", "u3", "w1", "w2", "w3", "z_g", "theta_s",
    "x_l", "z_l", "noise", "sat_elev", "sat_thr",
)

SCENARIOS = ("pitch_step", "sink_step", "approach")
CONTROLLERS = ("opd", "pid", "opd_truth")

_DEFAULT_DURATION = {"pitch_step": 10.0, "sink_step": 20.0, "approach": 90.0}


class ConfigError(ValueError):
    """A scenario configuration field violates its constraint."""


@dataclass
class ScenarioConfig:
    scenario: str = "pitch_step"
    controller: str = "opd"
    wind_on: bool = False
    noise_on: bool = False
    ship_on: bool = True
    seed: int = 0
    duration: float | None = None      # None: scenario default
    dt: float = 0.001
    initial_range: float = 2000.0      # m ahead of the landing point
    initial_altitude: float = 300.0    # m, pitch/sink scenarios
    pitch_step_deg: float = 1.0
    sink_rate_cmd: float = 10.0        # m/s, descent positive
    glide_slope_deg: float = 3.5
    trace_decimation: int = 10
    ship_warmup_s: float = 60.0
    metric_skip_s: float = 5.0         # transient excluded from path metrics
    dt_noise: float = 0.1
    noise_dt: float = 0.01            # hold interval of the pitch-noise sensor
    ship_noise_gain: float = 0.16
    v_wd: float = 10.0
    turb_norm: float = 0.5
    wake_extent: float = 914.0
    t_max: float | None = None         # thrust-limit override, N
    aero_model_path: str | None = None
    use_local_partials: bool = False   # pitch laws use the recomputed Jacobian
    theta_r_low_deg: float = -12.0    # pitch-command clamp about trim
    theta_r_high_deg: float = 8.0
    obs_k1: float = 0.75
    obs_k2: float = 2.75
    obs_k3: float = 3.0
    obs_alpha1: float = 0.9
    obs_epsilon: float = 0.3
    pitch: PitchGains = field(default_factory=PitchGains)
    outer: OuterGains = field(default_factory=OuterGains)

    def resolved_duration(self) -> float:
        if self.duration is not None:
            return self.duration
        return _DEFAULT_DURATION[self.scenario]

    def observer_params(self) -> ObserverParams:
        try:
            return ObserverParams(self.obs_k1, self.obs_k2, self.obs_k3,
                                  self.obs_alpha1, self.obs_epsilon)
        except ValueError as exc:
            raise ConfigError(f"obs.*: {exc}") from exc

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}")
        if self.controller not in CONTROLLERS:
            raise ConfigError(f"controller must be one of {CONTROLLERS}")
        if not self.dt > 0.0:
            raise ConfigError("dt must be > 0")
        if self.duration is not None and not self.duration > 0.0:
            raise ConfigError("duration must be > 0")
        if self.trace_decimation < 1:
            raise ConfigError("trace_decimation must be >= 1")
        if self.dt_noise < self.dt:
            raise ConfigError("dt_noise must be >= dt")
        if self.noise_dt < self.dt:
            raise ConfigError("noise_dt must be >= dt")
        if self.initial_range <= 0.0:
            raise ConfigError("initial_range must be > 0")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        self.observer_params()


# Dotted override keys accepted by config files and the CLI, mapped to
# (attribute path, type).  This registry is the single source of truth
# for serialization and validation.
CONFIG_KEYS: dict[str, tuple[str, type]] = {
    "scenario": ("scenario", str),
    "controller": ("controller", str),
    "wind_on": ("wind_on", bool),
    "noise_on": ("noise_on", bool),
    "ship_on": ("ship_on", bool),
    "seed": ("seed", int),
    "duration": ("duration", float),
    "dt": ("dt", float),
    "initial_range": ("initial_range", float),
    "initial_altitude": ("initial_altitude", float),
    "pitch_step_deg": ("pitch_step_deg", float),
    "sink_rate_cmd": ("sink_rate_cmd", float),
    "glide_slope_deg": ("glide_slope_deg", float),
    "theta_r_low_deg": ("theta_r_low_deg", float),
    "theta_r_high_deg": ("theta_r_high_deg", float),
    "trace_decimation": ("trace_decimation", int),
    "ship_warmup_s": ("ship_warmup_s", float),
    "metric_skip_s": ("metric_skip_s", float),
    "dt_noise": ("dt_noise", float),
    "noise_dt": ("noise_dt", float),
    "ship_noise_gain": ("ship_noise_gain", float),
    "v_wd": ("v_wd", float),
    "turb_norm": ("turb_norm", float),
    "wake_extent": ("wake_extent", float),
    "t_max": ("t_max", float),
    "aero_model_path": ("aero_model_path", str),
    "use_local_partials": ("use_local_partials", bool),
    "obs.k1": ("obs_k1", float),
    "obs.k2": ("obs_k2", float),
    "obs.k3": ("obs_k3", float),
    "obs.alpha1": ("obs_alpha1", float),
    "obs.epsilon": ("obs_epsilon", float),
    "pitch.kp": ("pitch.kp_theta", float),
    "pitch.kd": ("pitch.kd_theta", float),
    "pitch.dqdot_dq": ("pitch.dqdot_dq", float),
    "pitch.dqdot_dde": ("pitch.dqdot_dde", float),
    "pid.kp": ("pitch.kp_theta2", float),
    "pid.ki": ("pitch.ki_theta", float),
    "pid.kd": ("pitch.kd_theta2", float),
    "pid.tau": ("pitch.rate_filter_tau", float),
    "vel.kp": ("outer.kp_v", float),
    "vel.ki": ("outer.ki_v", float),
    "vel.kd": ("outer.kd_v", float),
    "sink.kp": ("outer.kp_s", float),
    "sink.ki": ("outer.ki_s", float),
    "sink.tau": ("outer.sink_filter_tau", float),
    "sink.notch_omega": ("outer.sink_notch_omega", float),
    "sink.notch_zeta": ("outer.sink_notch_zeta", float),
    "guid.kp": ("outer.kp_z", float),
    "guid.ki": ("outer.ki_z", float),
    "guid.kd": ("outer.kd_z", float),
    "guid.tau": ("outer.deriv_filter_tau", float),
    "integrator_limit": ("outer.integrator_limit", float),
}

_NULLABLE_KEYS = {"duration", "t_max", "aero_model_path"}


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Flat, canonical key-value form of a configuration."""
    out = {}
    for key, (path, _typ) in CONFIG_KEYS.items():
        obj = cfg
        *heads, leaf = path.split(".")
        for h in heads:
            obj = getattr(obj, h)
        out[key] = getattr(obj, leaf)
    return out


def config_from_dict(d: dict, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Build a configuration from canonical keys, rejecting unknown ones."""
    cfg = replace(base) if base is not None else ScenarioConfig()
    cfg.pitch = replace(cfg.pitch)
    cfg.outer = replace(cfg.outer)
    unknown = [k for k in d if k not in CONFIG_KEYS]
    if unknown:
        raise ConfigError(
            f"unknown config keys {unknown}; valid keys: {sorted(CONFIG_KEYS)}")
    for key, value in d.items():
        set_config_key(cfg, key, value)
    return cfg


def set_config_key(cfg: ScenarioConfig, key: str, value) -> None:
    if key not in CONFIG_KEYS:
        raise ConfigError(
            f"unknown config key '{key}'; valid keys: {sorted(CONFIG_KEYS)}")
    path, typ = CONFIG_KEYS[key]
    if value is None:
        if key not in _NULLABLE_KEYS:
            raise ConfigError(f"{key} may not be null")
        coerced = None
    elif typ is bool and isinstance(value, str):
        low = value.strip().lower()
        if low in ("1", "true", "on", "yes"):
            coerced = True
        elif low in ("0", "false", "off", "no"):
            coerced = False
        else:
            raise ConfigError(f"{key}: cannot parse '{value}' as on/off")
    else:
        try:
            coerced = typ(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}") from exc
    obj = cfg
    *heads, leaf = path.split(".")
    for h in heads:
        obj = getattr(obj, h)
    setattr(obj, leaf, coerced)


@dataclass
class RunMetrics:
    settled: bool = False
    settle_time_2pct: float | None = None
    steady_state_error: float | None = None
    overshoot: float | None = None
    max_glidepath_deviation: float | None = None
    touchdown_time: float | None = None
    touchdown_vertical_error: float | None = None
    pitch_ref_rms_error: float | None = None   # rad
    elevator_saturation_count: int = 0
    thrust_saturation_count: int = 0
    observer_rms_error: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RunResult:
    config: ScenarioConfig
    trace: list[tuple]
    metrics: RunMetrics
    aborted: bool = False
    abort_time: float | None = None
    abort_reason: str | None = None
    trim: TrimPoint | None = None
    linear: LinearModel | None = None


def settle_time(t, y, target: float, band_fraction: float = 0.02):
    """First time after which y stays inside the +-band around target.

    The band is band_fraction of |target|.  Returns None when the signal
    never enters the band or leaves it again before the window ends.
    """
    band = band_fraction * abs(target)
    last_out = -1
    for i in range(len(y) - 1, -1, -1):
        if abs(y[i] - target) > band:
            last_out = i
            break
    if last_out == len(y) - 1:
        return None
    return t[last_out + 1]


class Simulation:
    """One configured closed-loop run."""

    def __init__(self, config: ScenarioConfig,
                 params: AircraftParams | None = None,
                 model: AeroModel | None = None):
        config.validate()
        self.cfg = config
        if params is None:
            params = (AircraftParams(t_max=config.t_max)
                      if config.t_max else AircraftParams())
        self.params = params
        if model is None:
            model = (AeroModel.from_file(config.aero_model_path)
                     if config.aero_model_path else default_aero_model())
        self.model = model
        self.trim = solve_trim(params, model)
        self.linear = linearize(self.trim, params, model)
        self.obs_params = config.observer_params()
        gains = replace(config.pitch)
        if config.use_local_partials:
            gains.dqdot_dq = self.linear.dqdot_dq
            gains.dqdot_dde = self.linear.dqdot_dde_deg
        self.gains = gains
        self.outer = replace(config.outer)

    # ------------------------------------------------------------------
    def run(self) -> RunResult:
        cfg = self.cfg
        params = self.params
        model = self.model
        trim = self.trim
        gains = self.gains
        dt = cfg.dt
        n_steps = int(round(cfg.resolved_duration() / dt))
        approach = cfg.scenario == "approach"
        sink_scenario = cfg.scenario == "sink_step"
        pitch_scenario = cfg.scenario == "pitch_step"

        env = Environment(
            ship_params=ShipParams(dt_noise=cfg.dt_noise,
                                   noise_gain=cfg.ship_noise_gain),
            wind_params=WindParams(v_wd=cfg.v_wd, dt_noise=cfg.dt_noise,
                                   turb_norm=cfg.turb_norm,
                                   wake_extent=cfg.wake_extent),
            dt=dt, seed=cfg.seed, v_ref=trim.v_t_star,
            ship_on=cfg.ship_on, wind_on=cfg.wind_on,
            noise_on=cfg.noise_on,
            warmup_s=cfg.ship_warmup_s if approach else 0.0,
            noise_dt=cfg.noise_dt,
        )

        lp0 = env.landing_point()
        glide_slope = math.radians(cfg.glide_slope_deg)
        x0 = lp0.x_l - cfg.initial_range
        if approach:
            z0 = flight_path_generator(lp0, x0, glide_slope)
            gamma0 = -glide_slope
        else:
            z0 = cfg.initial_altitude
            gamma0 = 0.0

        theta_star = trim.theta_star
        v_star = trim.v_t_star
        theta_cmd = theta_star + math.radians(cfg.pitch_step_deg)
        zdot_cmd = -cfg.sink_rate_cmd  # descent positive at the interface
        theta_r_lo = theta_star + math.radians(cfg.theta_r_low_deg)
        theta_r_hi = theta_star + math.radians(cfg.theta_r_high_deg)

        opd = PitchOPD(gains, trim, params)
        pid = PitchPID(gains, trim, params,
                       integrator_limit=self.outer.integrator_limit)
        vel = VelocityPID(self.outer, trim, params)
        sink = SinkPI(self.outer, trim, dt=dt)
        guid = GuidancePID(self.outer)
        use_pid = cfg.controller == "pid"
        use_truth = cfg.controller == "opd_truth"

        # descending starts carry the matching equilibrium thrust and
        # pre-loaded integrators so the path capture is bumpless
        theta0 = trim.alpha_star + gamma0
        thrust0 = trim.thrust_star
        if gamma0 != 0.0:
            drag_star = trim.thrust_star * math.cos(trim.alpha_star)
            thrust0 = max(0.0, (drag_star + params.m * params.g
                                * math.sin(gamma0)) / math.cos(trim.alpha_star))
            sink.preload((theta0 - theta_star) / self.outer.ki_s)
            vel.preload((thrust0 - trim.thrust_star)
                        / (params.m * self.outer.ki_v))

        obs_p = self.obs_params
        # concatenated state: aircraft 6, engine 1, elevator 2, observer 3,
        # heave filter 4, pitch filter 4
        y = (v_star, theta0, trim.alpha_star, 0.0, x0, z0,
             thrust0, trim.delta_e_star, 0.0,
             theta0 - theta_star, 0.0, 0.0) \
            + env.ship.heave_filter + env.ship.pitch_filter

        ship_params = env.ship_params
        ship_on = cfg.ship_on
        sig_h = _held_sigma(ship_params.heave_power_db, ship_params.dt_noise) \
            * ship_params.noise_gain
        sig_p = _held_sigma(ship_params.pitch_power_db, ship_params.dt_noise) \
            * ship_params.noise_gain
        ship_rng = env._ship_rng
        hold_steps = max(1, round(cfg.dt_noise / dt))
        u_heave = env.ship.u_heave
        u_pitch = env.ship.u_pitch
        ship_since_draw = env.ship.steps_since_draw

        omega_a = ELEVATOR_OMEGA
        zeta_a = ELEVATOR_ZETA
        two_zw = 2.0 * zeta_a * omega_a
        w2a = omega_a * omega_a
        tau_eng = ENGINE_TAU

        trace: list[tuple] = []
        t_hist: list[float] = []
        theta_hist: list[float] = []
        zdot_hist: list[float] = []
        dev_hist: list[float] = []
        theta_err_sq = 0.0
        theta_err_n = 0
        obs_err_sq = 0.0
        sat_e_count = 0
        sat_t_count = 0
        vdot_prev = 0.0
        v_prev = v_star
        metrics = RunMetrics()
        aborted = False
        abort_time = None
        abort_reason = None
        touchdown = False

        t = 0.0
        decim = cfg.trace_decimation
        for k in range(n_steps):
            (v, th, al, q, x, z, t_eng, de, de_rate,
             ox1, ox2, ox3, *ship_states) = y
            hf = tuple(ship_states[0:4])
            pf = tuple(ship_states[4:8])

            # --- per-step draws (held over the four RK4 stages)
            if ship_since_draw < 0 or ship_since_draw + 1 >= hold_steps:
                if ship_on:
                    u_heave = ship_rng.normal(0.0, sig_h)
                    u_pitch = ship_rng.normal(0.0, sig_p)
                ship_since_draw = 0
            else:
                ship_since_draw += 1
            z_g = 1.21 * hf[0]
            theta_s = 0.773 * pf[2]
            lp_x = ship_params.x_g - 81.0 * math.cos(theta_s)
            lp_z = z_g - 81.0 * math.sin(theta_s)
            wind = env.wind.sample(t, x, ship_params.x_g)
            noise = env.noise.sample(t)

            gamma = th - al
            theta_meas = th + noise
            y_op = theta_meas - theta_star
            zdot = v * math.sin(gamma) + wind.w_g
            xdot = v * math.cos(gamma) + wind.u_g

            # --- control stack (zero-order hold over the step)
            z_r = 0.0
            zdot_r = 0.0
            if approach:
                z_r = lp_z + math.tan(glide_slope) * (lp_x - x)
                if ship_on:
                    th_s_rate = 0.773 * pf[3]
                    xl_rate = 81.0 * math.sin(theta_s) * th_s_rate
                    zl_rate = 1.21 * hf[1] - 81.0 * math.cos(theta_s) * th_s_rate
                else:
                    xl_rate = zl_rate = 0.0
                ff = zl_rate + math.tan(glide_slope) * (xl_rate - xdot)
                zdot_r = guid.step(z_r, z, dt, feedforward=ff)
                theta_r = sink.step(zdot_r, zdot, dt)
            elif sink_scenario:
                zdot_r = zdot_cmd
                theta_r = sink.step(zdot_r, zdot, dt)
            else:
                theta_r = theta_cmd
            if theta_r < theta_r_lo:
                theta_r = theta_r_lo
            elif theta_r > theta_r_hi:
                theta_r = theta_r_hi

            try:
                if use_truth:
                    d_truth = self._qdot(v, th, al, q, de, t_eng, wind) - (
                        gains.dqdot_dq * q
                        + gains.dqdot_dde * (de - trim.delta_e_star) * RAD2DEG)
                    ox1, ox2, ox3 = th - theta_star, q, d_truth
            except (OutOfTableRange, NonFiniteDerivative) as exc:
                aborted = True
                abort_time = t
                abort_reason = f"{type(exc).__name__}: {exc}"
                break

            obs_state = ObserverState(ox1, ox2, ox3)
            if use_pid:
                de_cmd = pid.step(theta_r, theta_meas, dt)
                dde_deg = (de_cmd - trim.delta_e_star) * RAD2DEG
                h_theta = gains.dqdot_dq * ox2 + gains.dqdot_dde * dde_deg
            else:
                de_cmd, h_theta = opd.step(theta_r, theta_meas, obs_state)

            thrust_cmd = vel.step(v_star, v, vdot_prev, dt)
            de_cmd, thrust_cmd, flags = saturate_inputs(de_cmd, thrust_cmd,
                                                        params)
            if flags.elevator:
                sat_e_count += 1
            if flags.thrust:
                sat_t_count += 1

            # --- trace emission at the step head
            if k % decim == 0:
                try:
                    qdot_now = self._qdot(v, th, al, q, de, t_eng, wind)
                except (OutOfTableRange, NonFiniteDerivative) as exc:
                    aborted = True
                    abort_time = t
                    abort_reason = f"{type(exc).__name__}: {exc}"
                    break
                d_true = qdot_now - h_theta
                trace.append((
                    t, v, th, al, q, x, z, gamma, de, t_eng, theta_r,
                    zdot_r, z_r, ox1, ox2, ox3, d_true, wind.u_g, wind.w_g,
                    wind.u1, wind.u2, wind.u3, wind.w1, wind.w2, wind.w3,
                    z_g, theta_s, lp_x, lp_z, noise,
                    1 if flags.elevator else 0, 1 if flags.thrust else 0,
                ))
                obs_err_sq += (ox3 - d_true) ** 2

            t_hist.append(t)
            theta_hist.append(th)
            if sink_scenario:
                zdot_hist.append(zdot)
            if approach:
                dev_hist.append((t, abs(z - z_r)))
                if t >= cfg.metric_skip_s:
                    theta_err_sq += (th - theta_r) ** 2
                    theta_err_n += 1

            # --- coupled derivative with held inputs
            u_h = u_heave if ship_on else 0.0
            u_p = u_pitch if ship_on else 0.0

            def f(_t, s):
                (sv, sth, sal, sq, sx, sz, st_eng, sde, sde_rate,
                 sx1, sx2, sx3, h0, h1, h2, h3, p0, p1, p2, p3) = s
                ga = sth - sal
                sin_g = math.sin(ga)
                cos_g = math.cos(ga)
                if wind.u_g != 0.0 or wind.w_g != 0.0:
                    vax = sv * cos_g - wind.u_g
                    vaz = sv * sin_g - wind.w_g
                    v_air = math.hypot(vax, vaz)
                    alpha_air = sth - math.atan2(vaz, vax)
                else:
                    v_air = sv
                    alpha_air = sal
                q_hat = sq * params.c_bar / (2.0 * v_air)
                cl, cd, cm = model.coefficients(alpha_air, q_hat, sde)
                qbar_s = 0.5 * params.rho * v_air * v_air * params.s_ref
                lift = qbar_s * cl
                drag = qbar_s * cd
                moment = qbar_s * params.c_bar * cm
                sin_a = math.sin(sal)
                cos_a = math.cos(sal)
                m = params.m
                dv = (st_eng * cos_a - drag) / m - params.g * sin_g
                dal = sq - (st_eng * sin_a + lift) / (m * sv) \
                    + params.g * cos_g / sv
                dq = moment / params.j_y
                dx = sv * cos_g + wind.u_g
                dz = sv * sin_g + wind.w_g
                d_eng = (thrust_cmd - st_eng) / tau_eng
                dd_rate = w2a * (de_cmd - sde) - two_zw * sde_rate
                do1, do2, do3 = observer_derivative(
                    (sx1, sx2, sx3), y_op, h_theta, obs_p)
                dh = _ship_filter_derivative((h0, h1, h2, h3), u_h)
                dp = _ship_filter_derivative((p0, p1, p2, p3), u_p)
                return (dv, sq, dal, dq, dx, dz, d_eng, sde_rate, dd_rate,
                        do1, do2, do3) + dh + dp

            try:
                y = rk4_step(f, (v, th, al, q, x, z, t_eng, de, de_rate,
                                 ox1, ox2, ox3) + hf + pf, t, dt)
            except (OutOfTableRange, NonFiniteDerivative) as exc:
                aborted = True
                abort_time = t
                abort_reason = f"{type(exc).__name__}: {exc}"
                break

            # project actuator states onto their physical ranges
            y = list(y)
            if y[6] < 0.0:
                y[6] = 0.0
            elif y[6] > params.t_max:
                y[6] = params.t_max
            if y[7] < params.elevator_min:
                y[7] = params.elevator_min
                if y[8] < 0.0:
                    y[8] = 0.0
            elif y[7] > params.elevator_max:
                y[7] = params.elevator_max
                if y[8] > 0.0:
                    y[8] = 0.0
            if not all(math.isfinite(c) for c in y):
                aborted = True
                abort_time = t
                abort_reason = "non-finite state after step"
                break
            y = tuple(y)

            vdot_prev = (y[0] - v_prev) / dt
            v_prev = y[0]
            t += dt

            if approach and y[4] >= lp_x and y[5] <= lp_z:
                touchdown = True
                metrics.touchdown_time = t
                metrics.touchdown_vertical_error = lp_z - y[5]
                break

        # ------------------------------------------------ metrics
        metrics.elevator_saturation_count = sat_e_count
        metrics.thrust_saturation_count = sat_t_count
        if trace:
            metrics.observer_rms_error = math.sqrt(obs_err_sq / len(trace))
        if pitch_scenario and t_hist:
            target = theta_cmd
            st = settle_time(t_hist, theta_hist, target)
            metrics.settle_time_2pct = st
            metrics.settled = st is not None
            tail = max(1, int(1.0 / dt))
            tail_vals = theta_hist[-tail:]
            metrics.steady_state_error = abs(
                sum(tail_vals) / len(tail_vals) - target) / abs(target)
            step_size = target - theta_star
            if step_size != 0.0:
                peak = max((th - target) / step_size for th in theta_hist)
                metrics.overshoot = max(0.0, peak)
        if sink_scenario and zdot_hist:
            target = zdot_cmd
            st = settle_time(t_hist, zdot_hist, target)
            metrics.settle_time_2pct = st
            metrics.settled = st is not None
            tail = max(1, int(1.0 / dt))
            tail_vals = zdot_hist[-tail:]
            metrics.steady_state_error = abs(
                sum(tail_vals) / len(tail_vals) - target) / abs(target)
            direction = -1.0 if target < 0.0 else 1.0  # starts from level flight
            peak = max((zd - target) * direction for zd in zdot_hist)
            metrics.overshoot = max(0.0, peak / abs(target))
        if approach and dev_hist:
            skip = self.cfg.metric_skip_s
            devs = [d for (tt, d) in dev_hist if tt >= skip]
            if devs:
                metrics.max_glidepath_deviation = max(devs)
            if theta_err_n:
                metrics.pitch_ref_rms_error = math.sqrt(
                    theta_err_sq / theta_err_n)
            metrics.settled = touchdown

        return RunResult(config=self.cfg, trace=trace, metrics=metrics,
                         aborted=aborted, abort_time=abort_time,
                         abort_reason=abort_reason, trim=self.trim,
                         linear=self.linear)

    # ------------------------------------------------------------------
    def _qdot(self, v, th, al, q, de, thrust, wind) -> float:
        """Pitch acceleration at the given point (for d_true and truth mode)."""
        st = AircraftState(v, th, al, q)
        return state_derivative(st, ControlInputs(de, thrust),
                                wind if (wind.u_g or wind.w_g) else None,
                                self.model, self.params)[3]


def run_scenario(config: ScenarioConfig,
                 params: AircraftParams | None = None,
                 model: AeroModel | None = None) -> RunResult:
    """Run one scenario to completion (duration, touchdown or abort)."""
    return Simulation(config, params=params, model=model).run()


@dataclass
class ComparisonResult:
    opd: RunResult
    pid: RunResult

    @property
    def speedup_ratio(self) -> float | None:
        a = self.opd.metrics.settle_time_2pct
        b = self.pid.metrics.settle_time_2pct
        if a and b and a > 0.0:
            return b / a
        return None

    @property
    def fraction_faster(self) -> float | None:
        r = self.speedup_ratio
        return None if r is None else 1.0 - 1.0 / r


def compare_controllers(config: ScenarioConfig,
                        params: AircraftParams | None = None,
                        model: AeroModel | None = None) -> ComparisonResult:
    """Run the observer-PD and PID laws against identical environments."""
    cfg_opd = config_from_dict({"controller": "opd"}, base=config)
    cfg_pid = config_from_dict({"controller": "pid"}, base=config)
    return ComparisonResult(
        opd=run_scenario(cfg_opd, params=params, model=model),
        pid=run_scenario(cfg_pid, params=params, model=model),
    )


def write_trace_csv(path, trace, header=TRACE_HEADER) -> None:
    """Write a trace with deterministic float formatting."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in trace:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(v, ".10g")
