"""
Command-line entry point.

Subcommands:
    trim        solve and print the level-flight trim point
    linearize   print the small-perturbation state-space model
    run         run one scenario, writing trace.csv / metrics.json /
                resolved_config.json into the output directory
    compare     run the observer-PD and PID pitch laws against the same
                seeded environment and write paired outputs
    sweep       repeat a scenario over consecutive seeds and aggregate

Configuration precedence: built-in defaults, then --config file, then
--set key=value overrides (repeatable).  `run --help` lists the
available keys.  Every run writes a resolved_config.json snapshot that
reproduces the run byte-for-byte when passed back via --config.

Exit codes: 0 success, 2 usage or configuration error, 3 model abort
(simulation left its valid envelope), 4 run completed but a required
settling check failed (--require-settled).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .airframe import AeroModel, AircraftParams, default_aero_model
from .sim import (CONFIG_KEYS, ConfigError, RunResult, ScenarioConfig,
                  compare_controllers, config_from_dict, config_to_dict,
                  run_scenario, write_trace_csv)
from .trimlin import eigenmodes, linearize, solve_trim

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ABORT = 3
EXIT_UNSETTLED = 4

OUT_ROOT_ENV = "CARRIERLAND_OUT"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carrierland",
        description="Closed-loop carrier-landing simulation for an "
                    "F/A-18-class aircraft.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_trim = sub.add_parser("trim", help="solve the level-flight trim point")
    _add_model_args(p_trim)
    p_trim.set_defaults(func=cmd_trim)

    p_lin = sub.add_parser("linearize",
                           help="print the linear model at the trim point")
    _add_model_args(p_lin)
    p_lin.set_defaults(func=cmd_linearize)

    p_run = sub.add_parser(
        "run", help="run one scenario",
        epilog="config keys: " + ", ".join(sorted(CONFIG_KEYS)))
    _add_run_args(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare",
                           help="run opd and pid against the same environment")
    _add_run_args(p_cmp, controller_choice=False)
    p_cmp.set_defaults(func=cmd_compare)

    p_sweep = sub.add_parser("sweep", help="repeat a scenario over seeds")
    _add_run_args(p_sweep)
    p_sweep.add_argument("--runs", type=int, default=10,
                         help="number of consecutive seeds (default 10)")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def _add_model_args(p):
    p.add_argument("--aero-model", help="path to an aero model JSON file")
    p.add_argument("--airspeed", type=float, default=None,
                   help="candidate trim airspeed, m/s")


def _add_run_args(p, controller_choice=True):
    p.add_argument("--config", help="JSON file of config keys")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--out", help="output directory (default: under "
                   f"${OUT_ROOT_ENV} or ./runs)")
    p.add_argument("--scenario", choices=("pitch_step", "sink_step", "approach"))
    if controller_choice:
        p.add_argument("--controller", choices=("opd", "pid", "opd_truth"))
    p.add_argument("--seed", type=int)
    p.add_argument("--duration", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--wind", choices=("on", "off"))
    p.add_argument("--noise", choices=("on", "off"))
    p.add_argument("--ship", choices=("on", "off"))
    p.add_argument("--require-settled", action="store_true",
                   help="exit 4 when the scenario metric does not settle")


def resolve_config(args, controller_choice=True) -> ScenarioConfig:
    cfg = ScenarioConfig()
    if args.config:
        with open(args.config) as f:
            data = json.load(f)
        cfg = config_from_dict(data, base=cfg)
    overrides: dict = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got '{item}'")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    for name, key in (("scenario", "scenario"), ("seed", "seed"),
                      ("duration", "duration"), ("dt", "dt")):
        v = getattr(args, name, None)
        if v is not None:
            overrides[key] = v
    if controller_choice and getattr(args, "controller", None) is not None:
        overrides["controller"] = args.controller
    for name, key in (("wind", "wind_on"), ("noise", "noise_on"),
                      ("ship", "ship_on")):
        v = getattr(args, name, None)
        if v is not None:
            overrides[key] = v
    cfg = config_from_dict(overrides, base=cfg)
    cfg.validate()
    return cfg


def out_dir_for(args, name: str) -> str:
    if args.out:
        return args.out
    root = os.environ.get(OUT_ROOT_ENV, "runs")
    return os.path.join(root, name)


def cmd_trim(args) -> int:
    params = AircraftParams()
    model = (AeroModel.from_file(args.aero_model) if args.aero_model
             else default_aero_model())
    kwargs = {} if args.airspeed is None else {"v_target": args.airspeed}
    tp = solve_trim(params, model, **kwargs)
    print(f"airspeed        {tp.v_t_star:12.4f} m/s")
    print(f"alpha = theta   {math.degrees(tp.alpha_star):12.4f} deg")
    print(f"pitch rate      {tp.q_star:12.4f} rad/s")
    print(f"flight path     {tp.gamma_star:12.4f} rad")
    print(f"elevator        {math.degrees(tp.delta_e_star):12.4f} deg")
    print(f"thrust          {tp.thrust_star:12.1f} N")
    print(f"residuals       {tp.residuals[0]:.2e} {tp.residuals[1]:.2e} "
          f"{tp.residuals[2]:.2e}")
    return EXIT_OK


def cmd_linearize(args) -> int:
    params = AircraftParams()
    model = (AeroModel.from_file(args.aero_model) if args.aero_model
             else default_aero_model())
    kwargs = {} if args.airspeed is None else {"v_target": args.airspeed}
    tp = solve_trim(params, model, **kwargs)
    lm = linearize(tp, params, model)
    print("A (dV_T, dtheta, dalpha, dq):")
    for row in lm.a:
        print("  " + " ".join(f"{v:12.6f}" for v in row))
    print("B (ddelta_e [rad], ddelta_t):")
    for row in lm.b:
        print("  " + " ".join(f"{v:12.6f}" for v in row))
    modes = eigenmodes(lm)
    for ev, label in zip(modes.eigenvalues, modes.labels):
        name = label or "unlabeled"
        print(f"  {ev.real:+.6f} {ev.imag:+.6f}j  {name}")
    return EXIT_OK


def _emit_run(result: RunResult, out_dir: str, suffix: str = "") -> None:
    os.makedirs(out_dir, exist_ok=True)
    tag = f"_{suffix}" if suffix else ""
    write_trace_csv(os.path.join(out_dir, f"trace{tag}.csv"), result.trace)
    payload = result.metrics.to_dict()
    payload["aborted"] = result.aborted
    if result.aborted:
        payload["abort_time"] = result.abort_time
        payload["abort_reason"] = result.abort_reason
    with open(os.path.join(out_dir, f"metrics{tag}.json"), "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _emit_config(cfg: ScenarioConfig, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "resolved_config.json"), "w") as f:
        json.dump(config_to_dict(cfg), f, indent=2, sort_keys=True)
        f.write("\n")


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    out_dir = out_dir_for(args, f"{cfg.scenario}_{cfg.controller}_s{cfg.seed}")
    result = run_scenario(cfg)
    _emit_config(cfg, out_dir)
    _emit_run(result, out_dir)
    m = result.metrics
    if result.aborted:
        print(f"model abort at t={result.abort_time:.3f} s: "
              f"{result.abort_reason}", file=sys.stderr)
        print(f"partial trace written to {out_dir}", file=sys.stderr)
        return EXIT_ABORT
    _print_summary(cfg, m)
    print(f"outputs written to {out_dir}")
    if args.require_settled and not m.settled:
        print("required settling not achieved", file=sys.stderr)
        return EXIT_UNSETTLED
    return EXIT_OK


def _print_summary(cfg: ScenarioConfig, m) -> None:
    print(f"scenario={cfg.scenario} controller={cfg.controller} "
          f"seed={cfg.seed}")
    if m.settle_time_2pct is not None:
        print(f"  settle (2%):        {m.settle_time_2pct:.3f} s")
    elif cfg.scenario != "approach":
        print("  settle (2%):        not settled")
    if m.steady_state_error is not None:
        print(f"  steady-state error: {100 * m.steady_state_error:.3f} %")
    if m.overshoot is not None:
        print(f"  overshoot:          {100 * m.overshoot:.2f} %")
    if m.max_glidepath_deviation is not None:
        print(f"  max path deviation: {m.max_glidepath_deviation:.2f} m")
    if m.pitch_ref_rms_error is not None:
        print(f"  pitch RMS vs ref:   {math.degrees(m.pitch_ref_rms_error):.3f} deg")
    if m.touchdown_time is not None:
        print(f"  touchdown:          {m.touchdown_time:.2f} s "
              f"(vertical error {m.touchdown_vertical_error:.2f} m)")
    print(f"  saturation steps:   elevator {m.elevator_saturation_count}, "
          f"thrust {m.thrust_saturation_count}")
    if m.observer_rms_error is not None:
        print(f"  observer RMS error: {m.observer_rms_error:.4f} rad/s^2")


def cmd_compare(args) -> int:
    cfg = resolve_config(args, controller_choice=False)
    out_dir = out_dir_for(args, f"compare_{cfg.scenario}_s{cfg.seed}")
    result = compare_controllers(cfg)
    _emit_config(cfg, out_dir)
    _emit_run(result.opd, out_dir, suffix="opd")
    _emit_run(result.pid, out_dir, suffix="pid")
    summary = {
        "opd_settle_s": result.opd.metrics.settle_time_2pct,
        "pid_settle_s": result.pid.metrics.settle_time_2pct,
        "speedup_ratio": result.speedup_ratio,
        "fraction_faster": result.fraction_faster,
    }
    with open(os.path.join(out_dir, "comparison.json"), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    for name, res in (("opd", result.opd), ("pid", result.pid)):
        st = res.metrics.settle_time_2pct
        state = f"{st:.3f} s" if st is not None else "not settled"
        extra = " (aborted)" if res.aborted else ""
        print(f"  {name}: settle {state}{extra}")
    if result.speedup_ratio is not None:
        print(f"  speedup: {result.speedup_ratio:.2f}x "
              f"({100 * result.fraction_faster:.0f}% faster)")
    print(f"outputs written to {out_dir}")
    if result.opd.aborted or result.pid.aborted:
        return EXIT_ABORT
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    if args.runs < 1:
        raise ConfigError("--runs must be >= 1")
    out_dir = out_dir_for(args, f"sweep_{cfg.scenario}_{cfg.controller}")
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    any_abort = False
    for k in range(args.runs):
        run_cfg = config_from_dict({"seed": cfg.seed + k}, base=cfg)
        run_dir = os.path.join(out_dir, f"seed_{run_cfg.seed}")
        result = run_scenario(run_cfg)
        _emit_config(run_cfg, run_dir)
        _emit_run(result, run_dir)
        any_abort = any_abort or result.aborted
        m = result.metrics
        rows.append((run_cfg.seed, m.settle_time_2pct, m.steady_state_error,
                     m.max_glidepath_deviation, result.aborted))
    agg_path = os.path.join(out_dir, "aggregate.csv")
    with open(agg_path, "w") as f:
        f.write("seed,settle_time_2pct,steady_state_error,"
                "max_glidepath_deviation,aborted\n")
        for seed, st, ss, dev, ab in rows:
            f.write(f"{seed},{_opt(st)},{_opt(ss)},{_opt(dev)},{int(ab)}\n")
    settled = [st for _, st, _, _, _ in rows if st is not None]
    print(f"{len(rows)} runs -> {out_dir}")
    if settled:
        print(f"  settled {len(settled)}/{len(rows)}, "
              f"settle range {min(settled):.3f}-{max(settled):.3f} s")
    return EXIT_ABORT if any_abort else EXIT_OK


def _opt(v) -> str:
    return "" if v is None else format(v, ".10g")


if __name__ == "__main__":
    sys.exit(main())
