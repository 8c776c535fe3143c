"""Command-line front end.

Subcommands evaluate analytic curves, run simulations, compare the two,
sweep parameters, dump mobility trails and distance laws, and emit a risk
report with a warning flag.  Every command is deterministic given (flags,
config, seed); exit codes: 0 success, 2 config/usage, 3 numerical failure,
4 comparison failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__, analytic, distributions, mobility, montecarlo
from .scenario import (
    ConfigError,
    RandomWalk,
    ScenarioConfig,
    ValidationError,
    parse_config,
    serialize_config,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_COMPARISON = 4

_MODEL_FNS = {
    "static": analytic.p_inf_static,
    "rd": analytic.p_inf_rd,
    "rwk": analytic.p_inf_rwk,
    "rwp": analytic.p_inf_rwp,
}


def _load_config(path: str | None, strict: bool = False) -> ScenarioConfig:
    if path is None:
        return parse_config("")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), strict=strict)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, command: str, header: list[str], rows) -> None:
    lines = [f"# edge-epirisk v{__version__} {command}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def parse_grid(spec: str) -> np.ndarray:
    """Parse lo:hi:steps[:log] into a grid (steps=0 gives an empty grid)."""
    parts = spec.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ConfigError(f"bad grid spec {spec!r}, expected lo:hi:steps[:log]")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"bad grid spec {spec!r}") from None
    if steps < 0:
        raise ConfigError("grid steps must be >= 0")
    if steps == 0:
        return np.empty(0)
    if steps == 1:
        return np.array([lo])
    if len(parts) == 4:
        if lo <= 0 or hi <= 0:
            raise ConfigError("log grid needs positive endpoints")
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    mc = cfg.mc
    if getattr(args, "seed", None) is not None:
        mc = dataclasses.replace(mc, seed=args.seed)
    if getattr(args, "workers", None) is not None:
        mc = dataclasses.replace(mc, workers=args.workers)
    if getattr(args, "trials", None) is not None:
        mc = dataclasses.replace(mc, trials=args.trials)
    return dataclasses.replace(cfg, mc=mc)


def _model_fn(cfg: ScenarioConfig, model: str | None):
    name = model or cfg.mobility.model
    if name in ("rwk", "rwp") and cfg.mobility.model != name:
        raise ConfigError(
            f"--model {name} needs matching mobility parameters (config has {cfg.mobility.model!r})"
        )
    return name, _MODEL_FNS[name]


def _with_vth(cfg: ScenarioConfig, vth: float) -> ScenarioConfig:
    return dataclasses.replace(cfg, vol_threshold=float(vth))


def cmd_analytic(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    name, fn = _model_fn(cfg, args.model)
    grid = np.sort(parse_grid(args.grid)) if args.grid else np.array([cfg.vol_threshold])
    rows = [(vth, fn(_with_vth(cfg, vth)).p_inf) for vth in grid]
    _write_csv(args.out, "analytic", ["v_th", "p_inf"], rows)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    est = montecarlo.estimate_p_inf(cfg, mode=args.mode)
    if est.trials < 100:
        print(f"warning: only {est.trials} trials, error bars are unreliable", file=sys.stderr)
    _write_csv(
        args.out,
        "simulate",
        ["p_hat", "std_err", "ci_lo", "ci_hi", "trials", "seed"],
        [(est.p_inf_hat, est.std_err, est.ci95[0], est.ci95[1], est.trials, est.seed)],
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    name, fn = _model_fn(cfg, args.model)
    grid = np.sort(parse_grid(args.grid))
    rows = []
    all_pass = True
    for vth in grid:
        c = _with_vth(cfg, vth)
        p_a = fn(c).p_inf
        est = montecarlo.estimate_p_inf(c, mode=args.mode)
        gap = abs(p_a - est.p_inf_hat)
        ok = gap <= 3.0 * est.std_err + 0.03
        all_pass = all_pass and ok
        rows.append((vth, p_a, est.p_inf_hat, est.std_err, gap, ok))
    _write_csv(
        args.out,
        "compare",
        ["v_th", "p_analytic", "p_mc", "std_err", "gap", "pass"],
        rows,
    )
    return EXIT_OK if all_pass else EXIT_COMPARISON


_SWEEP_PARAMS = ("n_infected", "path_loss", "vol_threshold", "radius", "step")


def _sweep_cfg(cfg: ScenarioConfig, param: str, value: float) -> ScenarioConfig:
    if param == "n_infected":
        return dataclasses.replace(cfg, n_infected=int(value))
    if param == "path_loss":
        return dataclasses.replace(cfg, path_loss=value)
    if param == "vol_threshold":
        return dataclasses.replace(cfg, vol_threshold=value)
    if param == "radius":
        return dataclasses.replace(cfg, radius=value)
    if param == "step":
        m = cfg.mobility
        if isinstance(m, RandomWalk):
            return dataclasses.replace(cfg, mobility=dataclasses.replace(m, step=value))
        if m.model == "rd":
            return dataclasses.replace(cfg, mobility=dataclasses.replace(m, step_max=value))
        raise ConfigError("sweep parameter 'step' needs rd or rwk mobility")
    raise ConfigError(f"unknown sweep parameter {param!r}, expected one of {', '.join(_SWEEP_PARAMS)}")


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    name, fn = _model_fn(cfg, args.model)
    if args.parameter not in _SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {args.parameter!r}, expected one of {', '.join(_SWEEP_PARAMS)}")
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad sweep values {args.values!r}") from None
    grid = np.sort(parse_grid(args.grid)) if args.grid else np.array([cfg.vol_threshold])
    rows = []
    for value in values:
        base = _sweep_cfg(cfg, args.parameter, value)
        for vth in grid:
            c = base if args.parameter == "vol_threshold" else _with_vth(base, vth)
            rows.append((value, c.vol_threshold, fn(c).p_inf))
    _write_csv(args.out, "sweep", ["param_value", "v_th", "p_inf"], rows)
    return EXIT_OK


def cmd_trails(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    duration = args.duration if args.duration is not None else (cfg.detention_time or 2000.0)
    dt = cfg.mc.time_step
    pos = mobility.simulate_positions(
        cfg.mobility,
        cfg.radius,
        args.individuals,
        duration,
        dt,
        burn_in=0,
        seed=cfg.mc.seed,
    )
    rows = []
    for i in range(pos.shape[1]):
        for k in range(pos.shape[0]):
            rows.append((i, k, k * dt, pos[k, i, 0], pos[k, i, 1]))
    _write_csv(args.out, "trails", ["individual", "step", "t", "x", "y"], rows)
    return EXIT_OK


def cmd_dump_law(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    law = distributions.stationary_law(cfg)
    if args.nearest:
        law = distributions.nearest_of_n(law, cfg.n_infected)
    table = distributions.tabulate(law, args.points)
    _write_csv(args.out, "dump-law", ["x", "pdf", "cdf"], map(tuple, table))
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    name, fn = _model_fn(cfg, None)
    res = fn(cfg)
    lines = ["# edge-epirisk v%s report" % __version__]
    lines += [ln for ln in serialize_config(cfg).splitlines()]
    lines.append(f"model = {name}")
    lines.append(f"p_inf = {_fmt(res.p_inf)}")
    lines.append(f"r_total = {_fmt(res.r_total)}")
    lines.append(f"quadrature_error = {_fmt(res.quadrature_error_estimate)}")
    if res.small_n_approximation:
        lines.append("small_n_approximation = true")
    if args.with_mc:
        est = montecarlo.estimate_p_inf(cfg)
        lines.append(f"mc.p_hat = {_fmt(est.p_inf_hat)}")
        lines.append(f"mc.std_err = {_fmt(est.std_err)}")
        lines.append(f"mc.mode = {est.mode}")
        lines.append(f"agreement_gap = {_fmt(abs(res.p_inf - est.p_inf_hat))}")
    warn = res.p_inf > args.warn_threshold
    lines.append(f"warn_threshold = {_fmt(args.warn_threshold)}")
    lines.append(f"warn = {_fmt(warn)}")
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edge-epirisk",
        description="Infectious-probability engine for disk-shaped wireless edge cells",
    )
    parser.add_argument("--version", action="version", version=f"edge-epirisk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False):
        p.add_argument("--config", help="scenario config file (key = value lines)")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        p.add_argument("--seed", type=int, help="override mc.seed")
        p.add_argument("--workers", type=int, help="override mc.workers")
        if grid:
            p.add_argument("--grid", help="V_th grid as lo:hi:steps[:log]")

    p = sub.add_parser("analytic", help="analytic p_inf over a V_th grid")
    common(p, grid=True)
    p.add_argument("--model", choices=sorted(_MODEL_FNS))
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate of p_inf")
    common(p)
    p.add_argument("--mode", choices=("auto", "snapshot", "trajectory"), default="auto")
    p.add_argument("--trials", type=int, help="override mc.trials")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="analytic vs Monte-Carlo over a V_th grid")
    common(p, grid=True)
    p.add_argument("--model", choices=sorted(_MODEL_FNS))
    p.add_argument("--mode", choices=("auto", "snapshot", "trajectory"), default="auto")
    p.add_argument("--trials", type=int, help="override mc.trials")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="one analytic curve per parameter value")
    common(p, grid=True)
    p.add_argument("--model", choices=sorted(_MODEL_FNS))
    p.add_argument("--parameter", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trails", help="dump mobility trails as CSV")
    common(p)
    p.add_argument("--individuals", type=int, default=1)
    p.add_argument("--duration", type=float, help="trail duration in seconds")
    p.set_defaults(func=cmd_trails)

    p = sub.add_parser("dump-law", help="tabulate the stationary distance law")
    common(p)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--nearest", action="store_true", help="dump the nearest-of-N law instead")
    p.set_defaults(func=cmd_dump_law)

    p = sub.add_parser("report", help="risk report with warning flag")
    common(p)
    p.add_argument("--warn-threshold", type=float, default=0.5)
    p.add_argument("--with-mc", action="store_true")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
