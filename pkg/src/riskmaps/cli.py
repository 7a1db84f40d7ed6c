"""Command-line entry point: ``python -m riskmaps <command>``.

Commands write CSV/JSON only; plotting is left to whatever tool reads them.
Exit codes: 0 success, 1 acceptance failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import acceptance
from .campaign import run_campaign
from .config import ConfigError, EngineConfig, dump_engine_config, load_engine_config
from .planner import plan, render_risk_map
from .scenarios import DRIVER_TYPES, SCENARIO_NAMES, resolve_scenario
from .simulator import run, scene_at, write_trace

OUT_ENV = "RISKMAPS_OUT"
DEFAULT_OUT = "riskmaps-out"


class UsageError(Exception):
    pass


def parse_driver(text: str) -> list:
    """``defensive|normal|confident|all`` or ``alpha=<float>``."""
    if text == "all":
        return list(DRIVER_TYPES)
    if text in DRIVER_TYPES:
        return [text]
    if text.startswith("alpha="):
        try:
            alpha = float(text.split("=", 1)[1])
        except ValueError:
            raise UsageError(f"cannot parse driver {text!r}") from None
        if not 0.04 <= alpha <= 1.0:
            raise UsageError(f"alpha must lie in [0.04, 1.0], got {alpha}")
        return [alpha]
    raise UsageError(f"unknown driver {text!r}; use defensive, normal, confident, all or alpha=<float>")


def output_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def engine_config(args) -> EngineConfig:
    config = load_engine_config(args.config)
    if getattr(args, "interp", None):
        config = replace(config, estimator=replace(config.estimator, interpolation=args.interp))
    return config


def _specs(scenarios, drivers):
    try:
        return [resolve_scenario(name, d) for name in scenarios for d in drivers]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def cmd_estimate(args) -> int:
    config = engine_config(args)
    specs = _specs(args.scenario or SCENARIO_NAMES, parse_driver(args.driver))
    out = output_dir(args)
    report, _ = run_campaign(specs, config, out)
    report.write(out)
    print(report.format_table())
    print(f"wrote {out / 'table.csv'} and {len(specs)} run folders under {out / 'runs'}")
    return 0


def cmd_warn(args) -> int:
    config = engine_config(args)
    out = output_dir(args)
    lines = []
    for spec in _specs([args.scenario], parse_driver(args.driver)):
        trace = run(spec, config)
        run_dir = out / spec.name / spec.driver_type
        manifest = write_trace(trace, run_dir)
        report = manifest["errors"]
        (run_dir / "errors.json").write_text(json.dumps(
            {"scenario": spec.name, "driver_type": spec.driver_type, "warning_alpha": trace.warning_alpha, **report},
            indent=2, sort_keys=True))
        p, b = report["personalized"], report["baseline"]
        lines.append(f"{spec.name} {spec.driver_type} (alpha={trace.warning_alpha:g}, wants warning: "
                     f"{'yes' if report['driver_wants_warning'] else 'no'}): personalized {p['run_class']}"
                     f"{_when(p['first_warning'])}, baseline {b['run_class']}{_when(b['first_warning'])}")
    print("\n".join(lines))
    return 0


def _when(t):
    return "" if t is None else f" at t={t:.1f} s"


def cmd_riskmap(args) -> int:
    config = engine_config(args)
    out = output_dir(args)
    specs = _specs([args.scenario], parse_driver(args.driver))
    if len(specs) != 1:
        raise UsageError("riskmap needs a single driver")
    spec = specs[0]
    if not 0.0 <= args.time <= spec.duration:
        raise UsageError(f"time {args.time} s is outside the run [0, {spec.duration}] s")
    k = int(round(args.time / spec.step))
    trace = run(replace(spec, duration=max(k, 1) * spec.step), config)
    scene = scene_at(trace.states[k], spec)
    alpha = args.alpha if args.alpha is not None else spec.driver_alpha
    overlays = []
    if scene.others:
        overlays.append(("planned", plan(scene, alpha, config.planner).best_profile))
    grid = render_risk_map(scene, alpha, config.planner, v_max=args.vmax, overlays=overlays)
    out.mkdir(parents=True, exist_ok=True)
    stem = out / f"riskmap-{spec.name}-{spec.driver_type}-t{k * spec.step:g}"
    Path(f"{stem}.csv").write_text(grid.to_csv())
    Path(f"{stem}.json").write_text(grid.to_json())
    print(f"alpha={alpha:g} t={k * spec.step:g} s: {grid.spot_area()} cells above 1e-4, "
          f"max risk {float(np.max(grid.risk_values)):.3g}; wrote {stem}.csv and {stem}.json")
    return 0


def cmd_reproduce(args) -> int:
    config = engine_config(args)
    out = output_dir(args)
    results, ctx = acceptance.run_all(config, out)
    ctx.report.write(out)
    (out / "engine.yaml").write_text(dump_engine_config(config))
    (out / "acceptance.json").write_text(json.dumps(
        [{"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail,
          "seconds": round(r.seconds, 2)} for r in results], indent=2))
    print(ctx.report.format_table())
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print("failed criteria: " + ", ".join(str(r.number) for r in failed), file=sys.stderr)
        return 1
    print(f"all criteria passed; report in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="engine config (YAML); defaults to the frozen calibration")
    common.add_argument("--out", help=f"output directory (else ${OUT_ENV}, else ./{DEFAULT_OUT})")
    common.add_argument("--interp", choices=("linear", "sigmoid"), help="estimator interpolation")

    parser = argparse.ArgumentParser(prog="riskmaps", description="Personalized Risk Maps experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="driver-type estimation campaign")
    p.add_argument("--scenario", action="append", help="built-in name or scenario file; repeatable")
    p.add_argument("--driver", default="all")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("warn", parents=[common], help="personalized vs baseline warning for one scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--driver", default="defensive")
    p.set_defaults(func=cmd_warn)

    p = sub.add_parser("riskmap", parents=[common], help="velocity-time risk grid at one instant")
    p.add_argument("--scenario", required=True)
    p.add_argument("--driver", default="defensive")
    p.add_argument("--time", type=float, required=True, help="seconds into the run")
    p.add_argument("--alpha", type=float, help="risk factor for the grid (default: the driver's)")
    p.add_argument("--vmax", type=float, default=30.0)
    p.set_defaults(func=cmd_riskmap)

    p = sub.add_parser("reproduce", parents=[common], help="run every acceptance campaign")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
