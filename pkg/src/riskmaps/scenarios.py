"""Built-in scenario catalog and the scenario file format.

Calibrated values are frozen here. Each geometry comes in a high-risk and a
medium-risk variant and is crossed with the three driver types.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import yaml

from .config import ConfigError
from .scene import PathGeometry
from .simulator import DRIVER_ALPHAS, ScenarioSpec, VehicleSpec

DRIVER_TYPES = ("defensive", "normal", "confident")

# Declared warning preferences per (variant, driver type). Defensive drivers
# want to be warned, confident drivers do not want warnings in medium-risk
# traffic, normal drivers want warnings only in high-risk traffic.
WANTS_WARNING = {
    ("high", "defensive"): True,
    ("medium", "defensive"): True,
    ("high", "normal"): True,
    ("medium", "normal"): False,
    ("high", "confident"): True,
    ("medium", "confident"): False,
}

FOLLOWING = {
    "high": dict(gap=45.0, ego_v=16.0, lead_v=13.0, brake=-2.0, brake_start=2.0, brake_end=3.0),
    "medium": dict(gap=45.0, ego_v=16.0, lead_v=13.0, brake=-1.0, brake_start=2.0, brake_end=3.0),
}
FOLLOWING_DESIRED = 20.0

INTERSECTION = {
    "high": dict(ego_dist=60.0, ego_v=12.0, a_dist=42.0, a_v=12.0, b_dist=51.0, b_v=12.0, duration=5.6),
    "medium": dict(ego_dist=80.0, ego_v=12.0, a_dist=82.0, a_v=12.0, b_dist=93.0, b_v=14.0, duration=7.5),
}
INTERSECTION_DESIRED = 12.0
INTERSECTION_CLEARANCE = 10.0
LANE_OFFSET = 1.75


def following(variant: str = "high", driver: str = "defensive", **overrides) -> ScenarioSpec:
    """Straight-lane car following; the lead car brakes once and holds."""
    p = {**FOLLOWING[variant], **overrides}
    path = PathGeometry(((-100.0, 0.0), (3000.0, 0.0)), name="lane")
    ego = VehicleSpec("ego", "lane", 0.0, p["ego_v"])
    lead = VehicleSpec("lead", "lane", p["gap"] + 4.5, p["lead_v"],
                       script=((p["brake_start"], p["brake_end"], p["brake"]),))
    spec = ScenarioSpec(
        name=f"following-{variant}", paths={"lane": path}, vehicles=(ego, lead), driver_type=driver,
        driver_alpha=DRIVER_ALPHAS[driver], duration=p.get("duration", 12.0), step=0.1,
        desired_velocity=p.get("desired", FOLLOWING_DESIRED), wants_warning=WANTS_WARNING[(variant, driver)],
        topology="following", variant=variant)
    return spec


def intersection(variant: str = "high", driver: str = "defensive", **overrides) -> ScenarioSpec:
    """Ego heads east across two perpendicular lanes; one car comes from
    the south, the other from the north."""
    p = {**INTERSECTION[variant], **overrides}
    paths = {
        "east": PathGeometry(((-300.0, 0.0), (600.0, 0.0)), name="east"),
        "north": PathGeometry(((LANE_OFFSET, -300.0), (LANE_OFFSET, 600.0)), name="north"),
        "south": PathGeometry(((-LANE_OFFSET, 300.0), (-LANE_OFFSET, -600.0)), name="south"),
    }
    ego = VehicleSpec("ego", "east", 300.0 - p["ego_dist"], p["ego_v"])
    car_a = VehicleSpec("north_car", "north", 300.0 - p["a_dist"], p["a_v"])
    car_b = VehicleSpec("south_car", "south", 300.0 - p["b_dist"], p["b_v"])
    return ScenarioSpec(
        name=f"intersection-{variant}", paths=paths, vehicles=(ego, car_a, car_b), driver_type=driver,
        driver_alpha=DRIVER_ALPHAS[driver], duration=p.get("duration", 12.0), step=0.1,
        desired_velocity=p.get("desired", INTERSECTION_DESIRED), wants_warning=WANTS_WARNING[(variant, driver)],
        topology="intersection", variant=variant, clear_distance=p.get("clear_distance", INTERSECTION_CLEARANCE))


BUILDERS = {"following": following, "intersection": intersection}
SCENARIO_NAMES = tuple(f"{topo}-{var}" for topo in BUILDERS for var in ("high", "medium"))


def make_scenario(name: str, driver: str = "defensive") -> ScenarioSpec:
    topo, _, variant = name.partition("-")
    if name not in SCENARIO_NAMES:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIO_NAMES)}")
    if driver in DRIVER_ALPHAS:
        return BUILDERS[topo](variant, driver)
    return BUILDERS[topo](variant, "normal").with_driver(driver)


def builtin_scenarios() -> list[ScenarioSpec]:
    return [make_scenario(name, d) for name in SCENARIO_NAMES for d in DRIVER_TYPES]


# -- file format ------------------------------------------------------------

def scenario_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "name": spec.name,
        "topology": spec.topology,
        "variant": spec.variant,
        "driver": {"type": spec.driver_type, "alpha": spec.driver_alpha},
        "duration": spec.duration,
        "step": spec.step,
        "desired_velocity": spec.desired_velocity,
        "wants_warning": spec.wants_warning,
        "warning_alpha": spec.warning_alpha,
        "clear_distance": spec.clear_distance,
        "paths": {k: [list(p) for p in path.waypoints] for k, path in spec.paths.items()},
        "vehicles": [
            {"name": v.name, "path": v.path, "position": v.position, "velocity": v.velocity,
             "length": v.length, "width": v.width, "script": [list(seg) for seg in v.script]}
            for v in spec.vehicles
        ],
    }


def scenario_from_dict(d: dict) -> ScenarioSpec:
    try:
        driver = d["driver"]
        if isinstance(driver, str):
            driver = {"type": driver}
        dtype = str(driver.get("type", "custom"))
        alpha = driver.get("alpha", DRIVER_ALPHAS.get(dtype))
        if alpha is None:
            raise ConfigError(f"driver {dtype!r} needs an explicit alpha")
        paths = {k: PathGeometry(tuple(tuple(p) for p in pts), name=k) for k, pts in d["paths"].items()}
        vehicles = tuple(
            VehicleSpec(v["name"], v["path"], float(v["position"]), float(v["velocity"]),
                        float(v.get("length", 4.5)), float(v.get("width", 1.8)),
                        tuple(tuple(seg) for seg in v.get("script", ())))
            for v in d["vehicles"]
        )
        wa = d.get("warning_alpha")
        return ScenarioSpec(
            name=str(d["name"]), paths=paths, vehicles=vehicles, driver_type=dtype, driver_alpha=float(alpha),
            duration=float(d.get("duration", 10.0)), step=float(d.get("step", 0.1)),
            desired_velocity=float(d.get("desired_velocity", 15.0)), wants_warning=bool(d.get("wants_warning", False)),
            warning_alpha=None if wa is None else float(wa), topology=str(d.get("topology", "custom")),
            variant=str(d.get("variant", "")), clear_distance=float(d.get("clear_distance", 40.0)))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc!r}") from exc


def dump_scenario(spec: ScenarioSpec) -> str:
    return yaml.safe_dump(scenario_to_dict(spec), sort_keys=False)


def load_scenario(path: str | Path) -> ScenarioSpec:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return scenario_from_dict(data)


def resolve_scenario(name_or_path: str, driver: str = "defensive") -> ScenarioSpec:
    """Built-in name or path to a scenario file; the driver overrides the file's."""
    if name_or_path in SCENARIO_NAMES:
        return make_scenario(name_or_path, driver)
    if Path(name_or_path).suffix in (".yaml", ".yml") or Path(name_or_path).exists():
        return load_scenario(name_or_path).with_driver(driver)
    raise KeyError(f"unknown scenario {name_or_path!r}; choose from {', '.join(SCENARIO_NAMES)} or a .yaml file")
