"""Closed-loop scenario engine.

The ego driver is itself a Risk Maps planner with a fixed ground-truth
alpha, re-planning every step and applying the first acceleration of its
best plan. Estimation and warning run alongside on the pre-step snapshot.
Other vehicles follow scripted acceleration schedules.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .config import EngineConfig
from .estimator import EstimationSample, estimate_step, summarize
from .planner import plan
from .risk import ALPHA_CONF, ALPHA_DEF, clamp_alpha
from .scene import AccelerationProfile, PathGeometry, Scene, ValidationError, VehicleState, crossing_point, predict_state
from .warning import ErrorReport, WarningRecord, compare_runs, warning_step

DRIVER_ALPHAS = {"defensive": 1.0, "normal": 0.5, "confident": 0.04}


@dataclass(frozen=True)
class VehicleSpec:
    name: str
    path: str
    position: float
    velocity: float
    length: float = 4.5
    width: float = 1.8
    script: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "script", tuple(tuple(float(x) for x in seg) for seg in self.script))
        for t0, t1, _ in self.script:
            if t1 <= t0:
                raise ValidationError(f"{self.name}: script segment ends before it starts")

    def scripted_acceleration(self, t: float) -> float:
        for t0, t1, a in self.script:
            if t0 - 1e-9 <= t < t1 - 1e-9:
                return a
        return 0.0


@dataclass(frozen=True)
class ScenarioSpec:
    """One runnable scenario: geometry, vehicles and the simulated driver.

    ``vehicles[0]`` is the ego. ``warning_alpha`` is the personalized alpha
    the warning system uses; ``None`` means "look it up from the engine
    config for this driver type".
    """

    name: str
    paths: Mapping[str, PathGeometry]
    vehicles: tuple[VehicleSpec, ...]
    driver_type: str
    driver_alpha: float
    duration: float = 10.0
    step: float = 0.1
    desired_velocity: float = 15.0
    wants_warning: bool = False
    warning_alpha: float | None = None
    topology: str = "following"
    variant: str = ""
    clear_distance: float = 40.0

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        object.__setattr__(self, "paths", dict(self.paths))
        if self.duration <= 0 or self.step <= 0:
            raise ValidationError("duration and step must be positive")
        if not self.vehicles:
            raise ValidationError("scenario needs an ego vehicle")
        for v in self.vehicles:
            if v.path not in self.paths:
                raise ValidationError(f"vehicle {v.name} references unknown path {v.path!r}")
        if len({v.name for v in self.vehicles}) != len(self.vehicles):
            raise ValidationError("vehicle names must be unique")

    @property
    def ego(self) -> VehicleSpec:
        return self.vehicles[0]

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step))

    @property
    def key(self) -> str:
        return f"{self.name}/{self.driver_type}"

    def initial_states(self) -> tuple[VehicleState, ...]:
        return tuple(VehicleState(self.paths[v.path], v.position, v.velocity, 0.0, 0.0, v.length, v.width, v.name)
                     for v in self.vehicles)

    def with_driver(self, driver: str | float) -> "ScenarioSpec":
        if isinstance(driver, str) and driver in DRIVER_ALPHAS:
            return replace(self, driver_type=driver, driver_alpha=DRIVER_ALPHAS[driver])
        alpha = clamp_alpha(float(driver))
        return replace(self, driver_type=f"alpha={alpha:g}", driver_alpha=alpha)


@dataclass
class SimulationTrace:
    spec: ScenarioSpec
    times: np.ndarray
    states: list[tuple[VehicleState, ...]]
    ego_accelerations: list[float] = field(default_factory=list)
    samples: list[EstimationSample] = field(default_factory=list)
    records: list[WarningRecord] = field(default_factory=list)
    warning_alpha: float = 0.5

    def ego_velocity(self) -> np.ndarray:
        return np.array([s[0].velocity for s in self.states])

    def estimation_summary(self):
        return summarize(self.samples, self.spec.driver_alpha)

    def error_report(self) -> ErrorReport:
        return compare_runs(self.records, self.records)

    def interaction_end(self) -> float | None:
        """First time after which ego and every other vehicle have cleared
        their crossing point and stay at least ``clear_distance`` apart.

        Returns ``None`` for topologies without crossing points or when the
        run ends before clearance.
        """
        spec = self.spec
        ego_path = spec.paths[spec.ego.path]
        crossings = []
        for j, v in enumerate(spec.vehicles[1:], start=1):
            hits = crossing_point(ego_path, spec.paths[v.path])
            if len(hits) != 1:
                return None
            crossings.append((j, hits[0]))
        if not crossings:
            return None
        ok = []
        for snap in self.states:
            ego = snap[0]
            fine = True
            for j, point in crossings:
                other = snap[j]
                past_ego = np.dot(ego.position - point, [np.cos(ego.heading), np.sin(ego.heading)]) > 0
                past_other = np.dot(other.position - point, [np.cos(other.heading), np.sin(other.heading)]) > 0
                far = np.linalg.norm(ego.position - other.position) >= spec.clear_distance
                fine &= bool(past_ego and past_other and far)
            ok.append(fine)
        for i in range(len(ok)):
            if all(ok[i:]):
                return float(self.times[i])
        return None

    def states_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "vehicle", "x", "y", "path_position", "velocity", "acceleration"])
        for t, snap in zip(self.times, self.states):
            for s in snap:
                x, y = s.position
                w.writerow([f"{t:.6g}", s.name, repr(float(x)), repr(float(y)), repr(s.path_position),
                            repr(s.velocity), repr(s.acceleration)])
        return buf.getvalue()


def scene_at(states: Sequence[VehicleState], spec: ScenarioSpec) -> Scene:
    return Scene(states[0], tuple(states[1:]), None, spec.desired_velocity)


def step(states: tuple[VehicleState, ...], spec: ScenarioSpec, config: EngineConfig,
         plans: dict | None = None) -> tuple[tuple[VehicleState, ...], float]:
    """Advance the world by one simulation step.

    Returns the next states and the acceleration the ego applied.
    """
    scene = scene_at(states, spec)
    plans = plans if plans is not None else {}
    alpha = spec.driver_alpha
    if alpha not in plans:
        plans[alpha] = plan(scene, alpha, config.planner)
    a_ego = plans[alpha].first_step_acceleration
    dt = spec.step
    nxt = []
    for i, (state, vspec) in enumerate(zip(states, spec.vehicles)):
        a = a_ego if i == 0 else vspec.scripted_acceleration(state.timestamp)
        prof = AccelerationProfile(((a, dt),) if a != 0 else (), dt)
        new = predict_state(state, prof, dt)
        # timestamps on an exact grid, and record the applied acceleration
        k = int(round(state.timestamp / dt)) + 1
        nxt.append(replace(new, timestamp=k * dt, acceleration=a if state.velocity > 0 or a > 0 else 0.0))
    return tuple(nxt), a_ego


def run(spec: ScenarioSpec, config: EngineConfig | None = None) -> SimulationTrace:
    """Simulate ``spec``; deterministic in ``(spec, config)``."""
    config = config or EngineConfig()
    warn_alpha = spec.warning_alpha
    if warn_alpha is None:
        warn_alpha = config.personalized_alpha.get(spec.driver_type, spec.driver_alpha)
    states = spec.initial_states()
    n = spec.n_steps
    trace = SimulationTrace(spec, np.arange(n + 1) * spec.step, [states], warning_alpha=warn_alpha)
    for k in range(n + 1):
        scene = scene_at(states, spec)
        plans = {a: plan(scene, a, config.planner) for a in {ALPHA_DEF, ALPHA_CONF, spec.driver_alpha}}
        a_driver = plans[spec.driver_alpha].first_step_acceleration
        trace.samples.append(estimate_step(scene, a_driver, config.planner, config.estimator, plans))
        trace.records.append(warning_step(scene, warn_alpha, spec.wants_warning, config.warning, config.planner))
        trace.ego_accelerations.append(a_driver)
        if k == n:
            break
        states, _ = step(states, spec, config, plans)
        trace.states.append(states)
    return trace


def trace_manifest(trace: SimulationTrace) -> dict:
    spec = trace.spec
    summary = trace.estimation_summary()
    return {
        "scenario": spec.name,
        "driver_type": spec.driver_type,
        "driver_alpha": spec.driver_alpha,
        "warning_alpha": trace.warning_alpha,
        "n_snapshots": len(trace.states),
        "step": spec.step,
        "estimation": summary.__dict__,
        "errors": trace.error_report().as_dict(),
        "files": {"states": "states.csv", "estimation": "estimation.csv", "warnings": "warnings.csv"},
    }


def write_trace(trace: SimulationTrace, out_dir) -> dict:
    from pathlib import Path

    from .estimator import samples_to_csv
    from .warning import records_to_csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "states.csv").write_text(trace.states_csv())
    (out / "estimation.csv").write_text(samples_to_csv(trace.samples))
    (out / "warnings.csv").write_text(records_to_csv(trace.records))
    manifest = trace_manifest(trace)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest
