"""Sampling-based behavior planner over acceleration profiles.

Candidates are single acceleration phases followed by constant velocity.
Each candidate is scored with ``risk - utility + comfort`` and the cheapest
one wins. The same machinery renders the velocity-time risk grid.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .risk import RiskConfig, integrated_risks, other_predictions, overlap_density, _rotated_cov
from .scene import AccelerationProfile, Scene, kinematics

DEFAULT_ACCELERATIONS = (-8.0, -6.0, -4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0)
DEFAULT_DURATIONS = (1.0, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class PlannerConfig:
    accelerations: tuple[float, ...] = DEFAULT_ACCELERATIONS
    durations: tuple[float, ...] = DEFAULT_DURATIONS
    utility_gain: float = 0.002
    comfort_gain: float = 5e-4
    switch_penalty: float = 0.0
    risk: RiskConfig = field(default_factory=RiskConfig)

    def __post_init__(self):
        if not self.accelerations or not self.durations:
            raise ValueError("candidate grids must be non-empty")
        object.__setattr__(self, "accelerations", tuple(float(a) for a in self.accelerations))
        object.__setattr__(self, "durations", tuple(float(d) for d in self.durations))

    @property
    def horizon(self) -> float:
        return self.risk.horizon


@dataclass(frozen=True)
class CostBreakdown:
    risk: float
    utility: float
    comfort: float
    # predicted mean footprints touch another vehicle within the horizon
    collision: bool = False

    @property
    def total(self) -> float:
        return self.risk - self.utility + self.comfort


@dataclass(frozen=True)
class PlanResult:
    best_profile: AccelerationProfile
    best_cost: CostBreakdown
    all_candidates: tuple[tuple[AccelerationProfile, CostBreakdown], ...]

    @property
    def first_step_acceleration(self) -> float:
        return self.best_profile.first_acceleration


def generate_profiles(velocity: float, config: PlannerConfig) -> list[AccelerationProfile]:
    """Candidate grid for an ego currently at ``velocity``.

    Profiles that would reverse are cut at standstill; duplicates (for
    instance every zero-acceleration duration) are removed, keeping the
    first occurrence in grid order.
    """
    seen = {}
    for a in config.accelerations:
        for d in config.durations:
            d = min(d, config.horizon)
            raw = AccelerationProfile(((a, d),) if a != 0 else (), config.horizon)
            prof = raw.truncated_for(velocity)
            seen.setdefault(prof.phases, prof)
    return list(seen.values())


def collisions(scene: Scene, profiles: Sequence[AccelerationProfile], times: np.ndarray) -> np.ndarray:
    """Whether each ego profile brings the mean positions within touching
    distance (sum of half-lengths) of any other vehicle."""
    hit = np.zeros(len(profiles), dtype=bool)
    if not scene.others:
        return hit
    ego = scene.ego
    disp = np.array([kinematics(ego.velocity, p, times)[0] for p in profiles])
    ego_xy = ego.path.positions(ego.path_position + disp)
    for other, prof in scene.other_pairs():
        prof = prof or AccelerationProfile.constant_velocity(float(times[-1]))
        o_xy = other.path.positions(other.path_position + kinematics(other.velocity, prof, times)[0])
        dist = np.linalg.norm(ego_xy - o_xy, axis=-1)
        hit |= np.any(dist <= 0.5 * (ego.length + other.length), axis=-1)
    return hit


def _switches(profile: AccelerationProfile) -> int:
    accs = [a for a, _ in profile.phases] + [0.0]
    return sum(1 for prev, cur in zip(accs[:-1], accs[1:]) if prev != cur)


def evaluate_costs(profiles: Sequence[AccelerationProfile], scene: Scene, alpha: float,
                   config: PlannerConfig) -> list[CostBreakdown]:
    times = config.risk.times
    risks = integrated_risks(scene.ego, profiles, scene.other_pairs(), alpha, config.risk)
    hits = collisions(scene, profiles, times)
    out = []
    for prof, r, hit in zip(profiles, risks, hits):
        _, vel, acc = kinematics(scene.ego.velocity, prof, times)
        utility = config.utility_gain * min(float(np.mean(vel)) / scene.desired_velocity, 1.0)
        comfort = config.comfort_gain * float(np.mean(acc**2)) + config.switch_penalty * _switches(prof)
        out.append(CostBreakdown(float(r), utility, comfort, bool(hit)))
    return out


def evaluate_cost(profile: AccelerationProfile, scene: Scene, alpha: float, config: PlannerConfig) -> CostBreakdown:
    return evaluate_costs([profile], scene, alpha, config)[0]


def _rank_key(item):
    prof, cost = item
    return (cost.total, abs(prof.first_acceleration), -prof.first_duration, prof.first_acceleration)


def admissible(pairs):
    """Collision-free candidates, or all of them when none is."""
    free = [p for p in pairs if not p[1].collision]
    return free or list(pairs)


def plan(scene: Scene, alpha: float, config: PlannerConfig,
         candidates: Sequence[AccelerationProfile] | None = None) -> PlanResult:
    """Exhaustive argmin over the candidate grid.

    Candidates whose mean prediction collides with another vehicle are only
    considered when every candidate collides. Ties on total cost go to the
    smaller first-phase |acceleration|, then to the longer first phase, so
    the result never depends on candidate order.
    """
    if candidates is None:
        candidates = generate_profiles(scene.ego.velocity, config)
    if not candidates:
        raise ValueError("no candidate profiles")
    costs = evaluate_costs(candidates, scene, alpha, config)
    pairs = tuple(zip(candidates, costs))
    best = min(admissible(pairs), key=_rank_key)
    return PlanResult(best[0], best[1], pairs)


@dataclass
class RiskMapGrid:
    time_axis: np.ndarray
    velocity_axis: np.ndarray
    risk_values: np.ndarray  # (n_velocity, n_time)
    overlay_trajectories: list[tuple[str, np.ndarray]] = field(default_factory=list)
    alpha: float | None = None

    def spot_area(self, threshold: float = 1e-4) -> int:
        return int(np.count_nonzero(self.risk_values > threshold))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "velocity", "risk"])
        for i, v in enumerate(self.velocity_axis):
            for j, t in enumerate(self.time_axis):
                w.writerow([repr(float(t)), repr(float(v)), repr(float(self.risk_values[i, j]))])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "alpha": self.alpha,
            "time_axis": self.time_axis.tolist(),
            "velocity_axis": self.velocity_axis.tolist(),
            "risk_values": self.risk_values.tolist(),
            "overlays": [{"label": lbl, "velocity": curve.tolist()} for lbl, curve in self.overlay_trajectories],
        })

    @classmethod
    def from_json(cls, text: str) -> "RiskMapGrid":
        d = json.loads(text)
        return cls(np.asarray(d["time_axis"], float), np.asarray(d["velocity_axis"], float),
                   np.asarray(d["risk_values"], float),
                   [(o["label"], np.asarray(o["velocity"], float)) for o in d["overlays"]], d["alpha"])


def render_risk_map(scene: Scene, alpha: float, config: PlannerConfig, v_max: float = 30.0,
                    dv: float = 0.5, overlays: Sequence[tuple[str, AccelerationProfile]] = ()) -> RiskMapGrid:
    """Risk density over the (velocity, time) plane.

    Cell ``(v, s)`` holds the risk of an ego that accelerates uniformly from
    its current velocity to ``v`` at time ``s``, against every other vehicle.
    """
    times = config.risk.times
    vels = np.arange(0.0, v_max + 0.5 * dv, dv)
    grid = np.zeros((len(vels), len(times)))
    params = config.risk.uncertainty
    ego = scene.ego
    disp = 0.5 * (ego.velocity + vels[:, None]) * times[None, :]
    arc = ego.path_position + disp
    means = ego.path.positions(arc)
    sigma = np.minimum(params.sigma_min + params.growth_rate * disp,
                       alpha * params.ego_scale * params.sigma_max_scale)
    covs = _rotated_cov(sigma, params.lateral_sigma, ego.path.headings(arc))
    for other in other_predictions(scene.other_pairs(), times, alpha, params):
        grid += overlap_density(means, covs, other.means, other.covs)
    curves = [("constant velocity", np.full(len(times), ego.velocity))]
    for label, prof in overlays:
        curves.append((label, kinematics(ego.velocity, prof, times)[1]))
    return RiskMapGrid(times, vels, grid, curves, alpha)
