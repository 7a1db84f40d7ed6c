"""Kinematic world model: polyline paths, vehicle states and profile prediction.

Vehicles move along fixed 1-D paths embedded in the plane. Longitudinal motion
follows piecewise-constant acceleration profiles; a vehicle that reaches rest
stays at rest (no reversing).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence

import numpy as np

_EPS = 1e-9


class ValidationError(ValueError):
    """Raised for malformed paths, states or profiles."""


class RangeError(ValueError):
    """Raised when a query lies outside the admissible domain."""


@dataclass(frozen=True, eq=False)
class PathGeometry:
    """Polyline path parametrized by arc length."""

    waypoints: tuple[tuple[float, float], ...]
    name: str = ""

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.waypoints)
        if len(pts) < 2:
            raise ValidationError("a path needs at least two waypoints")
        object.__setattr__(self, "waypoints", pts)
        if np.any(np.diff(self.arc_lengths) <= 0):
            raise ValidationError("consecutive waypoints must be distinct")

    def __eq__(self, other):
        return isinstance(other, PathGeometry) and self.waypoints == other.waypoints

    def __hash__(self):
        return hash(self.waypoints)

    @cached_property
    def points(self) -> np.ndarray:
        return np.asarray(self.waypoints, dtype=float)

    @cached_property
    def arc_lengths(self) -> np.ndarray:
        seg = np.hypot(*np.diff(self.points, axis=0).T)
        return np.concatenate([[0.0], np.cumsum(seg)])

    @cached_property
    def _segment_headings(self) -> np.ndarray:
        d = np.diff(self.points, axis=0)
        return np.arctan2(d[:, 1], d[:, 0])

    @property
    def length(self) -> float:
        return float(self.arc_lengths[-1])

    def _segment_index(self, s: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.arc_lengths, s, side="right") - 1
        return np.clip(idx, 0, len(self.waypoints) - 2)

    def positions(self, s) -> np.ndarray:
        """World positions for arc lengths ``s`` (shape ``s.shape + (2,)``).

        Queries beyond either end are extrapolated along the end segments,
        which lets predictions run past the drawn extent of a path.
        """
        s = np.asarray(s, dtype=float)
        idx = self._segment_index(s)
        start = self.points[idx]
        heading = self._segment_headings[idx]
        offset = s - self.arc_lengths[idx]
        return start + offset[..., None] * np.stack([np.cos(heading), np.sin(heading)], axis=-1)

    def headings(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self._segment_headings[self._segment_index(s)]


@dataclass(frozen=True)
class VehicleState:
    """State of one agent on its path at one instant."""

    path: PathGeometry
    path_position: float
    velocity: float
    acceleration: float = 0.0
    timestamp: float = 0.0
    length: float = 4.5
    width: float = 1.8
    name: str = ""

    def __post_init__(self):
        if self.velocity < 0:
            raise ValidationError(f"velocity must be non-negative, got {self.velocity}")
        if self.length <= 0 or self.width <= 0:
            raise ValidationError("footprint dimensions must be positive")

    @property
    def position(self) -> np.ndarray:
        return self.path.positions(self.path_position)

    @property
    def heading(self) -> float:
        return float(self.path.headings(self.path_position))


@dataclass(frozen=True)
class AccelerationProfile:
    """Phases of constant acceleration, then constant velocity to ``horizon``.

    Args:
        phases: ``(acceleration [m/s^2], duration [s])`` pairs in order.
        horizon: planning horizon in seconds.
    """

    phases: tuple[tuple[float, float], ...] = ()
    horizon: float = 10.0

    def __post_init__(self):
        phases = tuple((float(a), float(d)) for a, d in self.phases)
        object.__setattr__(self, "phases", phases)
        if self.horizon <= 0:
            raise ValidationError("horizon must be positive")
        if any(d <= 0 for _, d in phases):
            raise ValidationError("phase durations must be positive")
        if sum(d for _, d in phases) > self.horizon + _EPS:
            raise ValidationError("phases exceed the planning horizon")

    @classmethod
    def constant_velocity(cls, horizon: float = 10.0) -> "AccelerationProfile":
        return cls((), horizon)

    @property
    def first_acceleration(self) -> float:
        return self.phases[0][0] if self.phases else 0.0

    @property
    def first_duration(self) -> float:
        return self.phases[0][1] if self.phases else 0.0

    def truncated_for(self, velocity: float) -> "AccelerationProfile":
        """Profile with phases cut where ``velocity`` would reach zero.

        Phases after the stop point carry no motion and are dropped, so
        profiles that differ only after a standstill compare equal.
        """
        out = []
        v = velocity
        for a, d in self.phases:
            if a < 0 and v + a * d <= _EPS:
                t_stop = v / -a
                if t_stop > _EPS:
                    out.append((a, t_stop))
                break
            out.append((a, d))
            v += a * d
        return AccelerationProfile(tuple(out), self.horizon)

    def shifted(self, s: float) -> "AccelerationProfile":
        """Remainder of the profile as seen from ``s`` seconds in."""
        out = []
        t0 = 0.0
        for a, d in self.phases:
            end = t0 + d
            if end > s + _EPS:
                out.append((a, end - max(t0, s)))
            t0 = end
        return AccelerationProfile(tuple(out), max(self.horizon - s, _EPS))


def kinematics(velocity: float, profile: AccelerationProfile, s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form displacement, velocity and acceleration after time ``s``.

    ``s`` may be an array; no range checks are made here.
    """
    s = np.asarray(s, dtype=float)
    disp = np.zeros_like(s)
    vel = np.full_like(s, float(velocity))
    acc = np.zeros_like(s)
    t0 = 0.0
    v0 = float(velocity)
    x0 = 0.0
    for a, d in profile.phases:
        if a < 0 and v0 > 0:
            d_eff = min(d, v0 / -a)
        elif a < 0:
            d_eff = 0.0
        else:
            d_eff = d
        # elapsed time inside this phase (moving part)
        tau = np.clip(s - t0, 0.0, d_eff)
        in_phase = (s >= t0) & (s < t0 + d_eff)
        disp = np.where(s >= t0, x0 + v0 * tau + 0.5 * a * tau**2, disp)
        vel = np.where(s >= t0, v0 + a * tau, vel)
        acc = np.where(in_phase, a, np.where(s >= t0, 0.0, acc))
        x0 += v0 * d_eff + 0.5 * a * d_eff**2
        v0 = max(v0 + a * d_eff, 0.0)
        t0 += d
    # constant-velocity tail after the last phase
    tail = s >= t0
    disp = np.where(tail, x0 + v0 * (s - t0), disp)
    vel = np.where(tail, v0, vel)
    acc = np.where(tail, 0.0, acc)
    return disp, np.maximum(vel, 0.0), acc


def predict_state(state: VehicleState, profile: AccelerationProfile, s: float) -> VehicleState:
    """Advance ``state`` by ``s`` seconds under ``profile``."""
    if not isinstance(profile, AccelerationProfile):
        raise ValidationError("profile must be an AccelerationProfile")
    if s < 0 or s > profile.horizon + _EPS:
        raise RangeError(f"s={s} outside [0, {profile.horizon}]")
    disp, vel, acc = kinematics(state.velocity, profile, s)
    return replace(
        state,
        path_position=state.path_position + float(disp),
        velocity=float(vel),
        acceleration=float(acc),
        timestamp=state.timestamp + s,
    )


def world_position(path: PathGeometry, path_position: float) -> np.ndarray:
    """Point on ``path`` at arc length ``path_position``."""
    if path_position < -_EPS or path_position > path.length + _EPS:
        raise RangeError(f"arc length {path_position} outside [0, {path.length}]")
    return path.positions(float(np.clip(path_position, 0.0, path.length)))


def gap_between(ego: VehicleState, other: VehicleState) -> float:
    """Center distance minus both half-lengths, floored at zero."""
    d = float(np.linalg.norm(ego.position - other.position))
    return max(d - 0.5 * ego.length - 0.5 * other.length, 0.0)


def straight_path(start: Sequence[float], end: Sequence[float], name: str = "") -> PathGeometry:
    return PathGeometry((tuple(start), tuple(end)), name=name)


def crossing_point(a: PathGeometry, b: PathGeometry) -> list[np.ndarray]:
    """All intersection points between the segments of two polylines."""
    hits = []
    for p0, p1 in zip(a.points[:-1], a.points[1:]):
        for q0, q1 in zip(b.points[:-1], b.points[1:]):
            r, q = p1 - p0, q1 - q0
            den = r[0] * q[1] - r[1] * q[0]
            if abs(den) < _EPS:
                continue
            w = q0 - p0
            t = (w[0] * q[1] - w[1] * q[0]) / den
            u = (w[0] * r[1] - w[1] * r[0]) / den
            if -_EPS <= t <= 1 + _EPS and -_EPS <= u <= 1 + _EPS:
                hits.append(p0 + t * r)
    return hits


@dataclass(frozen=True)
class Scene:
    """Snapshot handed to planner, estimator and warning.

    ``other_profiles`` are the predicted behaviors of the other vehicles;
    ``None`` (globally or per vehicle) means constant velocity.
    """

    ego: VehicleState
    others: tuple[VehicleState, ...] = ()
    other_profiles: tuple[AccelerationProfile | None, ...] | None = None
    desired_velocity: float = 15.0

    def __post_init__(self):
        object.__setattr__(self, "others", tuple(self.others))
        if self.other_profiles is not None and len(self.other_profiles) != len(self.others):
            raise ValidationError("one predicted profile per other vehicle")
        if self.desired_velocity <= 0:
            raise ValidationError("desired velocity must be positive")

    def other_pairs(self) -> list[tuple[VehicleState, AccelerationProfile | None]]:
        profiles = self.other_profiles or (None,) * len(self.others)
        return list(zip(self.others, profiles))

    def without_others(self) -> "Scene":
        return replace(self, others=(), other_profiles=None)
