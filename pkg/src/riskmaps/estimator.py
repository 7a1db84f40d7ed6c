"""Risk-factor estimation by interpolating between two reference planners.

A defensive planner (alpha = 1.0) and a confident planner (alpha = 0.04)
propose first-step accelerations; the driver's observed acceleration is
placed between them to recover the driver's own alpha.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .planner import PlannerConfig, plan
from .risk import ALPHA_CONF, ALPHA_DEF, ALPHA_NORM, clamp_alpha, integrated_risk
from .scene import Scene

UNDETERMINED = None


@dataclass(frozen=True)
class EstimatorConfig:
    interpolation: str = "sigmoid"
    steepness: float = 6.0
    plan_tolerance: float = 0.05
    gate_threshold: float = 1e-6

    def __post_init__(self):
        if self.interpolation not in ("linear", "sigmoid"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")


@dataclass(frozen=True)
class EstimationSample:
    timestamp: float
    a_def: float
    a_conf: float
    a_driver: float
    alpha_hat: float
    interacting: bool


@dataclass(frozen=True)
class EstimationSummary:
    mean: float
    std: float
    diff_to_ground_truth: float
    n_samples: int


def _fraction(a, a_def, a_conf, eps):
    if abs(a_def - a_conf) <= eps:
        return UNDETERMINED
    return (a - a_conf) / (a_def - a_conf)


def interpolate_linear(a: float, a_def: float, a_conf: float, eps: float = 0.05) -> float | None:
    """Linear placement of ``a`` between the two plans; ``None`` if they agree."""
    u = _fraction(a, a_def, a_conf, eps)
    if u is UNDETERMINED:
        return UNDETERMINED
    return clamp_alpha(ALPHA_CONF + (ALPHA_DEF - ALPHA_CONF) * u)


def _logistic(x):
    return 1.0 / (1.0 + math.exp(-x))


def normalized_sigmoid(u: float, k: float) -> float:
    lo, hi = _logistic(-k / 2), _logistic(k / 2)
    return (_logistic(k * (u - 0.5)) - lo) / (hi - lo)


def interpolate_sigmoid(a: float, a_def: float, a_conf: float, k: float = 6.0, eps: float = 0.05) -> float | None:
    """Logistic placement, rescaled to hit both anchors exactly."""
    u = _fraction(a, a_def, a_conf, eps)
    if u is UNDETERMINED:
        return UNDETERMINED
    if u <= 0.0:
        return ALPHA_CONF
    if u >= 1.0:
        return ALPHA_DEF
    return clamp_alpha(ALPHA_CONF + (ALPHA_DEF - ALPHA_CONF) * normalized_sigmoid(u, k))


def interpolate(a, a_def, a_conf, config: EstimatorConfig):
    if config.interpolation == "linear":
        return interpolate_linear(a, a_def, a_conf, config.plan_tolerance)
    return interpolate_sigmoid(a, a_def, a_conf, config.steepness, config.plan_tolerance)


def is_interacting(scene: Scene, planner_config: PlannerConfig, threshold: float) -> bool:
    for pair in scene.other_pairs():
        if integrated_risk(scene.ego, None, [pair], ALPHA_DEF, planner_config.risk) > threshold:
            return True
    return False


def estimate_step(scene: Scene, a_driver: float, planner_config: PlannerConfig,
                  config: EstimatorConfig = EstimatorConfig(), plans: dict | None = None) -> EstimationSample:
    """One estimation sample for the current snapshot.

    ``plans`` may carry precomputed ``PlanResult`` objects keyed by alpha so
    a simulator that already planned at an anchor does not plan twice.
    """
    plans = plans or {}
    a_def = (plans.get(ALPHA_DEF) or plan(scene, ALPHA_DEF, planner_config)).first_step_acceleration
    a_conf = (plans.get(ALPHA_CONF) or plan(scene, ALPHA_CONF, planner_config)).first_step_acceleration
    interacting = is_interacting(scene, planner_config, config.gate_threshold)
    alpha = interpolate(a_driver, a_def, a_conf, config) if interacting else UNDETERMINED
    if alpha is UNDETERMINED:
        alpha = ALPHA_NORM
    return EstimationSample(scene.ego.timestamp, a_def, a_conf, a_driver, alpha, interacting)


def summarize(samples: Sequence[EstimationSample] | Sequence[float], ground_truth: float) -> EstimationSummary:
    """Mean, population std and absolute bias of alpha estimates."""
    if len(samples) == 0:
        raise ValueError("cannot summarize an empty sample list")
    values = np.array([getattr(s, "alpha_hat", s) for s in samples], dtype=float)
    mean = float(np.mean(values))
    return EstimationSummary(mean, float(np.std(values)), abs(mean - ground_truth), len(values))


def samples_to_csv(samples: Sequence[EstimationSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "a_def", "a_conf", "a_driver", "alpha_hat", "interacting"])
    for s in samples:
        w.writerow([f"{s.timestamp:.6g}", repr(s.a_def), repr(s.a_conf), repr(s.a_driver), repr(s.alpha_hat),
                    int(s.interacting)])
    return buf.getvalue()
