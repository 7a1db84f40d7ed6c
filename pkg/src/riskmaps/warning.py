"""Personalized risk warning and error classification against a baseline."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .planner import PlannerConfig
from .risk import ALPHA_NORM, RiskConfig, integrated_risk
from .scene import Scene

TP, TN, FN, FP = "TP", "TN", "FN", "FP"


@dataclass(frozen=True)
class WeightFunction:
    anchors: tuple[tuple[float, float], ...] = ((0.04, 0.01), (0.5, 1.0), (1.0, 4.0))

    def __post_init__(self):
        alphas = [a for a, _ in self.anchors]
        weights = [w for _, w in self.anchors]
        if np.any(np.diff(alphas) <= 0) or np.any(np.diff(weights) <= 0):
            raise ValueError("anchors must be strictly increasing in alpha and weight")


@dataclass(frozen=True)
class WarningConfig:
    threshold: float = 1e-3
    weight_function: WeightFunction = field(default_factory=WeightFunction)

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")


def weight_for(alpha: float, wf: WeightFunction = WeightFunction()) -> float:
    """Piecewise-linear weight through the anchors, clamped outside them."""
    alphas, weights = zip(*wf.anchors)
    return float(np.interp(alpha, alphas, weights))


def warning_signal(scene: Scene, alpha: float, config: WarningConfig, risk_config: RiskConfig,
                   weight: float | None = None) -> tuple[float, bool]:
    """``W = w(alpha) * R(alpha)`` for the constant-velocity ego behavior."""
    r = integrated_risk(scene.ego, None, scene.other_pairs(), alpha, risk_config)
    w = weight_for(alpha, config.weight_function) if weight is None else weight
    signal = w * r
    return signal, signal > config.threshold


def baseline_signal(scene: Scene, config: WarningConfig, risk_config: RiskConfig) -> tuple[float, bool]:
    return warning_signal(scene, ALPHA_NORM, config, risk_config, weight=1.0)


def classify(warn: bool, wants: bool) -> str:
    if wants:
        return TP if warn else FN
    return FP if warn else TN


@dataclass(frozen=True)
class WarningRecord:
    timestamp: float
    personalized_signal: float
    baseline_signal: float
    personalized_warn: bool
    baseline_warn: bool
    driver_wants_warning: bool

    @property
    def personalized_class(self) -> str:
        return classify(self.personalized_warn, self.driver_wants_warning)

    @property
    def baseline_class(self) -> str:
        return classify(self.baseline_warn, self.driver_wants_warning)


def warning_step(scene: Scene, alpha: float, wants: bool, config: WarningConfig,
                 planner_config: PlannerConfig) -> WarningRecord:
    w_p, warn_p = warning_signal(scene, alpha, config, planner_config.risk)
    w_b, warn_b = baseline_signal(scene, config, planner_config.risk)
    return WarningRecord(scene.ego.timestamp, w_p, w_b, warn_p, warn_b, wants)


@dataclass(frozen=True)
class SystemErrors:
    warned: bool
    run_class: str
    step_counts: dict
    first_warning: float | None


@dataclass(frozen=True)
class ErrorReport:
    personalized: SystemErrors
    baseline: SystemErrors
    driver_wants_warning: bool

    def as_dict(self) -> dict:
        return {
            "driver_wants_warning": self.driver_wants_warning,
            "personalized": self.personalized.__dict__,
            "baseline": self.baseline.__dict__,
        }


def _errors(times, warns, wants: bool) -> SystemErrors:
    counts = {c: 0 for c in (TP, TN, FN, FP)}
    for w in warns:
        counts[classify(w, wants)] += 1
    first = next((float(t) for t, w in zip(times, warns) if w), None)
    return SystemErrors(first is not None, classify(first is not None, wants), counts, first)


def compare_runs(personalized: Sequence[WarningRecord], baseline: Sequence[WarningRecord]) -> ErrorReport:
    """Run-level and per-step error counts for two aligned record streams.

    The personalized stream is read from ``personalized_warn`` and the
    baseline stream from ``baseline_warn``; passing the same list twice is
    the normal case.
    """
    if len(personalized) != len(baseline):
        raise ValueError("record streams have different lengths")
    for p, b in zip(personalized, baseline):
        if p.timestamp != b.timestamp or p.driver_wants_warning != b.driver_wants_warning:
            raise ValueError(f"record streams misaligned at t={p.timestamp}")
    wants = bool(personalized[0].driver_wants_warning) if personalized else False
    times = [r.timestamp for r in personalized]
    return ErrorReport(
        _errors(times, [r.personalized_warn for r in personalized], wants),
        _errors(times, [r.baseline_warn for r in baseline], wants),
        wants,
    )


def records_to_csv(records: Sequence[WarningRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "W_personalized", "R_baseline", "warn_personalized", "warn_baseline", "wants_warning"])
    for r in records:
        w.writerow([f"{r.timestamp:.6g}", repr(r.personalized_signal), repr(r.baseline_signal),
                    int(r.personalized_warn), int(r.baseline_warn), int(r.driver_wants_warning)])
    return buf.getvalue()
