"""Acceptance checks shared by the test-suite and ``reproduce``.

Each check returns ``(passed, detail)`` and :func:`run_all` wraps them in
:class:`CriterionResult`; nothing here raises on a failed band, so callers
can report every criterion in one pass.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .campaign import CampaignReport, run_campaign
from .config import EngineConfig
from .estimator import interpolate_linear, interpolate_sigmoid
from .planner import plan
from .risk import ALPHA_NORM, GaussianFootprint, instantaneous_risk
from .scenarios import DRIVER_TYPES, builtin_scenarios, make_scenario
from .simulator import SimulationTrace, run, scene_at

BANDS = {"defensive": (0.85, 1.0), "normal": (0.38, 0.62), "confident": (0.04, 0.25)}
MAX_TYPE_STD = 0.15
WARNING_WINDOW = (2.0, 4.0)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name} ({self.detail})"


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, str]]) -> CriterionResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CriterionResult(number, name, bool(ok), detail, time.perf_counter() - t0)


# -- 1: closed-form overlap against Monte-Carlo ------------------------------

def random_spd(rng: np.random.Generator, lo: float = 0.3, hi: float = 3.0) -> np.ndarray:
    theta = rng.uniform(0, np.pi)
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    return rot @ np.diag(rng.uniform(lo, hi, 2)) @ rot.T


def monte_carlo_overlap(mu1, cov1, mu2, cov2, n: int, rng: np.random.Generator) -> float:
    """E_{x ~ N(mu1, cov1)}[N(x; mu2, cov2)], the overlap integral."""
    x = rng.multivariate_normal(mu1, cov1, size=n)
    d = x - mu2
    inv = np.linalg.inv(cov2)
    q = np.einsum("ni,ij,nj->n", d, inv, d)
    return float(np.mean(np.exp(-0.5 * q)) / (2 * np.pi * np.sqrt(np.linalg.det(cov2))))


def check_overlap_oracle(n_pairs: int = 20, n_samples: int = 1_000_000, seed: int = 7) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        c1, c2 = random_spd(rng), random_spd(rng)
        mu1 = rng.uniform(-5, 5, 2)
        # offsets up to ~1.5 combined standard deviations keep the estimator well conditioned
        offset = np.linalg.cholesky(c1 + c2) @ rng.uniform(-1.0, 1.0, 2)
        mu2 = mu1 + offset
        exact = instantaneous_risk(GaussianFootprint(mu1, c1), GaussianFootprint(mu2, c2))
        mc = monte_carlo_overlap(mu1, c1, mu2, c2, n_samples, rng)
        worst = max(worst, abs(mc - exact) / exact)
    return worst < 0.02, f"worst relative error {worst:.4f} over {n_pairs} pairs, {n_samples} samples each"


# -- 2: interpolation arithmetic ----------------------------------------------

def check_interpolation() -> tuple[bool, str]:
    cases = [
        (interpolate_linear(1.0, -2.0, 1.0), 0.04),
        (interpolate_linear(-2.0, -2.0, 1.0), 1.0),
        (interpolate_linear(-0.5, -2.0, 1.0), 0.52),
        (interpolate_linear(2.0, -2.0, 1.0), 0.04),
        (interpolate_linear(-3.0, -2.0, 1.0), 1.0),
    ]
    for u in (0.0, 0.5, 1.0):
        a = 1.0 + u * (-2.0 - 1.0)
        cases.append((interpolate_sigmoid(a, -2.0, 1.0), interpolate_linear(a, -2.0, 1.0)))
    err = max(abs(got - want) for got, want in cases)
    return err <= 1e-12, f"max abs error {err:.1e} over {len(cases)} cases"


# -- campaign-based criteria --------------------------------------------------

@dataclass
class CampaignContext:
    config: EngineConfig
    report: CampaignReport
    traces: dict  # (scenario name, driver type) -> SimulationTrace
    seconds: float = 0.0

    @classmethod
    def build(cls, config: EngineConfig | None = None, out_dir=None) -> "CampaignContext":
        config = config or EngineConfig()
        t0 = time.perf_counter()
        report, traces = run_campaign(builtin_scenarios(), config, out_dir)
        return cls(config, report, {(t.spec.name, t.spec.driver_type): t for t in traces},
                   time.perf_counter() - t0)

    def trace(self, scenario: str, driver: str) -> SimulationTrace:
        return self.traces[(scenario, driver)]


def check_estimation(ctx: CampaignContext) -> tuple[bool, str]:
    rows = {r.driver_type: r for r in ctx.report.table()}
    ok = True
    parts = []
    for d in DRIVER_TYPES:
        lo, hi = BANDS[d]
        r = rows[d]
        good = lo <= r.average <= hi and r.std <= MAX_TYPE_STD
        ok &= good
        parts.append(f"{d} {r.average:.3f}+-{r.std:.3f}")
    ordered = rows["defensive"].average > rows["normal"].average > rows["confident"].average
    return ok and ordered, ", ".join(parts) + ("" if ordered else ", ordering violated")


def _first(trace: SimulationTrace, attr: str):
    return next((r.timestamp for r in trace.records if getattr(r, attr)), None)


def check_warning_errors(ctx: CampaignContext) -> tuple[bool, str]:
    problems = []
    t = ctx.trace("following-high", "defensive")
    first = _first(t, "personalized_warn")
    if _first(t, "baseline_warn") is not None:
        problems.append("following-high baseline warned")
    if first is None or not WARNING_WINDOW[0] <= first <= WARNING_WINDOW[1]:
        problems.append(f"following-high first personalized warning at {first}")
    t = ctx.trace("intersection-high", "defensive")
    if _first(t, "baseline_warn") is not None or _first(t, "personalized_warn") is None:
        problems.append("intersection-high FN pattern missing")
    for name in ("following-medium", "intersection-medium"):
        t = ctx.trace(name, "confident")
        if _first(t, "baseline_warn") is None or _first(t, "personalized_warn") is not None:
            problems.append(f"{name} FP pattern missing")
    detail = "; ".join(problems) or f"defensive first warning at t={first:.1f} s, FN and FP removed"
    return not problems, detail


def check_normal_parity(ctx: CampaignContext) -> tuple[bool, str]:
    problems = []
    for name in ("following-medium", "intersection-medium"):
        t = ctx.trace(name, "normal")
        if t.warning_alpha != ALPHA_NORM:
            t = run(replace(t.spec, warning_alpha=ALPHA_NORM), ctx.config)
        diff = max(abs(r.personalized_signal - r.baseline_signal) for r in t.records)
        warned = any(r.personalized_warn or r.baseline_warn for r in t.records)
        if diff != 0.0 or warned:
            problems.append(f"{name}: max diff {diff:.1e}, warned={warned}")
    return not problems, "; ".join(problems) or "signals identical, no warnings"


def planner_split(config: EngineConfig) -> list[float]:
    spec = make_scenario("following-high", "defensive")
    scene = scene_at(spec.initial_states(), spec)
    return [plan(scene, a, config.planner).first_step_acceleration for a in (0.04, 0.5, 1.0)]


def check_planner_split(ctx: CampaignContext) -> tuple[bool, str]:
    a_conf, a_norm, a_def = planner_split(ctx.config)
    ok = a_def < 0 < a_conf and a_conf >= a_norm >= a_def
    return ok, f"first-step accelerations 0.04:{a_conf:+.1f} 0.5:{a_norm:+.1f} 1.0:{a_def:+.1f}"


def check_undetermined_fallback(ctx: CampaignContext) -> tuple[bool, str]:
    problems = []
    n_post = 0
    for (name, d), t in sorted(ctx.traces.items()):
        if not name.startswith("intersection"):
            continue
        end = t.interaction_end()
        if end is None:
            problems.append(f"{name}/{d}: no post-interaction interval")
            continue
        post = [s for s in t.samples if s.timestamp >= end - 1e-9]
        n_post += len(post)
        bad = [s for s in post if s.interacting or s.alpha_hat != ALPHA_NORM]
        if not post or bad:
            problems.append(f"{name}/{d}: {len(bad)} of {len(post)} post-interaction samples determined")
    return not problems, "; ".join(problems) or f"{n_post} post-interaction samples all at 0.5"


CAMPAIGN_CRITERIA = (
    (3, "estimation bands", check_estimation),
    (4, "warning error reduction", check_warning_errors),
    (5, "normal-driver parity", check_normal_parity),
    (6, "planner split", check_planner_split),
    (7, "undetermined fallback", check_undetermined_fallback),
)


def run_all(config: EngineConfig | None = None, out_dir=None) -> tuple[list[CriterionResult], CampaignContext]:
    """Criteria 1-7. Criterion 8 is the property test-suite itself."""
    results = [
        _timed(1, "overlap oracle", check_overlap_oracle),
        _timed(2, "interpolation exactness", check_interpolation),
    ]
    ctx = CampaignContext.build(config, out_dir)
    for number, name, fn in CAMPAIGN_CRITERIA:
        r = _timed(number, name, lambda fn=fn: fn(ctx))
        results.append(replace(r, seconds=r.seconds + (ctx.seconds if number == 3 else 0.0)))
    return results, ctx
