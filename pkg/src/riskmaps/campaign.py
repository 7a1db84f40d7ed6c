"""Scenario x driver-type campaigns and their estimation and warning tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import EngineConfig
from .estimator import EstimationSummary
from .simulator import ScenarioSpec, SimulationTrace, run, trace_manifest, write_trace

TABLE_COLUMNS = ("driver_type", "ground_truth", "average", "difference", "std", "n_runs", "n_samples",
                 "pooled_std")


@dataclass(frozen=True)
class RunSummary:
    scenario: str
    driver_type: str
    ground_truth: float
    warning_alpha: float
    estimation: EstimationSummary
    errors: dict


@dataclass(frozen=True)
class TableRow:
    """One driver type. ``std`` is the spread of per-run means; the pooled
    per-sample spread is kept as a diagnostic."""

    driver_type: str
    ground_truth: float
    average: float
    difference: float
    std: float
    n_runs: int
    n_samples: int
    pooled_std: float


@dataclass
class CampaignReport:
    runs: dict = field(default_factory=dict)  # (scenario, driver_type) -> RunSummary
    artifacts: list = field(default_factory=list)
    _values: dict = field(default_factory=dict, repr=False)

    def add(self, trace: SimulationTrace) -> RunSummary:
        spec = trace.spec
        key = (spec.name, spec.driver_type)
        if key in self.runs:
            raise ValueError(f"duplicate campaign cell {key}")
        summary = RunSummary(spec.name, spec.driver_type, spec.driver_alpha, trace.warning_alpha,
                             trace.estimation_summary(), trace.error_report().as_dict())
        self.runs[key] = summary
        self._values[key] = np.array([s.alpha_hat for s in trace.samples])
        return summary

    def driver_types(self) -> list[str]:
        return sorted({d for _, d in self.runs}, key=lambda d: -self._truth(d))

    def _truth(self, driver_type: str) -> float:
        return next(r.ground_truth for (_, d), r in self.runs.items() if d == driver_type)

    def table(self) -> list[TableRow]:
        rows = []
        for d in self.driver_types():
            keys = sorted(k for k in self.runs if k[1] == d)
            means = np.array([self.runs[k].estimation.mean for k in keys])
            pooled = np.concatenate([self._values[k] for k in keys]) if self._values else means
            truth = self._truth(d)
            avg = float(np.mean(means))
            rows.append(TableRow(d, truth, avg, abs(avg - truth), float(np.std(means)), len(keys),
                                 int(sum(self.runs[k].estimation.n_samples for k in keys)), float(np.std(pooled))))
        return rows

    def warning_table(self) -> list[dict]:
        out = []
        for (scenario, d), r in sorted(self.runs.items()):
            e = r.errors
            out.append({
                "scenario": scenario, "driver_type": d, "warning_alpha": r.warning_alpha,
                "wants_warning": e["driver_wants_warning"],
                "personalized": e["personalized"]["run_class"], "baseline": e["baseline"]["run_class"],
                "personalized_first_warning": e["personalized"]["first_warning"],
                "baseline_first_warning": e["baseline"]["first_warning"],
            })
        return out

    def table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for row in self.table():
            w.writerow([row.driver_type] + [f"{getattr(row, c):.6g}" for c in TABLE_COLUMNS[1:]])
        return buf.getvalue()

    def format_table(self) -> str:
        lines = [f"{'driver type':<14}{'ground truth':>13}{'average':>10}{'difference':>12}{'std':>8}{'runs':>6}"]
        for r in self.table():
            lines.append(f"{r.driver_type:<14}{r.ground_truth:>13.2f}{r.average:>10.2f}{r.difference:>12.2f}"
                         f"{r.std:>8.2f}{r.n_runs:>6d}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "table": [row.__dict__ for row in self.table()],
            "runs": [
                {"scenario": s, "driver_type": d, "ground_truth": r.ground_truth, "warning_alpha": r.warning_alpha,
                 "estimation": r.estimation.__dict__, "errors": r.errors}
                for (s, d), r in sorted(self.runs.items())
            ],
            "warnings": self.warning_table(),
            "artifacts": [str(p) for p in self.artifacts],
        }

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        table, report = out / "table.csv", out / "report.json"
        table.write_text(self.table_csv())
        self.artifacts.extend([table, report])
        report.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))
        return [table, report]


def run_campaign(specs: Iterable[ScenarioSpec], config: EngineConfig | None = None,
                 out_dir=None) -> tuple[CampaignReport, list[SimulationTrace]]:
    """Run every spec; with ``out_dir`` each trace lands in its own folder.

    The report only depends on the set of runs, not their order.
    """
    report = CampaignReport()
    traces = []
    for spec in specs:
        trace = run(spec, config)
        report.add(trace)
        traces.append(trace)
        if out_dir is not None:
            run_dir = Path(out_dir) / "runs" / spec.name / spec.driver_type
            write_trace(trace, run_dir)
            report.artifacts.append(run_dir)
    return report, traces


def per_type_means(report: CampaignReport) -> dict[str, float]:
    return {row.driver_type: row.average for row in report.table()}


def manifests(traces: Sequence[SimulationTrace]) -> list[dict]:
    return [trace_manifest(t) for t in traces]
