"""Engine configuration and its YAML representation."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .estimator import EstimatorConfig
from .planner import PlannerConfig
from .risk import RiskConfig, SurvivalParams, UncertaintyParams
from .warning import WarningConfig, WeightFunction


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    warning: WarningConfig = field(default_factory=WarningConfig)
    # averaged estimates per driver type, used as the warning's alpha
    personalized_alpha: dict = field(default_factory=lambda: {"defensive": 0.95, "normal": 0.5, "confident": 0.13})

    @property
    def risk(self) -> RiskConfig:
        return self.planner.risk

    def to_dict(self) -> dict:
        risk = self.planner.risk
        return {
            "risk": {
                "horizon": risk.horizon,
                "dt": risk.dt,
                "survival_tau": risk.survival.tau,
                "uncertainty": asdict(risk.uncertainty),
            },
            "planner": {
                "accelerations": list(self.planner.accelerations),
                "durations": list(self.planner.durations),
                "utility_gain": self.planner.utility_gain,
                "comfort_gain": self.planner.comfort_gain,
                "switch_penalty": self.planner.switch_penalty,
            },
            "estimator": asdict(self.estimator),
            "warning": {
                "threshold": self.warning.threshold,
                "weight_anchors": [list(a) for a in self.warning.weight_function.anchors],
                "personalized_alpha": dict(self.personalized_alpha),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        d = d or {}
        unknown = set(d) - {"risk", "planner", "estimator", "warning"}
        if unknown:
            raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")
        for key, section in d.items():
            if not isinstance(section, dict):
                raise ConfigError(f"config section {key!r} must be a mapping")
        try:
            r = d.get("risk", {})
            risk = RiskConfig(
                uncertainty=UncertaintyParams(**r.get("uncertainty", {})),
                survival=SurvivalParams(r.get("survival_tau", SurvivalParams.tau)),
                horizon=float(r.get("horizon", RiskConfig.horizon)),
                dt=float(r.get("dt", RiskConfig.dt)),
            )
            planner = PlannerConfig(risk=risk, **d.get("planner", {}))
            estimator = EstimatorConfig(**d.get("estimator", {}))
            w = dict(d.get("warning", {}))
            personalized = w.pop("personalized_alpha", None)
            anchors = w.pop("weight_anchors", None)
            wf = WeightFunction(tuple(tuple(float(x) for x in a) for a in anchors)) if anchors else WeightFunction()
            warning = WarningConfig(weight_function=wf, **w)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid engine config: {exc}") from exc
        kwargs = {"personalized_alpha": dict(personalized)} if personalized else {}
        return cls(planner, estimator, warning, **kwargs)


def load_engine_config(path: str | Path | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return EngineConfig.from_dict(data or {})


def dump_engine_config(config: EngineConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False)
