"""Gaussian collision-risk model with personalized uncertainty growth.

Every vehicle is represented by a 2-D Gaussian around its predicted mean
position. The longitudinal spread grows with the distance the vehicle is
predicted to travel and saturates at a cap proportional to the risk factor
``alpha``; the lateral spread is fixed. Risk between two vehicles is the
overlap integral of their Gaussians, discounted over prediction time with an
exponential survival weight and integrated into one scalar.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .scene import AccelerationProfile, RangeError, VehicleState, kinematics

ALPHA_CONF = 0.04
ALPHA_NORM = 0.5
ALPHA_DEF = 1.0


class DegenerateCovarianceError(ArithmeticError):
    """The summed covariance of two footprints is not positive definite."""


def clamp_alpha(alpha: float) -> float:
    return float(min(max(alpha, ALPHA_CONF), ALPHA_DEF))


@dataclass(frozen=True)
class GaussianFootprint:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
            raise ValueError("covariance must be a symmetric 2x2 matrix")
        if np.any(np.linalg.eigvalsh(cov) <= 0):
            raise ValueError("covariance must be positive definite")
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "covariance", cov)


@dataclass(frozen=True)
class UncertaintyParams:
    """Longitudinal growth ``sigma_min + growth_rate * d`` capped at
    ``alpha * sigma_max_scale``, with ``d`` the distance travelled (``v * s``
    at constant speed). ``ego_scale`` and ``other_scale`` multiply the cap
    for the ego vehicle and for other traffic respectively."""

    sigma_min: float = 0.5
    growth_rate: float = 0.08
    sigma_max_scale: float = 8.0
    lateral_sigma: float = 0.5
    ego_scale: float = 1.0
    other_scale: float = 1.0

    def __post_init__(self):
        for name in ("sigma_min", "growth_rate", "sigma_max_scale", "lateral_sigma", "ego_scale", "other_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SurvivalParams:
    tau: float = 2.0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def weight(self, s):
        return np.exp(-np.asarray(s, dtype=float) / self.tau)


@dataclass(frozen=True)
class RiskConfig:
    uncertainty: UncertaintyParams = field(default_factory=UncertaintyParams)
    survival: SurvivalParams = field(default_factory=SurvivalParams)
    horizon: float = 10.0
    dt: float = 0.1

    def __post_init__(self):
        if self.horizon <= 0 or self.dt <= 0 or self.dt > self.horizon:
            raise ValueError("need 0 < dt <= horizon")

    @property
    def times(self) -> np.ndarray:
        return time_grid(self.horizon, self.dt)


def time_grid(horizon: float, dt: float) -> np.ndarray:
    n = int(round(horizon / dt))
    if abs(n * dt - horizon) < 1e-9 * max(1.0, horizon):
        return np.linspace(0.0, horizon, n + 1)
    grid = np.arange(0.0, horizon, dt)
    return np.append(grid, horizon)


def _rotated_cov(sigma_lon, sigma_lat, heading) -> np.ndarray:
    c, s = np.cos(heading), np.sin(heading)
    var_lon = np.asarray(sigma_lon, dtype=float) ** 2
    var_lat = np.broadcast_to(np.asarray(sigma_lat, dtype=float) ** 2, var_lon.shape)
    xx = c * c * var_lon + s * s * var_lat
    yy = s * s * var_lon + c * c * var_lat
    xy = c * s * (var_lon - var_lat)
    return np.stack([np.stack([xx, xy], -1), np.stack([xy, yy], -1)], -2)


def longitudinal_sigma(alpha, velocity, s, params: UncertaintyParams, scale: float = 1.0):
    grown = params.sigma_min + params.growth_rate * np.asarray(velocity) * np.asarray(s)
    return np.minimum(grown, alpha * scale * params.sigma_max_scale)


def uncertainty_at(alpha: float, velocity: float, s: float, params: UncertaintyParams,
                   heading: float = 0.0) -> np.ndarray:
    """Position covariance of a vehicle ``s`` seconds into the future.

    The longitudinal standard deviation grows linearly with ``velocity * s``
    from ``sigma_min`` and saturates at ``alpha * sigma_max_scale``. The
    result is expressed in world axes for a vehicle pointing at ``heading``.
    """
    if s < 0:
        raise RangeError(f"prediction time must be non-negative, got {s}")
    if velocity < 0:
        raise RangeError(f"velocity must be non-negative, got {velocity}")
    sigma = longitudinal_sigma(alpha, velocity, s, params)
    return _rotated_cov(sigma, params.lateral_sigma, heading)


def overlap_density(mu1, cov1, mu2, cov2) -> np.ndarray:
    """Vectorized Gaussian overlap; broadcasts over leading axes."""
    cov = np.asarray(cov1) + np.asarray(cov2)
    a, b, d = cov[..., 0, 0], cov[..., 0, 1], cov[..., 1, 1]
    det = a * d - b * b
    dx = np.asarray(mu2)[..., 0] - np.asarray(mu1)[..., 0]
    dy = np.asarray(mu2)[..., 1] - np.asarray(mu1)[..., 1]
    maha = (d * dx * dx - 2 * b * dx * dy + a * dy * dy) / det
    return np.exp(-0.5 * maha) / (2 * np.pi * np.sqrt(det))


def instantaneous_risk(ego: GaussianFootprint, other: GaussianFootprint) -> float:
    cov = ego.covariance + other.covariance
    det = np.linalg.det(cov)
    if not np.isfinite(det) or det <= 1e-300 * max(1.0, np.abs(cov).max() ** 2):
        raise DegenerateCovarianceError("summed covariance is singular")
    return float(overlap_density(ego.mean, ego.covariance, other.mean, other.covariance))


@dataclass(frozen=True)
class Prediction:
    """Means and covariances of one or more vehicles over a time grid.

    Arrays carry a leading candidate axis when several profiles are stacked.
    """

    means: np.ndarray
    covs: np.ndarray
    velocities: np.ndarray


def predict_footprints(state: VehicleState, profiles: Sequence[AccelerationProfile], times: np.ndarray,
                       alpha: float, params: UncertaintyParams, scale: float = 1.0) -> Prediction:
    disp = np.empty((len(profiles), len(times)))
    vel = np.empty_like(disp)
    for i, p in enumerate(profiles):
        disp[i], vel[i], _ = kinematics(state.velocity, p, times)
    arc = state.path_position + disp
    means = state.path.positions(arc)
    headings = state.path.headings(arc)
    # growth driven by travelled distance, i.e. mean velocity over [0, s]
    sigma = np.minimum(params.sigma_min + params.growth_rate * disp, alpha * scale * params.sigma_max_scale)
    covs = _rotated_cov(sigma, params.lateral_sigma, headings)
    return Prediction(means, covs, vel)


def _integrate(values: np.ndarray, times: np.ndarray, survival: SurvivalParams) -> np.ndarray:
    f = values * survival.weight(times)
    return np.sum(0.5 * (f[..., 1:] + f[..., :-1]) * np.diff(times), axis=-1)


def other_predictions(others: Iterable[tuple[VehicleState, AccelerationProfile | None]], times: np.ndarray,
                      alpha: float, params: UncertaintyParams) -> list[Prediction]:
    horizon = float(times[-1])
    out = []
    for state, profile in others:
        profile = profile or AccelerationProfile.constant_velocity(horizon)
        out.append(predict_footprints(state, [profile], times, alpha, params, params.other_scale))
    return out


def risk_series(ego_state: VehicleState, ego_profiles: Sequence[AccelerationProfile], others, alpha: float,
                config: RiskConfig) -> np.ndarray:
    """Instantaneous risk summed over others; shape ``(n_profiles, n_times)``."""
    times = config.times
    out = np.zeros((len(ego_profiles), len(times)))
    if not others:
        return out
    params = config.uncertainty
    ego = predict_footprints(ego_state, ego_profiles, times, alpha, params, params.ego_scale)
    for other in other_predictions(others, times, alpha, params):
        out += overlap_density(ego.means, ego.covs, other.means, other.covs)
    return out


def integrated_risks(ego_state: VehicleState, ego_profiles: Sequence[AccelerationProfile], others, alpha: float,
                     config: RiskConfig) -> np.ndarray:
    """Survival-discounted scalar risk for each candidate profile."""
    return _integrate(risk_series(ego_state, ego_profiles, others, alpha, config), config.times, config.survival)


def integrated_risk(ego_state: VehicleState, ego_profile: AccelerationProfile | None, others, alpha: float,
                    config: RiskConfig | None = None, *, horizon: float | None = None, dt: float | None = None,
                    survival: SurvivalParams | None = None) -> float:
    """Scalar risk ``R(alpha)`` for one ego behavior against all ``others``.

    ``others`` holds ``(state, profile)`` pairs; a ``None`` profile means
    constant velocity. Time integration uses the trapezoidal rule on a grid
    of step ``dt`` with weights ``exp(-s / tau)``.
    """
    config = config or RiskConfig()
    overrides = {k: v for k, v in (("horizon", horizon), ("dt", dt), ("survival", survival)) if v is not None}
    if overrides:
        config = replace(config, **overrides)
    if not others:
        return 0.0
    profile = ego_profile or AccelerationProfile.constant_velocity(config.horizon)
    if profile.horizon < config.horizon:
        profile = AccelerationProfile(profile.phases, config.horizon)
    return float(integrated_risks(ego_state, [profile], others, alpha, config)[0])
