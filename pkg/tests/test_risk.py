import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskmaps.acceptance import monte_carlo_overlap, random_spd
from riskmaps.risk import (
    ALPHA_CONF,
    ALPHA_DEF,
    DegenerateCovarianceError,
    GaussianFootprint,
    RiskConfig,
    SurvivalParams,
    UncertaintyParams,
    instantaneous_risk,
    integrated_risk,
    uncertainty_at,
)
from riskmaps.scenarios import make_scenario
from riskmaps.scene import AccelerationProfile, RangeError, VehicleState, straight_path
from riskmaps.simulator import scene_at

LANE = straight_path((0, 0), (1000, 0))
I2 = np.eye(2)


def fp(mean, cov):
    return GaussianFootprint(np.asarray(mean, float), np.asarray(cov, float))


class TestUncertainty:
    params = UncertaintyParams(sigma_min=0.5, growth_rate=0.05, sigma_max_scale=10.0, lateral_sigma=0.5)

    def test_cap(self):
        cov = uncertainty_at(1.0, 10.0, 1000.0, self.params)
        assert math.sqrt(cov[0, 0]) == pytest.approx(10.0)
        assert math.sqrt(cov[1, 1]) == pytest.approx(0.5)

    def test_start(self):
        for alpha, v in ((1.0, 10.0), (0.5, 0.0), (0.9, 30.0)):
            assert math.sqrt(uncertainty_at(alpha, v, 0.0, self.params)[0, 0]) == pytest.approx(0.5)

    def test_confident_cap_binds(self):
        assert math.sqrt(uncertainty_at(0.04, 10.0, 5.0, self.params)[0, 0]) == pytest.approx(0.4)

    def test_rotation(self):
        cov = uncertainty_at(1.0, 10.0, 1000.0, self.params, heading=math.pi / 2)
        np.testing.assert_allclose(cov, np.diag([0.25, 100.0]), atol=1e-12)

    def test_negative_time(self):
        with pytest.raises(RangeError):
            uncertainty_at(1.0, 10.0, -1.0, self.params)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            UncertaintyParams(growth_rate=0.0)


class TestInstantaneous:
    def test_zero_distance(self):
        assert instantaneous_risk(fp((0, 0), I2), fp((0, 0), I2)) == pytest.approx(1 / (4 * math.pi))

    def test_elongated_offset(self):
        cov = np.diag([4.0, 1.0])
        exact = math.exp(-0.25) / (8 * math.pi)
        got = instantaneous_risk(fp((0, 0), cov), fp((2, 0), cov))
        assert got == pytest.approx(exact, rel=1e-12)
        mc = monte_carlo_overlap(np.zeros(2), cov, np.array([2.0, 0.0]), cov, 1_000_000, np.random.default_rng(3))
        assert mc == pytest.approx(got, rel=0.02)

    def test_far_apart(self):
        vals = [instantaneous_risk(fp((0, 0), I2), fp((d, 0), I2)) for d in (0, 2, 5, 10, 40)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-100

    def test_degenerate(self):
        flat = np.diag([1.0, 0.0])
        with pytest.raises(ValueError):
            fp((0, 0), flat)
        with pytest.raises(ValueError):
            fp((0, 0), [[1.0, 2.0], [0.0, 1.0]])

    def test_singular_sum(self):
        a = fp((0, 0), I2)
        object.__setattr__(a, "covariance", np.diag([1.0, 0.0]))
        b = fp((0, 0), I2)
        object.__setattr__(b, "covariance", np.diag([1.0, 0.0]))
        with pytest.raises(DegenerateCovarianceError):
            instantaneous_risk(a, b)

    def test_scaling_regimes(self):
        a, b = fp((0, 0), I2), fp((0, 0), I2)
        scaled = fp((0, 0), 1.2 * I2)
        assert instantaneous_risk(scaled, scaled) < instantaneous_risk(a, b)
        # beyond the crossover a slightly wider spread reaches further
        far = np.array([3.0, 0.0])
        assert instantaneous_risk(scaled, fp(far, 1.2 * I2)) > instantaneous_risk(a, fp(far, I2))


spd = st.builds(lambda seed: random_spd(np.random.default_rng(seed)), st.integers(0, 2**32 - 1))
vec = st.tuples(st.floats(-10, 10), st.floats(-10, 10)).map(np.array)


@settings(max_examples=80, deadline=None)
@given(c1=spd, c2=spd, m1=vec, m2=vec)
def test_symmetry(c1, c2, m1, m2):
    assert instantaneous_risk(fp(m1, c1), fp(m2, c2)) == pytest.approx(instantaneous_risk(fp(m2, c2), fp(m1, c1)),
                                                                       rel=1e-12, abs=1e-300)


@settings(max_examples=80, deadline=None)
@given(c1=spd, c2=spd, angle=st.floats(0, 2 * math.pi), d=st.floats(0, 6), step=st.floats(0.05, 2))
def test_decreasing_along_ray(c1, c2, angle, d, step):
    u = np.array([math.cos(angle), math.sin(angle)])
    near = instantaneous_risk(fp((0, 0), c1), fp(d * u, c2))
    far = instantaneous_risk(fp((0, 0), c1), fp((d + step) * u, c2))
    assert far < near or near == 0.0


@settings(max_examples=60, deadline=None)
@given(c1=spd, c2=spd, c=st.floats(1.01, 4))
def test_scaling_shrinks_peak(c1, c2, c):
    assert instantaneous_risk(fp((0, 0), c * c1), fp((0, 0), c * c2)) < instantaneous_risk(fp((0, 0), c1),
                                                                                           fp((0, 0), c2))


@settings(max_examples=60, deadline=None)
@given(c1=spd, c2=spd, direction=st.floats(0, 2 * math.pi), extra=st.floats(0.2, 3))
def test_scaling_beyond_crossover(c1, c2, direction, extra):
    cov = c1 + c2
    # place the offset at Mahalanobis distance sqrt(2) + extra
    u = np.array([math.cos(direction), math.sin(direction)])
    m = u / math.sqrt(u @ np.linalg.solve(cov, u)) * (math.sqrt(2) + extra)
    c = 1.01
    assert instantaneous_risk(fp((0, 0), c * c1), fp(m, c * c2)) > instantaneous_risk(fp((0, 0), c1), fp(m, c2))


class TestIntegrated:
    def test_empty(self):
        assert integrated_risk(VehicleState(LANE, 0.0, 10.0), None, [], 1.0) == 0.0

    def test_constant_pair_closed_form(self):
        # sigma_min above the cap: spread is constant from s = 0
        params = UncertaintyParams(sigma_min=5.0, growth_rate=0.05, sigma_max_scale=2.0, lateral_sigma=0.5)
        tau, horizon, d = 2.0, 10.0, 3.0
        cfg = RiskConfig(params, SurvivalParams(tau), horizon=horizon, dt=0.01)
        ego = VehicleState(LANE, 0.0, 0.0)
        other = VehicleState(LANE, d, 0.0)
        cov = np.diag([4.0, 0.25])
        r_const = instantaneous_risk(fp((0, 0), cov), fp((d, 0), cov))
        expected = r_const * tau * (1 - math.exp(-horizon / tau))
        assert integrated_risk(ego, None, [(other, None)], 1.0, cfg) == pytest.approx(expected, rel=1e-3)

    def test_longer_survival_never_lowers(self):
        ego = VehicleState(LANE, 0.0, 15.0)
        lead = VehicleState(LANE, 30.0, 10.0)
        lo = integrated_risk(ego, None, [(lead, None)], 1.0, RiskConfig(survival=SurvivalParams(2.0)))
        hi = integrated_risk(ego, None, [(lead, None)], 1.0, RiskConfig(survival=SurvivalParams(4.0)))
        assert hi >= lo > 0

    def test_overrides(self):
        ego = VehicleState(LANE, 0.0, 15.0)
        lead = VehicleState(LANE, 30.0, 10.0)
        cfg = RiskConfig(horizon=6.0, dt=0.05)
        assert integrated_risk(ego, None, [(lead, None)], 1.0, horizon=6.0, dt=0.05) == pytest.approx(
            integrated_risk(ego, None, [(lead, None)], 1.0, cfg), rel=1e-12)

    def test_quadrature_refinement(self):
        ego = VehicleState(LANE, 0.0, 15.0)
        lead = VehicleState(LANE, 25.0, 12.0)
        prof = AccelerationProfile(((-1.0, 2.0),))
        r = {dt: integrated_risk(ego, prof, [(lead, None)], 1.0, RiskConfig(dt=dt)) for dt in (0.4, 0.2, 0.1)}
        assert abs(r[0.2] - r[0.1]) <= abs(r[0.4] - r[0.2])

    def test_defensive_at_least_confident_on_following(self):
        spec = make_scenario("following-high", "defensive")
        scene = scene_at(spec.initial_states(), spec)
        r_def = integrated_risk(scene.ego, None, scene.other_pairs(), ALPHA_DEF)
        r_conf = integrated_risk(scene.ego, None, scene.other_pairs(), ALPHA_CONF)
        assert r_def >= r_conf


@settings(max_examples=40, deadline=None)
@given(gap=st.floats(5, 80), v_ego=st.floats(0, 25), v_lead=st.floats(0, 25), h1=st.floats(1, 9), dh=st.floats(0, 5))
def test_monotone_in_horizon(gap, v_ego, v_lead, h1, dh):
    ego = VehicleState(LANE, 0.0, v_ego)
    lead = VehicleState(LANE, gap, v_lead)
    short = integrated_risk(ego, None, [(lead, None)], 1.0, horizon=round(h1, 1))
    long = integrated_risk(ego, None, [(lead, None)], 1.0, horizon=round(h1 + dh, 1))
    assert long >= short * (1 - 1e-12)


@settings(max_examples=40, deadline=None)
@given(gap=st.floats(20, 80), v_ego=st.floats(5, 25), v_lead=st.floats(0, 20), extra=st.floats(0.5, 20))
def test_risk_falls_with_distance(gap, v_ego, v_lead, extra):
    ego = VehicleState(LANE, 0.0, v_ego)
    near = integrated_risk(ego, None, [(VehicleState(LANE, gap, v_lead), None)], 1.0)
    far = integrated_risk(ego, None, [(VehicleState(LANE, gap + extra, v_lead), None)], 1.0)
    assert far <= near
