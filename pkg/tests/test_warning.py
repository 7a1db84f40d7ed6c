import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskmaps.planner import PlannerConfig
from riskmaps.risk import integrated_risk
from riskmaps.scenarios import make_scenario
from riskmaps.scene import Scene, VehicleState, straight_path
from riskmaps.simulator import scene_at
from riskmaps.warning import (
    FN,
    FP,
    TN,
    TP,
    WarningConfig,
    WarningRecord,
    WeightFunction,
    baseline_signal,
    classify,
    compare_runs,
    records_to_csv,
    warning_signal,
    warning_step,
    weight_for,
)

LANE = straight_path((-100, 0), (2000, 0))
CFG = WarningConfig()
RISK = PlannerConfig().risk


def close_scene():
    return Scene(VehicleState(LANE, 0.0, 16.0), (VehicleState(LANE, 25.0, 10.0),), None, 20.0)


class TestWeight:
    @pytest.mark.parametrize("alpha, w", [(0.04, 0.01), (0.5, 1.0), (1.0, 4.0), (0.75, 2.5)])
    def test_anchors_and_midpoint(self, alpha, w):
        assert weight_for(alpha) == pytest.approx(w, abs=1e-12)

    def test_lower_segment(self):
        assert weight_for(0.27) == pytest.approx(0.01 + 0.99 * (0.27 - 0.04) / 0.46, abs=1e-12)

    def test_clamps(self):
        assert weight_for(0.0) == 0.01 and weight_for(1.5) == 4.0

    def test_invalid_anchors(self):
        with pytest.raises(ValueError):
            WeightFunction(((0.04, 0.01), (0.5, 1.0), (0.4, 4.0)))
        with pytest.raises(ValueError):
            WeightFunction(((0.04, 2.0), (0.5, 1.0), (1.0, 4.0)))
        with pytest.raises(ValueError):
            WarningConfig(threshold=0.0)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(0, 1.2), b=st.floats(0, 1.2))
def test_weight_monotone(a, b):
    lo, hi = sorted((a, b))
    assert weight_for(lo) <= weight_for(hi)


class TestSignal:
    def test_empty_road(self):
        w, warn = warning_signal(Scene(VehicleState(LANE, 0.0, 10.0)), 1.0, CFG, RISK)
        assert w == 0.0 and not warn

    def test_definition(self):
        scene = close_scene()
        r = integrated_risk(scene.ego, None, scene.other_pairs(), 0.75, RISK)
        w, warn = warning_signal(scene, 0.75, CFG, RISK)
        assert w == pytest.approx(2.5 * r, rel=1e-12)
        assert warn == (w > CFG.threshold)

    def test_baseline_is_normal_parametrization(self):
        scene = close_scene()
        assert baseline_signal(scene, CFG, RISK) == warning_signal(scene, 0.5, CFG, RISK)

    def test_parity_bitwise(self):
        spec = make_scenario("following-medium", "normal")
        rec = warning_step(scene_at(spec.initial_states(), spec), 0.5, False, CFG, PlannerConfig())
        assert rec.personalized_signal == rec.baseline_signal
        assert rec.personalized_warn == rec.baseline_warn

    def test_defensive_following_warns_near_three_seconds(self, campaign):
        trace = campaign.trace("following-high", "defensive")
        rec = trace.records[30]
        assert rec.timestamp == pytest.approx(3.0)
        assert rec.personalized_signal > 1e-3


@settings(max_examples=30, deadline=None)
@given(gap=st.floats(8, 60), v=st.floats(5, 25), alpha=st.floats(0.04, 1.0), c=st.floats(0.1, 10))
def test_threshold_scale_invariance(gap, v, alpha, c):
    scene = Scene(VehicleState(LANE, 0.0, v), (VehicleState(LANE, gap, 0.5 * v),), None, v)
    w, warn = warning_signal(scene, alpha, CFG, RISK)
    w2, warn2 = warning_signal(scene, alpha, WarningConfig(threshold=c * CFG.threshold), RISK)
    assert w2 == w
    assert warn2 == (w > c * CFG.threshold)


class TestClassify:
    def test_truth_table(self):
        table = {(True, True): TP, (False, True): FN, (True, False): FP, (False, False): TN}
        for warn, wants in itertools.product((True, False), repeat=2):
            assert classify(warn, wants) == table[(warn, wants)]

    def test_all_record_combinations(self):
        # 8 combinations of the two warn flags and the preference
        for p, b, wants in itertools.product((True, False), repeat=3):
            rec = WarningRecord(0.0, 0.0, 0.0, p, b, wants)
            assert rec.personalized_class == classify(p, wants)
            assert rec.baseline_class == classify(b, wants)
            assert rec.personalized_class in ((TP, FN) if wants else (FP, TN))

    def test_fn_removed(self):
        recs = [WarningRecord(0.1 * i, 0, 0, i >= 3, False, True) for i in range(6)]
        rep = compare_runs(recs, recs)
        assert rep.personalized.run_class == TP and rep.baseline.run_class == FN
        assert rep.personalized.first_warning == pytest.approx(0.3)
        assert rep.personalized.step_counts == {TP: 3, TN: 0, FN: 3, FP: 0}

    def test_fp_removed(self):
        recs = [WarningRecord(0.1 * i, 0, 0, False, i == 2, False) for i in range(4)]
        rep = compare_runs(recs, recs)
        assert rep.personalized.run_class == TN and rep.baseline.run_class == FP

    def test_misaligned(self):
        a = [WarningRecord(0.0, 0, 0, False, False, True)]
        with pytest.raises(ValueError):
            compare_runs(a, [WarningRecord(0.1, 0, 0, False, False, True)])
        with pytest.raises(ValueError):
            compare_runs(a, a * 2)

    def test_csv(self):
        text = records_to_csv([WarningRecord(0.5, 2e-3, 1e-4, True, False, True)])
        assert text.splitlines() == ["t,W_personalized,R_baseline,warn_personalized,warn_baseline,wants_warning",
                                     "0.5,0.002,0.0001,1,0,1"]


class TestCampaignFixtures:
    def test_defensive_following_fn_removed(self, campaign):
        rep = campaign.trace("following-high", "defensive").error_report()
        assert rep.baseline.run_class == FN and rep.personalized.run_class == TP

    def test_normal_driver_zero_difference(self, campaign):
        for name in ("following-medium", "intersection-medium"):
            t = campaign.trace(name, "normal")
            assert all(r.personalized_signal == r.baseline_signal for r in t.records)
            rep = t.error_report()
            assert rep.personalized.step_counts == rep.baseline.step_counts
