from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskmaps.config import ConfigError, EngineConfig
from riskmaps.scenarios import (
    DRIVER_TYPES,
    SCENARIO_NAMES,
    WANTS_WARNING,
    builtin_scenarios,
    dump_scenario,
    following,
    load_scenario,
    make_scenario,
    resolve_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from riskmaps.scene import PathGeometry, ValidationError, crossing_point
from riskmaps.simulator import ScenarioSpec, VehicleSpec, run, step, write_trace

LANE = PathGeometry(((-100.0, 0.0), (2000.0, 0.0)), name="lane")


def lone_lead(script):
    ego = VehicleSpec("ego", "lane", 0.0, 0.0)
    lead = VehicleSpec("lead", "lane", 500.0, 10.0, script=script)
    return ScenarioSpec("lone", {"lane": LANE}, (ego, lead), "normal", 0.5, duration=1.0)


class TestStep:
    def test_scripted_braking(self):
        spec = lone_lead(((0.0, 5.0, -3.0),))
        states, _ = step(spec.initial_states(), spec, EngineConfig())
        assert states[1].velocity == pytest.approx(10.0 - 3.0 * spec.step)

    def test_zero_duration_script(self):
        with pytest.raises(ValidationError):
            VehicleSpec("x", "lane", 0.0, 1.0, script=((1.0, 1.0, -2.0),))

    def test_unscripted_world_only_advances(self):
        spec = lone_lead(())
        trace = run(spec)
        assert [s[1].velocity for s in trace.states] == [10.0] * len(trace.states)
        assert [s[1].timestamp for s in trace.states] == pytest.approx(list(trace.times))


class TestRun:
    def test_trace_length(self, campaign):
        trace = campaign.trace("following-high", "defensive")
        spec = trace.spec
        assert len(trace.states) == len(trace.samples) == len(trace.records) == spec.n_steps + 1
        np.testing.assert_allclose(np.diff(trace.times), spec.step)

    def test_hundred_and_one_snapshots(self):
        spec = replace(make_scenario("following-medium", "normal"), duration=10.0)
        assert len(run(spec).states) == 101

    def test_deterministic(self):
        spec = replace(make_scenario("intersection-high", "confident"), duration=1.5)
        a, b = run(spec), run(spec)
        assert a.samples == b.samples and a.records == b.records
        assert a.states == b.states

    def test_braking_lead_and_defensive_ego(self, campaign):
        trace = campaign.trace("following-high", "defensive")
        lead_v = np.array([s[1].velocity for s in trace.states])
        k0, k1 = int(round(2.0 / 0.1)), int(round(3.0 / 0.1))
        assert lead_v[k1] == pytest.approx(lead_v[k0] - 2.0, abs=1e-9)
        assert min(trace.ego_accelerations[k0:k1]) < 0

    def test_no_teleport_and_no_reverse(self, campaign):
        for trace in campaign.traces.values():
            pos = np.array([[v.path_position for v in snap] for snap in trace.states])
            vel = np.array([[v.velocity for v in snap] for snap in trace.states])
            assert np.all(vel >= 0)
            assert np.all(np.diff(pos, axis=0) >= -1e-12)
            vmax = vel.max() + 8.0 * trace.spec.step
            assert np.all(np.diff(pos, axis=0) <= vmax * trace.spec.step + 1e-9)

    def test_defensive_following_estimate(self, campaign):
        assert campaign.trace("following-high", "defensive").estimation_summary().mean >= 0.8

    def test_interaction_end_only_for_crossings(self, campaign):
        assert campaign.trace("following-high", "normal").interaction_end() is None
        for d in DRIVER_TYPES:
            end = campaign.trace("intersection-high", d).interaction_end()
            assert end is not None and end < campaign.trace("intersection-high", d).spec.duration

    def test_write_trace(self, tmp_path):
        trace = run(replace(make_scenario("following-high", "normal"), duration=0.3))
        manifest = write_trace(trace, tmp_path)
        assert manifest["n_snapshots"] == 4
        header = (tmp_path / "states.csv").read_text().splitlines()[0]
        assert header == "t,vehicle,x,y,path_position,velocity,acceleration"
        assert len((tmp_path / "estimation.csv").read_text().splitlines()) == 5


class TestCatalog:
    def test_cells(self):
        specs = builtin_scenarios()
        assert len(specs) == len(SCENARIO_NAMES) * len(DRIVER_TYPES) == 12
        assert len({s.key for s in specs}) == 12
        for s in specs:
            assert s.wants_warning == WANTS_WARNING[(s.variant, s.driver_type)]

    def test_topologies(self):
        f = make_scenario("following-high")
        assert len(f.paths) == 1 and len(f.vehicles) == 2
        i = make_scenario("intersection-medium")
        ego_path = i.paths[i.ego.path]
        for v in i.vehicles[1:]:
            assert len(crossing_point(ego_path, i.paths[v.path])) == 1

    def test_unknown(self):
        with pytest.raises(KeyError, match="following-high"):
            make_scenario("roundabout")

    def test_custom_alpha(self):
        spec = make_scenario("following-high", 0.3)
        assert spec.driver_alpha == 0.3 and spec.driver_type == "alpha=0.3"

    def test_yaml_round_trip(self, tmp_path):
        for spec in (make_scenario("following-high", "confident"), make_scenario("intersection-medium")):
            path = tmp_path / f"{spec.name}.yaml"
            path.write_text(dump_scenario(spec))
            assert load_scenario(path) == spec
            assert resolve_scenario(str(path), "normal") == spec.with_driver("normal")

    def test_bad_files(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_scenario(tmp_path / "nope.yaml")
        bad = tmp_path / "bad.yaml"
        bad.write_text("- just\n- a list\n")
        with pytest.raises(ConfigError):
            load_scenario(bad)
        d = scenario_to_dict(following())
        d["vehicles"][0]["path"] = "missing"
        with pytest.raises((ConfigError, ValidationError)):
            scenario_from_dict(d)


@settings(max_examples=10, deadline=None)
@given(gap=st.floats(30, 80), ego_v=st.floats(8, 20), brake=st.floats(-3, -0.5))
def test_following_runs_are_physical(gap, ego_v, brake):
    spec = following("high", "normal", gap=gap, ego_v=ego_v, brake=brake, duration=1.0)
    trace = run(spec)
    assert len(trace.states) == 11
    assert all(0.04 <= s.alpha_hat <= 1.0 for s in trace.samples)
    assert all(s.interacting or s.alpha_hat == 0.5 for s in trace.samples)
    assert np.all(trace.ego_velocity() >= 0)
