import json
import math

import pytest

from microquad import (
    GaitType,
    RobotConfig,
    TeleopSession,
    command_ingest,
    run_episode,
)
from microquad.actuator import speed_limit
from microquad.errors import SchemaError
from microquad.link import ChannelModel
from microquad.simulator import DT
from microquad.teleop import SessionMode


class TestCommandIngest:
    def test_minimal_valid(self):
        cmd = command_ingest('{"forward":0.5,"turn":0,"gait":"trot"}')
        assert cmd.forward == 0.5
        assert cmd.gait is GaitType.TROT
        assert cmd.mode is SessionMode.STAND

    def test_full_message(self):
        cmd = command_ingest({
            "v": 1, "forward": -0.25, "turn": 0.75, "gait": "bound",
            "mode": "walk", "params": {"frequency": 2.0, "duty": 0.6},
        })
        assert cmd.mode is SessionMode.WALK
        assert dict(cmd.overrides) == {"frequency": 2.0, "duty": 0.6}

    @pytest.mark.parametrize("payload,field", [
        ({"forward": 2.0}, "forward"),
        ({"turn": -1.5}, "turn"),
        ({"forward": "fast"}, "forward"),
        ({"gait": "gallop"}, "gait"),
        ({"mode": "fly"}, "mode"),
        ({"bogus": 1}, "bogus"),
        ({"v": 9}, "v"),
        ({"params": {"kp": 3}}, "params.kp"),
        ({"params": {"duty": "%"}}, "params.duty"),
        ({"params": 7}, "params"),
    ])
    def test_rejections_carry_field_path(self, payload, field):
        with pytest.raises(SchemaError) as excinfo:
            command_ingest(payload)
        assert excinfo.value.field == field

    def test_invalid_override_range(self):
        with pytest.raises(SchemaError):
            command_ingest({"params": {"duty": 1.5}})

    def test_invalid_json_text(self):
        with pytest.raises(SchemaError):
            command_ingest("{not json")

    def test_unknown_gait_lists_alternatives(self):
        with pytest.raises(SchemaError) as excinfo:
            command_ingest({"gait": "canter"})
        for name in ("walk", "trot", "bound", "pronk"):
            assert name in str(excinfo.value)


class TestSession:
    def test_idle_session_stands_and_publishes(self, cfg):
        sess = TeleopSession(cfg)
        updates = [u for u in (sess.tick() for _ in range(200)) if u]
        assert 29 <= len(updates) <= 31
        last = updates[-1]
        # standing drifts by at most one encoder quantum as the quantized
        # stream settles, then holds
        assert abs(last.pose[0]) < 2e-4 and abs(last.pose[1]) < 2e-4
        assert last.mode == "stand"
        payload = json.loads(last.to_json())
        assert payload["v"] == 1
        assert len(payload["joints"]) == 8

    def test_forward_walk_matches_headless_episode(self, cfg, trot):
        sess = TeleopSession(cfg, trot)
        sess.submit_command(command_ingest(
            {"forward": 1.0, "gait": "trot", "mode": "walk"}))
        mark = None
        for k in range(200 * 12):
            sess.tick()
            if k == 200 * 6 - 1:
                mark = (sess.world.x, sess.world.y, sess.world.t)
        v_live = math.hypot(sess.world.x - mark[0], sess.world.y - mark[1]) \
            / (sess.world.t - mark[2])
        headless = run_episode(cfg, trot, duration=12.0,
                               channel=ChannelModel())
        assert v_live == pytest.approx(headless.v_ss, rel=0.01)

    def test_scripted_replay_deterministic(self, cfg, trot):
        timeline = {
            0: '{"forward":1,"gait":"trot","mode":"walk"}',
            700: '{"forward":0.6,"turn":-0.4,"gait":"trot","mode":"walk"}',
            1500: '{"mode":"jump"}',
            1900: '{"mode":"stand"}',
        }
        model = ChannelModel(drop_prob=0.15, jitter_ticks=1, seed=21)
        a = TeleopSession(cfg, trot, model).run_scripted(timeline, 2500)
        b = TeleopSession(cfg, trot, model).run_scripted(timeline, 2500)
        assert a == b
        assert len(a) == 2500 * 30 // 200

    def test_phase_continuous_parameter_change(self, cfg, trot):
        sess = TeleopSession(cfg, trot)
        sess.submit_command(command_ingest(
            {"forward": 1.0, "gait": "trot", "mode": "walk"}))
        bound = speed_limit(cfg.act) * DT + 1e-9
        prev = None
        for k in range(2400):
            if k == 1200:
                sess.submit_command(command_ingest({
                    "forward": 0.5, "turn": 0.5, "gait": "trot", "mode": "walk",
                    "params": {"frequency": 2.0, "lift_amp": 0.02},
                }))
            sess.tick()
            joints = tuple(j.position for j in sess.world.joints)
            if prev is not None:
                step = max(abs(a - b) for a, b in zip(joints, prev))
                assert step <= bound
            prev = joints

    def test_torque_off_freezes(self, cfg, trot):
        sess = TeleopSession(cfg, trot)
        sess.submit_command(command_ingest(
            {"forward": 1.0, "gait": "trot", "mode": "walk"}))
        for _ in range(400):
            sess.tick()
        x_before = sess.world.x
        sess.submit_command(command_ingest({"mode": "torque_off"}))
        for _ in range(400):
            sess.tick()
        assert sess.world.x == pytest.approx(x_before, abs=1e-6)
        assert all(j.current == 0.0 for j in sess.world.joints)

    def test_jump_mode_returns_to_stand(self, cfg, trot):
        sess = TeleopSession(cfg, trot)
        sess.submit_command(command_ingest({"mode": "jump"}))
        heights = []
        for _ in range(300):
            sess.tick()
            heights.append(sess.world.body_height)
        assert sess.command.mode is SessionMode.STAND
        assert min(heights) < 0.06  # crouched
        assert max(heights) > 0.085  # extended

    def test_lossy_link_stats_accumulate(self, cfg, trot):
        sess = TeleopSession(cfg, trot, ChannelModel(drop_prob=0.3, seed=9))
        update = None
        for _ in range(600):
            update = sess.tick() or update
        stats = update.link
        assert stats.sent == 600
        assert stats.dropped > 100
        assert stats.applied == stats.sent - stats.dropped
        assert stats.rejected_stale == 0  # in-order channel, no stale frames

    def test_battery_estimate_declines(self, cfg, trot):
        from dataclasses import replace

        small = replace(cfg, battery_capacity_ah=0.001)
        sess = TeleopSession(small, trot)
        sess.submit_command(command_ingest(
            {"forward": 1.0, "gait": "trot", "mode": "walk"}))
        first = last = None
        for _ in range(200 * 10):
            u = sess.tick()
            if u:
                first = first or u
                last = u
        assert last.battery_pct < first.battery_pct

    def test_rolling_cot_appears_when_moving(self, cfg, trot):
        sess = TeleopSession(cfg, trot)
        sess.submit_command(command_ingest(
            {"forward": 1.0, "gait": "trot", "mode": "walk"}))
        last = None
        for _ in range(200 * 5):
            last = sess.tick() or last
        assert last.cot is not None and last.cot > 0
