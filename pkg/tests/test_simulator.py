import math
from dataclasses import replace

import pytest

from microquad import (
    GaitParams,
    RobotConfig,
    jump_episode,
    run_episode,
    standing_state,
    step_world,
)
from microquad.errors import UnreachableTrajectory
from microquad.link import ChannelModel
from microquad.metrics import G
from microquad.simulator import DT, samples_for_frequency


class TestStepWorld:
    def test_standing_is_a_fixed_point(self, cfg, trot):
        w = standing_state(cfg, trot)
        targets = tuple(j.position for j in w.joints)
        w2 = step_world(w, cfg, targets)
        assert (w2.x, w2.y, w2.yaw) == (0.0, 0.0, 0.0)
        assert w2.body_height == pytest.approx(w.body_height, abs=1e-12)
        assert w2.t == pytest.approx(DT)

    def test_accumulators_monotone(self, cfg, trot):
        w = standing_state(cfg, trot)
        targets = tuple(j.position for j in w.joints)
        prev_energy, prev_charge = 0.0, 0.0
        for _ in range(50):
            w = step_world(w, cfg, targets)
            assert w.energy >= prev_energy
            assert w.charge >= prev_charge
            prev_energy, prev_charge = w.energy, w.charge

    def test_torque_off_freezes_world(self, cfg, trot):
        w = standing_state(cfg, trot)
        targets = tuple(j.position + 0.3 for j in w.joints)
        w2 = step_world(w, cfg, targets, torque_enabled=False)
        assert w2.joints[0].position == w.joints[0].position
        assert w2.charge == 0.0
        assert all(j.current == 0.0 for j in w2.joints)

    def test_input_validation(self, cfg, trot):
        w = standing_state(cfg, trot)
        with pytest.raises(ValueError):
            step_world(w, cfg, (0.0,) * 7)
        with pytest.raises(ValueError):
            step_world(w, cfg, (0.0,) * 8, dt=0.0)


class TestRunEpisode:
    def test_trot_speed_matches_no_slip_oracle(self, cfg):
        for s in (0.01, 0.03):
            for f in (0.5, 2.0):
                rep = run_episode(cfg, GaitParams(stride_len=s, frequency=f),
                                  duration=12.0 / f)
                assert rep.v_ss == pytest.approx(s * f, rel=0.02)

    def test_zero_stride_reports_no_cot(self, cfg):
        rep = run_episode(cfg, GaitParams(stride_len=0.0), duration=6.0)
        assert rep.v_ss == pytest.approx(0.0, abs=1e-9)
        assert rep.cot is None

    def test_turn_yaw_matches_differential_drive(self, cfg):
        for turn in (1.0, -1.0):
            gait = GaitParams(stride_len=0.02, frequency=1.0, turn=turn)
            rep = run_episode(cfg, gait, duration=12.0)
            expected = 2 * 0.02 * 1.0 * turn / cfg.track_width
            assert rep.yaw_rate == pytest.approx(expected, rel=0.05)
            assert abs(rep.v_ss) < 1e-3

    def test_yaw_rate_odd_in_turn(self, cfg):
        rates = {}
        for turn in (0.5, -0.5):
            gait = GaitParams(stride_len=0.02, frequency=1.0, turn=turn)
            rates[turn] = run_episode(cfg, gait, duration=12.0).yaw_rate
        assert rates[0.5] == pytest.approx(-rates[-0.5], abs=1e-9)

    def test_charge_equals_mean_current_times_duration(self, cfg, trot):
        rep = run_episode(cfg, trot, duration=7.0)
        assert rep.charge == pytest.approx(rep.mean_current * rep.duration,
                                           rel=1e-9)

    def test_steady_state_window_stability(self, cfg, trot):
        long = run_episode(cfg, trot, duration=24.0)
        short = run_episode(cfg, trot, duration=12.0)
        assert long.v_ss == pytest.approx(short.v_ss, rel=0.005)

    def test_payload_shifts_current_not_speed(self, cfg, trot):
        base = run_episode(cfg, trot, duration=10.0)
        loaded = run_episode(replace(cfg, payload=cfg.mass), trot, duration=10.0)
        assert loaded.v_ss == pytest.approx(base.v_ss, rel=1e-6)
        assert loaded.mean_current > base.mean_current

    def test_determinism_bit_identical(self, cfg, trot):
        model = ChannelModel(drop_prob=0.25, jitter_ticks=2, seed=5)
        a = run_episode(cfg, trot, duration=8.0, channel=model, record_trace=True)
        b = run_episode(cfg, trot, duration=8.0, channel=model, record_trace=True)
        assert a == b
        assert a.to_json() == b.to_json()

    def test_loss_resilience(self, cfg, trot):
        lossless = run_episode(cfg, trot, duration=12.0,
                               channel=ChannelModel(seed=7))
        lossy = run_episode(cfg, trot, duration=12.0,
                            channel=ChannelModel(drop_prob=0.5, seed=7))
        assert abs(lossy.v_ss - lossless.v_ss) / lossless.v_ss < 0.10

    def test_duration_precondition(self, cfg, trot):
        with pytest.raises(ValueError):
            run_episode(cfg, trot, duration=2.0)

    def test_unreachable_gait_propagates(self, cfg):
        with pytest.raises(UnreachableTrajectory):
            run_episode(cfg, GaitParams(stride_len=0.4), duration=6.0)

    def test_effective_frequency_reported(self, cfg):
        rep = run_episode(cfg, GaitParams(stride_len=0.02, frequency=3.0),
                          duration=6.0)
        n = samples_for_frequency(3.0)
        assert rep.samples_per_cycle == n
        assert rep.frequency_effective == pytest.approx(200 / n)

    def test_trace_rows(self, cfg, trot):
        rep = run_episode(cfg, trot, duration=6.0, record_trace=True)
        assert len(rep.trace) == rep.steps
        ts = [row.t for row in rep.trace]
        assert ts == sorted(ts)


class TestJumpEpisode:
    def test_apex_is_ballistic_closed_form(self, cfg):
        rep = jump_episode(cfg)
        assert rep.apex_height == pytest.approx(
            rep.takeoff_speed ** 2 / (2 * G), abs=1e-12)

    def test_integrated_flight_matches_closed_form(self, cfg):
        rep = jump_episode(cfg)
        assert rep.apex_integrated == pytest.approx(rep.apex_height, abs=1e-3)

    def test_degenerate_stroke(self, cfg):
        rep = jump_episode(cfg, crouch_y=0.0699, extend_y=0.070)
        assert rep.apex_height < 0.001

    def test_defaults_land_in_sane_band(self, cfg):
        rep = jump_episode(cfg)
        assert 0.01 <= rep.apex_height <= 0.20

    def test_validation(self, cfg):
        with pytest.raises(ValueError):
            jump_episode(cfg, crouch_y=0.08, extend_y=0.07)

    def test_deterministic(self, cfg):
        assert jump_episode(cfg) == jump_episode(cfg)


class TestNoSlipConsistency:
    def test_stance_feet_hold_world_position(self, cfg, trot):
        """During continuous stance, a supporting foot's world x position
        drifts less than 0.1 mm per gait cycle."""
        from microquad.gait import gait_joint_schedule
        from microquad.simulator import _foot_states, _from_schedule_state

        n = samples_for_frequency(trot.frequency)
        schedule = gait_joint_schedule(cfg.geom, trot, n)
        w = _from_schedule_state(cfg, schedule)
        worst = 0.0
        anchor = {}
        for k in range(3 * n):
            w_prev = w
            w = step_world(w, cfg, schedule.targets_at(k))
            feet = _foot_states(cfg, w.joints)
            for leg in range(4):
                if w.foot_contacts[leg] and w_prev.foot_contacts[leg]:
                    fx = w.x + feet[leg][1] * math.cos(w.yaw) \
                        - feet[leg][2] * math.sin(w.yaw)
                    if leg in anchor:
                        steps = k - anchor[leg][1]
                        drift = abs(fx - anchor[leg][0])
                        worst = max(worst, drift * n / max(steps, 1))
                    else:
                        anchor[leg] = (fx, k)
                else:
                    anchor.pop(leg, None)
        assert worst < 1e-4


class TestRobotConfigValidation:
    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            RobotConfig(mass=0.0)
        with pytest.raises(ValueError):
            RobotConfig(payload=-0.1)
        with pytest.raises(ValueError):
            RobotConfig(track_width=0.0)
