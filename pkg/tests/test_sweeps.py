import json
import os

import pytest

from microquad import GaitParams, GaitType, inverse_kinematics
from microquad.cli import main
from microquad.geometry import FootPoint
from microquad.sweeps import (
    SweepSpec,
    commanded_peak_joint_speed,
    fmt,
    gaitplot_rows,
    sweep,
    workspace_rows,
    write_csv,
)


class TestCsvConventions:
    def test_fmt_nine_significant_digits(self):
        assert fmt(1.0 / 3.0) == "0.333333333"
        assert fmt(1234567.891) == "1234567.89"
        assert fmt(None) == ""
        assert fmt("trot") == "trot"

    def test_write_csv(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, [("a", "b"), (1.5, None)])
        assert path.read_text() == "a,b\n1.5,\n"


class TestSweep:
    def test_single_combo_matches_run_episode(self, cfg):
        from microquad import run_episode

        spec = SweepSpec(stride_len=(0.02,), frequency=(1.0,), duration=6.0)
        rows, ok = sweep(cfg, spec)
        assert ok
        header, row = rows
        report = run_episode(cfg, GaitParams(stride_len=0.02, frequency=1.0), 6.0)
        assert row[header.index("v_ss")] == report.v_ss
        assert row[header.index("mean_current")] == report.mean_current

    def test_failures_recorded_not_dropped(self, cfg):
        spec = SweepSpec(stride_len=(0.02, 0.5), frequency=(1.0,), duration=6.0)
        rows, ok = sweep(cfg, spec)
        assert not ok
        assert len(rows) == 3
        good, bad = rows[1], rows[2]
        assert good[-1] == ""
        assert "UnreachableTrajectory" in bad[-1]

    def test_deterministic_row_order_and_bytes(self, cfg, tmp_path):
        spec = SweepSpec(stride_len=(0.01, 0.02), frequency=(0.5, 1.0),
                         duration=6.0)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(a, sweep(cfg, spec)[0])
        write_csv(b, sweep(cfg, spec)[0])
        assert a.read_bytes() == b.read_bytes()

    def test_payload_curve_never_below_unloaded(self, cfg):
        spec = SweepSpec(stride_len=(0.02,), frequency=(0.5, 1.0, 2.0),
                         payload=(0.0, cfg.mass), duration=12.0)
        rows, ok = sweep(cfg, spec)
        assert ok
        by_key = {}
        for row in rows[1:]:
            by_key[(row[1], row[4])] = (row[5], row[6])  # (freq, payload) -> v, I
        for freq in (0.5, 1.0, 2.0):
            v0, i0 = by_key[(freq, 0.0)]
            v1, i1 = by_key[(freq, cfg.mass)]
            assert v1 == pytest.approx(v0, rel=1e-6)
            assert i1 >= i0

    def test_parallel_workers_match_serial(self, cfg):
        spec = SweepSpec(stride_len=(0.01, 0.02), frequency=(1.0,), duration=6.0)
        serial, _ = sweep(cfg, spec, workers=1)
        parallel, _ = sweep(cfg, spec, workers=2)
        assert serial == parallel


class TestFigureData:
    def test_workspace_files(self, cfg, tmp_path):
        from microquad.sweeps import workspace_files

        # the coaxial estimate needs a reasonably fine grid near its
        # degenerate diagonal; 200 is the production default
        paths = workspace_files(str(tmp_path), cfg.geom, n=200)
        for path in paths.values():
            assert os.path.exists(path)
        summary = open(paths["summary"]).read().splitlines()
        assert summary[0] == "area_side_by_side,area_coaxial,ratio"
        ratio = float(summary[1].split(",")[2])
        assert ratio < 1.0

    def test_workspace_rows_header(self, cfg):
        rows = list(workspace_rows(cfg.geom, 10))
        assert rows[0] == ("theta1", "theta2", "x", "y", "manipulability")
        assert len(rows) > 50

    def test_gaitplot_rows_joint_columns_are_ik_of_foot_columns(self, cfg):
        params = GaitParams(stride_len=0.02)
        rows = list(gaitplot_rows(cfg.geom, params, 50))
        assert rows[0] == ("t", "leg", "phi", "x", "y", "theta1", "theta2")
        for t, leg, phi, x, y, t1, t2 in rows[1:]:
            q = inverse_kinematics(cfg.geom, FootPoint(x, y))
            assert q.theta1 == pytest.approx(t1, abs=1e-12)
            assert q.theta2 == pytest.approx(t2, abs=1e-12)

    def test_gaitplot_has_all_legs(self, cfg):
        rows = list(gaitplot_rows(cfg.geom, GaitParams(), 20))
        legs = {row[1] for row in rows[1:]}
        assert legs == {"FL", "FR", "BL", "BR"}


class TestCommandedSpeed:
    def test_scales_with_frequency(self, cfg):
        slow = commanded_peak_joint_speed(cfg.geom, GaitParams(stride_len=0.03,
                                                               frequency=1.0))
        fast = commanded_peak_joint_speed(cfg.geom, GaitParams(stride_len=0.03,
                                                               frequency=4.0))
        assert fast == pytest.approx(4 * slow, rel=0.1)


class TestCli:
    def test_run_and_metrics_pipeline(self, tmp_path, capsys):
        report = tmp_path / "episode.json"
        rc = main(["run", "--stride", "0.02", "--freq", "1", "--duration", "6",
                   "--out", str(report)])
        assert rc == 0
        data = json.loads(report.read_text())
        assert data["v_ss"] == pytest.approx(0.02, rel=0.02)
        capsys.readouterr()
        rc = main(["metrics", "--report", str(report), "--format", "json"])
        assert rc == 0
        row = json.loads(capsys.readouterr().out)
        assert row["normalized_speed"] == pytest.approx(data["v_ss"] / 0.08,
                                                        rel=1e-9)
        assert row["normalized_workload"] == 0.0

    def test_run_with_trace(self, tmp_path):
        trace = tmp_path / "trace.csv"
        rc = main(["run", "--stride", "0.02", "--freq", "1", "--duration", "6",
                   "--out", str(tmp_path / "r.json"), "--trace", str(trace)])
        assert rc == 0
        lines = trace.read_text().splitlines()
        assert lines[0] == "t,X,Y,yaw,v,current_total"
        assert len(lines) == 1201

    def test_sweep_cli_exit_codes(self, tmp_path):
        rc = main(["sweep", "--stride", "0.02", "--freq", "1",
                   "--duration", "6", "--out", str(tmp_path)])
        assert rc == 0
        rc = main(["sweep", "--stride", "0.5", "--freq", "1",
                   "--duration", "6", "--out", str(tmp_path)])
        assert rc == 1

    def test_figure_data_cli(self, tmp_path):
        rc = main(["figure-data", "--which", "gaitplot", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "gaitplot.csv").exists()

    def test_linkdump_prints_frames(self, capsys):
        rc = main(["linkdump", "--ticks", "5", "--drop", "0.0"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "send seq=    0" in out
        assert "apply" in out
        assert "a8 01" in out  # magic + version in hex

    def test_config_flag(self, tmp_path, capsys):
        cfg_file = tmp_path / "robot.cfg"
        cfg_file.write_text("robot.mass = 0.5\n")
        report = tmp_path / "r.json"
        rc = main(["run", "--stride", "0.02", "--freq", "1", "--duration", "6",
                   "--config", str(cfg_file), "--out", str(report)])
        assert rc == 0
        assert json.loads(report.read_text())["mass_total"] == 0.5
