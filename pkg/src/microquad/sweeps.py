"""Batch parameter sweeps and figure-data regeneration.

All outputs are CSV with a header row, fixed column order, '.' decimal
separator and floats printed with 9 significant digits, so golden-file
diffs are stable. Failed combinations are captured per row in an error
column rather than aborting the sweep.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .gait import GaitParams, GaitType, LEG_NAMES, foot_point_at_phase, leg_phase_offsets
from .geometry import (
    LegGeometry,
    inverse_kinematics,
    FootPoint,
    workspace_area_compare,
    workspace_sample,
)
from .simulator import COMMAND_RATE_HZ, RobotConfig, run_episode, samples_for_frequency


def fmt(value) -> str:
    """CSV cell: 9 significant digits for floats, empty for None."""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(",".join(fmt(cell) for cell in row))
            fh.write("\n")


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian sweep axes plus per-episode settings."""

    stride_len: tuple = (0.03,)
    frequency: tuple = (1.0,)
    duty: tuple = (0.5,)
    gait: tuple = (GaitType.TROT,)
    payload: tuple = (0.0,)
    duration: float = 10.0
    seed: int = 0
    base_gait: GaitParams = field(default_factory=GaitParams)

    def __post_init__(self):
        for name in ("stride_len", "frequency", "duty", "gait", "payload"):
            if not getattr(self, name):
                raise ValueError(f"sweep axis {name} is empty")

    @property
    def size(self) -> int:
        return (
            len(self.stride_len) * len(self.frequency) * len(self.duty)
            * len(self.gait) * len(self.payload)
        )

    def combos(self):
        return itertools.product(
            self.stride_len, self.frequency, self.duty, self.gait, self.payload
        )


SWEEP_HEADER = (
    "stride_len", "frequency", "duty", "gait", "payload",
    "v_ss", "mean_current", "cot", "error",
)


def _run_combo(args):
    cfg, spec, combo = args
    stride, freq, duty, gait_type, payload = combo
    params = replace(
        spec.base_gait, stride_len=stride, frequency=freq, duty=duty, gait=gait_type
    )
    row_head = (stride, freq, duty, gait_type.value, payload)
    try:
        report = run_episode(
            replace(cfg, payload=payload), params, spec.duration, seed=spec.seed
        )
    except Exception as exc:  # captured per row
        return row_head + (None, None, None, f"{type(exc).__name__}: {exc}")
    return row_head + (report.v_ss, report.mean_current, report.cot, "")


def sweep(cfg: RobotConfig, spec: SweepSpec, workers: int = 1):
    """One row per combination, in deterministic spec order regardless of
    worker completion order. Returns (rows, all_succeeded)."""
    jobs = [(cfg, spec, combo) for combo in spec.combos()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_combo, jobs))
    else:
        results = [_run_combo(job) for job in jobs]
    rows = [SWEEP_HEADER] + results
    ok = all(r[-1] == "" for r in results)
    return rows, ok


# --- figure data -----------------------------------------------------------

WORKSPACE_HEADER = ("theta1", "theta2", "x", "y", "manipulability")


def workspace_rows(geom: LegGeometry, n: int):
    sample = workspace_sample(geom, n)
    yield WORKSPACE_HEADER
    for q, p, w in zip(sample.joints, sample.points, sample.manipulability):
        yield (q.theta1, q.theta2, p.x, p.y, w)


def workspace_files(outdir, geom: LegGeometry, n: int = 200) -> dict:
    """Side-by-side and coaxial point clouds plus the area summary."""
    import os

    coax = replace(geom, motor_spacing=0.0)
    paths = {
        "side_by_side": os.path.join(outdir, "workspace_side_by_side.csv"),
        "coaxial": os.path.join(outdir, "workspace_coaxial.csv"),
        "summary": os.path.join(outdir, "workspace_summary.csv"),
    }
    write_csv(paths["side_by_side"], workspace_rows(geom, n))
    write_csv(paths["coaxial"], workspace_rows(coax, n))
    cmp_ = workspace_area_compare(geom, coax, n)
    write_csv(
        paths["summary"],
        [
            ("area_side_by_side", "area_coaxial", "ratio"),
            (cmp_.area_side_by_side, cmp_.area_coaxial, cmp_.ratio),
        ],
    )
    return paths


GAITPLOT_HEADER = ("t", "leg", "phi", "x", "y", "theta1", "theta2")


def gaitplot_rows(geom: LegGeometry, params: GaitParams, samples_per_cycle: int = 200):
    """One cycle of the four foot trajectories and their joint angles.

    x and y are in the leg frame (midline offset included), so theta1 and
    theta2 are exactly the inverse kinematics of the same row's x, y.
    """
    offsets = leg_phase_offsets(params.gait).offsets
    mid = geom.motor_spacing / 2.0
    dt = 1.0 / (params.frequency * samples_per_cycle)
    yield GAITPLOT_HEADER
    for k in range(samples_per_cycle):
        t = k * dt
        for leg_idx, leg in enumerate(LEG_NAMES):
            phi = (k / samples_per_cycle + offsets[leg_idx]) % 1.0
            pt = foot_point_at_phase(params, phi)
            leg_pt = FootPoint(mid + pt.x, pt.y)
            q = inverse_kinematics(geom, leg_pt)
            yield (t, leg, phi, leg_pt.x, leg_pt.y, q.theta1, q.theta2)


def default_saturation_spec(stride: float = 0.08) -> SweepSpec:
    """Frequency sweep rising through the loaded actuator speed limit at a
    fixed stride; regenerates the speed/current saturation curve."""
    return SweepSpec(
        stride_len=(stride,),
        frequency=(2.0, 4.0, 5.0, 8.0, 10.0, 12.5, 14.3),
        duty=(0.5,),
        gait=(GaitType.TROT,),
        payload=(0.0, 0.22),
        duration=6.0,
    )


def commanded_peak_joint_speed(geom: LegGeometry, params: GaitParams) -> float:
    """Largest per-tick commanded joint rate (rad/s) of the streamed schedule."""
    from .gait import gait_joint_schedule

    n = samples_for_frequency(params.frequency)
    schedule = gait_joint_schedule(geom, params, n)
    dt = 1.0 / COMMAND_RATE_HZ
    peak = 0.0
    for leg in schedule.legs:
        for k in range(n):
            a, b = leg[k], leg[(k + 1) % n]
            peak = max(
                peak,
                abs(b.theta1 - a.theta1) / dt,
                abs(b.theta2 - a.theta2) / dt,
            )
    return peak


def figure_data(which: str, outdir: str, cfg: RobotConfig, params: GaitParams) -> dict:
    """Regenerate plotted quantities: 'workspace', 'gaitplot' or 'sweep'."""
    import os

    os.makedirs(outdir, exist_ok=True)
    if which == "workspace":
        return workspace_files(outdir, cfg.geom)
    if which == "gaitplot":
        path = os.path.join(outdir, "gaitplot.csv")
        write_csv(path, gaitplot_rows(cfg.geom, params))
        return {"gaitplot": path}
    if which == "sweep":
        path = os.path.join(outdir, "sweep.csv")
        rows, _ = sweep(cfg, default_saturation_spec())
        write_csv(path, rows)
        return {"sweep": path}
    raise ValueError(f"unknown figure-data target {which!r}")
