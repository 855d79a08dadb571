"""Open-loop gait generation.

One gait cycle is a closed foot loop built from two half-sinusoids around
the resting extension y0: the ground (stance) phase extends the foot by up
to ground_amp while it sweeps backward relative to the body, and the lift
(swing) phase retracts it by up to lift_amp while it returns forward. The
x sweep is linear in each sub-phase, giving a flat-bottomed loop and a
constant foot speed over ground.

Stride semantics: stride_len is the body's forward travel per gait cycle.
Under no-slip stance kinematics the foot's ground-contact sweep is then
stride_len * duty, the body speed is stride_len * frequency at any duty
ratio, and a turn command scales the left/right strides differentially.

Per-leg trajectories are the same loop phase-offset according to the gait
(trot pairs diagonal legs, bound pairs front/rear, pronk moves all four
together). Foot x here is body-relative and centered on the leg's linkage
midline; conversion to motor angles adds the midline offset d/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import JointLimitError, Unreachable, UnreachableTrajectory
from .geometry import FootPoint, JointPair, LegGeometry, inverse_kinematics

LEG_NAMES = ("FL", "FR", "BL", "BR")
LEFT_LEGS = (0, 2)
RIGHT_LEGS = (1, 3)


class GaitType(Enum):
    WALK = "walk"
    TROT = "trot"
    BOUND = "bound"
    PRONK = "pronk"


@dataclass(frozen=True)
class GaitParams:
    """Tunable gait-generation parameters.

    stride_len: body travel per cycle (m); frequency: cycles/s; duty: ground
    phase fraction of the cycle; lift_amp/ground_amp: sinusoid amplitudes
    above/below the resting extension stand_height; turn in [-1, 1] commands
    a differential stride (+-1 turns in place).
    """

    stride_len: float = 0.03
    frequency: float = 1.0
    duty: float = 0.5
    lift_amp: float = 0.015
    ground_amp: float = 0.002
    stand_height: float = 0.07
    gait: GaitType = GaitType.TROT
    turn: float = 0.0

    def __post_init__(self):
        if self.stride_len < 0:
            raise ValueError("stride_len must be >= 0")
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")
        if not 0.0 < self.duty < 1.0:
            raise ValueError("duty must be in (0, 1)")
        if self.lift_amp < 0 or self.ground_amp < 0:
            raise ValueError("amplitudes must be >= 0")
        if self.stand_height - self.lift_amp <= 0:
            raise ValueError("stand_height - lift_amp must stay positive")
        if not -1.0 <= self.turn <= 1.0:
            raise ValueError("turn must be in [-1, 1]")


@dataclass(frozen=True)
class LegPhaseMap:
    """Cycle-fraction offsets per leg, ordered (FL, FR, BL, BR)."""

    offsets: tuple

    def __post_init__(self):
        if len(self.offsets) != 4 or any(not 0.0 <= o < 1.0 for o in self.offsets):
            raise ValueError("offsets must be four fractions in [0, 1)")


_OFFSETS = {
    GaitType.TROT: (0.0, 0.5, 0.5, 0.0),
    GaitType.WALK: (0.0, 0.5, 0.75, 0.25),
    GaitType.BOUND: (0.0, 0.0, 0.5, 0.5),
    GaitType.PRONK: (0.0, 0.0, 0.0, 0.0),
}


def leg_phase_offsets(gait: GaitType) -> LegPhaseMap:
    return LegPhaseMap(_OFFSETS[gait])


def foot_point_at_phase(p: GaitParams, phi: float) -> FootPoint:
    """Foot point (body-relative x, extension y) at cycle fraction phi in [0, 1).

    Ground phase on [0, duty): x sweeps from +c/2 back to -c/2 with
    c = stride_len * duty, y = y0 + ground_amp * sin(pi * subphase).
    Lift phase on [duty, 1): x returns, y = y0 - lift_amp * sin(pi * subphase).
    sin vanishes at every sub-phase boundary, so the loop closes at y0.
    """
    phi = phi % 1.0
    contact = p.stride_len * p.duty
    if phi < p.duty:
        s = phi / p.duty
        x = contact * (0.5 - s)
        y = p.stand_height + p.ground_amp * math.sin(math.pi * s)
    else:
        s = (phi - p.duty) / (1.0 - p.duty)
        x = contact * (s - 0.5)
        y = p.stand_height - p.lift_amp * math.sin(math.pi * s)
    return FootPoint(x, y)


@dataclass(frozen=True)
class FootTrajectory:
    """Uniform sampling of one gait cycle; sample k is phase k/n. The loop
    closes onto sample 0 at the wrap."""

    samples: tuple
    dt: float


def build_stride_trajectory(p: GaitParams, samples_per_cycle: int) -> FootTrajectory:
    if samples_per_cycle < 4:
        raise ValueError("samples_per_cycle must be >= 4")
    pts = tuple(
        foot_point_at_phase(p, k / samples_per_cycle) for k in range(samples_per_cycle)
    )
    return FootTrajectory(pts, 1.0 / (p.frequency * samples_per_cycle))


def turning_adjust(p: GaitParams):
    """Left/right effective strides for the turn command.

    Steering scrubs the inside track: for turn t >= 0 the left stride scales
    by (1 - 2t) while the right holds at s, and mirrored for t < 0. The map
    is odd (swapping the sign of t swaps sides), monotone, and at |t| = 1
    the strides are equal and opposite, so the robot rotates in place with
    yaw rate 2 * s * f / track_width under the line-contact stance model.
    """
    s = p.stride_len
    t = p.turn
    if t >= 0:
        return s * (1.0 - 2.0 * t), s
    return s, s * (1.0 + 2.0 * t)


def _shifted(series, offset: float, n: int):
    shift = round(offset * n) % n
    return tuple(series[(k + shift) % n] for k in range(n))


@dataclass(frozen=True)
class JointSchedule:
    """Per-leg joint-angle series over one cycle, ordered (FL, FR, BL, BR)."""

    legs: tuple
    samples_per_cycle: int
    dt: float

    def targets_at(self, k: int):
        """Eight target angles at sample k: (FL1, FL2, FR1, FR2, BL1, BL2, BR1, BR2)."""
        i = k % self.samples_per_cycle
        out = []
        for leg in self.legs:
            q = leg[i]
            out.append(q.theta1)
            out.append(q.theta2)
        return tuple(out)


def gait_joint_schedule(
    geom: LegGeometry, p: GaitParams, samples_per_cycle: int,
    direction: float = 1.0,
) -> JointSchedule:
    """Phase-offset per-leg joint series for one cycle.

    Left and right sides get their turning-adjusted strides; each leg's foot
    series is the side's trajectory circularly shifted by round(offset * n).
    Foot x is mapped onto the leg frame about the linkage midline
    (x_leg = d/2 + x) before inverse kinematics. direction = -1 walks the
    same gait backwards.
    """
    n = samples_per_cycle
    s_left, s_right = turning_adjust(p)
    if direction < 0:
        s_left, s_right = -s_left, -s_right
    offsets = leg_phase_offsets(p.gait).offsets
    mid = geom.motor_spacing / 2.0

    def joint_series(stride: float):
        traj = build_stride_trajectory(replace(p, stride_len=abs(stride)), n)
        pts = traj.samples
        if stride < 0:
            # negative stride: the foot sweeps forward during ground phase
            pts = tuple(FootPoint(-pt.x, pt.y) for pt in pts)
        out = []
        for idx, pt in enumerate(pts):
            try:
                out.append(inverse_kinematics(geom, FootPoint(mid + pt.x, pt.y)))
            except (Unreachable, JointLimitError) as exc:
                raise UnreachableTrajectory("(side series)", idx, exc) from exc
        return tuple(out)

    side_series = {}
    legs = []
    for leg_idx in range(4):
        stride = s_left if leg_idx in LEFT_LEGS else s_right
        if stride not in side_series:
            try:
                side_series[stride] = joint_series(stride)
            except UnreachableTrajectory as exc:
                raise UnreachableTrajectory(LEG_NAMES[leg_idx], exc.index, exc.cause) from exc
        legs.append(_shifted(side_series[stride], offsets[leg_idx], n))
    return JointSchedule(tuple(legs), n, 1.0 / (p.frequency * n))


def standing_pose(geom: LegGeometry, p: GaitParams) -> JointPair:
    """Joint pair holding the foot at the resting point (midline, stand_height)."""
    return inverse_kinematics(
        geom, FootPoint(geom.motor_spacing / 2.0, p.stand_height)
    )
