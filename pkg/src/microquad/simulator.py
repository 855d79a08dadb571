"""Deterministic fixed-timestep kinematic world model.

Bodies don't fall over here: the model is quasi-static and planar. Each
tick the eight actuators track their commanded angles, forward kinematics
gives every foot's position, the deepest feet define the support set, and
the body's planar motion is the least-squares fit to the stance feet's
no-slip constraints.

Contact model: the leg tips roll, so a stance foot pins the body along its
own fore-aft line but is free to scrub sideways. Each stance foot therefore
contributes one longitudinal constraint
    dx_body - dpsi * y_i = -(foot sweep)
where y_i is the foot line's lateral offset (+-track_width/2). Solving the
pair (dx_body, dpsi) in least squares makes a straight trot advance at
stride * frequency and an opposite-stride turn rotate at
2 * stride * frequency / track_width, i.e. differential-drive behavior.
Lateral body velocity is structurally zero: these legs cannot push sideways.

Load torque per joint is a gravity share across stance legs (transmitted
through the leg Jacobian) plus viscous and reflected-inertia terms, which
is what makes simulated current grow with payload and gait speed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .actuator import (
    ActuatorParams,
    ActuatorState,
    speed_limit,
    step_actuator,
    torque_available,
)
from .errors import SingularPose, ZeroVelocity
from .gait import (
    GaitParams,
    JointSchedule,
    gait_joint_schedule,
    standing_pose,
)
from .geometry import (
    FootPoint,
    JointPair,
    LegGeometry,
    forward_kinematics,
    inverse_kinematics,
    jacobian_components,
)
from .link import (
    Channel,
    ChannelModel,
    Mode,
    Receiver,
    decode_command,
    encode_command,
    stream_frames,
)
from .metrics import G, cost_of_transport

COMMAND_RATE_HZ = 200
DT = 1.0 / COMMAND_RATE_HZ
# A foot within this of the deepest extension counts as supporting.
STANCE_TOL = 0.0005


@dataclass(frozen=True)
class RobotConfig:
    """Whole-robot parameters: chassis dimensions, masses, leg geometry,
    actuator model and electrical supply."""

    body_len: float = 0.08      # m, distance between front/back linkage midpoints
    track_width: float = 0.07   # m, lateral distance between foot lines
    mass: float = 0.22          # kg
    payload: float = 0.0        # kg
    geom: LegGeometry = field(default_factory=LegGeometry)
    act: ActuatorParams = field(default_factory=ActuatorParams)
    bus_voltage: float = 5.0    # V
    battery_capacity_ah: float = 2.0

    def __post_init__(self):
        if self.mass <= 0 or self.body_len <= 0 or self.track_width <= 0:
            raise ValueError("mass, body_len and track_width must be > 0")
        if self.payload < 0:
            raise ValueError("payload must be >= 0")

    @property
    def total_mass(self) -> float:
        return self.mass + self.payload


# Leg mounting: (fore-aft midline offset, lateral foot-line offset), FL FR BL BR.
def _leg_mounts(cfg: RobotConfig):
    hl, hw = cfg.body_len / 2.0, cfg.track_width / 2.0
    return ((hl, hw), (hl, -hw), (-hl, hw), (-hl, -hw))


@dataclass(frozen=True)
class WorldState:
    """Simulated robot state: planar pose, support height, joint states and
    energy accumulators. Yaw is unwrapped (accumulates across turns)."""

    t: float
    x: float
    y: float
    yaw: float
    body_height: float
    joints: tuple               # 8 ActuatorState: (FL1, FL2, FR1, FR2, BL1, BL2, BR1, BR2)
    foot_contacts: tuple        # 4 bools, leg order FL FR BL BR
    distance_traveled: float
    energy: float               # J
    charge: float               # A*s
    twist: tuple = (0.0, 0.0)   # last (forward speed m/s, yaw rate rad/s)


def _foot_states(cfg: RobotConfig, joints):
    """Per leg: leg-frame foot point and body-frame fore-aft foot position."""
    mid = cfg.geom.motor_spacing / 2.0
    feet = []
    for leg in range(4):
        q = JointPair(joints[2 * leg].position, joints[2 * leg + 1].position)
        p = forward_kinematics(cfg.geom, q)
        mount_x, mount_y = _leg_mounts(cfg)[leg]
        feet.append((p, mount_x + (p.x - mid), mount_y))
    return feet


def _contacts(feet):
    support = max(f[0].y for f in feet)
    return tuple(f[0].y >= support - STANCE_TOL for f in feet), support


def standing_state(cfg: RobotConfig, gait: GaitParams | None = None) -> WorldState:
    """World at rest in the standing pose, feet planted, accumulators zero."""
    q = standing_pose(cfg.geom, gait or GaitParams())
    joint = ActuatorState(position=q.theta1, target=q.theta1)
    joints = []
    for _ in range(4):
        joints.append(replace(joint, position=q.theta1, target=q.theta1))
        joints.append(replace(joint, position=q.theta2, target=q.theta2))
    joints = tuple(joints)
    feet = _foot_states(cfg, joints)
    contacts, support = _contacts(feet)
    return WorldState(
        t=0.0, x=0.0, y=0.0, yaw=0.0, body_height=support,
        joints=joints, foot_contacts=contacts,
        distance_traveled=0.0, energy=0.0, charge=0.0,
    )


def _from_schedule_state(cfg: RobotConfig, schedule: JointSchedule) -> WorldState:
    """World initialized exactly on the schedule's first sample (no settling
    transient), so steady-state windows are clean."""
    targets = schedule.targets_at(0)
    joints = tuple(ActuatorState(position=a, target=a) for a in targets)
    feet = _foot_states(cfg, joints)
    contacts, support = _contacts(feet)
    return WorldState(
        t=0.0, x=0.0, y=0.0, yaw=0.0, body_height=support,
        joints=joints, foot_contacts=contacts,
        distance_traveled=0.0, energy=0.0, charge=0.0,
    )


def _load_torques(cfg: RobotConfig, w: WorldState):
    """Per-joint external load: the gravity share over the current stance
    set, transmitted through the leg Jacobian. Friction and inertia are the
    actuator model's own business."""
    geom = cfg.geom
    n_stance = sum(w.foot_contacts) or 4
    weight_share = cfg.total_mass * G / n_stance
    loads = []
    for leg in range(4):
        s1, s2 = w.joints[2 * leg], w.joints[2 * leg + 1]
        if w.foot_contacts[leg]:
            try:
                _, _, dydt1, dydt2 = jacobian_components(
                    geom, JointPair(s1.position, s2.position)
                )
            except SingularPose:
                dydt1 = dydt2 = 0.0
            loads.append(abs(dydt1) * weight_share)
            loads.append(abs(dydt2) * weight_share)
        else:
            loads.append(0.0)
            loads.append(0.0)
    return loads


def _stance_twist(old_feet, new_feet, contacts, prev_contacts, dt):
    """Least-squares (body advance, yaw increment) from the stance feet's
    longitudinal no-slip constraints.

    Only feet supporting at both ends of the step constrain the twist (a
    foot that just touched down has no pinned previous position); if no
    foot supports continuously, the fresh stance set is used. Feet all on
    one lateral line pin only the advance; rotation needs both foot lines.
    """
    legs = [i for i in range(4) if contacts[i] and prev_contacts[i]]
    if not legs:
        legs = [i for i in range(4) if contacts[i]]
    rows = [(new_feet[i][2], -(new_feet[i][1] - old_feet[i][1])) for i in legs]
    if not rows:
        return None
    n = len(rows)
    sy = sum(r[0] for r in rows)
    syy = sum(r[0] * r[0] for r in rows)
    sc = sum(r[1] for r in rows)
    syc = sum(r[0] * r[1] for r in rows)
    det = n * syy - sy * sy
    if abs(det) < 1e-12:
        return sc / n, 0.0
    dx = (syy * sc - sy * syc) / det
    dpsi = (sy * sc - n * syc) / det
    return dx, dpsi


def step_world(
    w: WorldState,
    cfg: RobotConfig,
    commands,
    dt: float = DT,
    torque_enabled: bool = True,
) -> WorldState:
    """Advance the world one command period.

    Disabled torque holds every joint (zero velocity and current) and
    freezes the pose. With no stance feet the pose coasts on the last
    planar twist.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if len(commands) != 8:
        raise ValueError("exactly 8 joint commands required")

    old_feet = _foot_states(cfg, w.joints)

    if torque_enabled:
        loads = _load_torques(cfg, w)
        new_joints = tuple(
            step_actuator(replace(s, target=cmd, torque_enabled=True), cfg.act, dt, load)
            for s, cmd, load in zip(w.joints, commands, loads)
        )
    else:
        new_joints = tuple(
            replace(s, torque_enabled=False, velocity=0.0, applied_torque=0.0, current=0.0)
            for s in w.joints
        )

    new_feet = _foot_states(cfg, new_joints)
    contacts, support = _contacts(new_feet)

    twist = _stance_twist(old_feet, new_feet, contacts, w.foot_contacts, dt)
    if twist is None:
        dx, dpsi = w.twist[0] * dt, w.twist[1] * dt
    else:
        dx, dpsi = twist

    heading = w.yaw + 0.5 * dpsi
    new_x = w.x + dx * math.cos(heading)
    new_y = w.y + dx * math.sin(heading)

    total_current = sum(j.current for j in new_joints)
    return WorldState(
        t=w.t + dt,
        x=new_x,
        y=new_y,
        yaw=w.yaw + dpsi,
        body_height=support,
        joints=new_joints,
        foot_contacts=contacts,
        distance_traveled=w.distance_traveled + abs(dx),
        energy=w.energy + cfg.bus_voltage * total_current * dt,
        charge=w.charge + total_current * dt,
        twist=(dx / dt, dpsi / dt),
    )


@dataclass(frozen=True)
class TraceRow:
    t: float
    x: float
    y: float
    yaw: float
    v: float
    current_total: float


@dataclass(frozen=True)
class EpisodeReport:
    """Everything needed for the performance metrics, plus optional traces."""

    v_ss: float
    mean_current: float
    cot: float | None
    yaw_rate: float
    duration: float
    steps: int
    frequency_effective: float
    samples_per_cycle: int
    charge: float
    energy: float
    bus_voltage: float
    mass_total: float
    stride_len: float
    frequency: float
    duty: float
    gait: str
    turn: float
    payload: float
    trace: tuple = ()

    def to_json_dict(self) -> dict:
        d = {
            "v_ss": self.v_ss,
            "mean_current": self.mean_current,
            "cot": self.cot,
            "yaw_rate": self.yaw_rate,
            "duration": self.duration,
            "steps": self.steps,
            "frequency_effective": self.frequency_effective,
            "samples_per_cycle": self.samples_per_cycle,
            "charge": self.charge,
            "energy": self.energy,
            "bus_voltage": self.bus_voltage,
            "mass_total": self.mass_total,
            "params": {
                "stride_len": self.stride_len,
                "frequency": self.frequency,
                "duty": self.duty,
                "gait": self.gait,
                "turn": self.turn,
                "payload": self.payload,
            },
        }
        if self.trace:
            d["trace"] = [
                [r.t, r.x, r.y, r.yaw, r.v, r.current_total] for r in self.trace
            ]
        return d

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)


def samples_for_frequency(frequency: float, rate_hz: int = COMMAND_RATE_HZ) -> int:
    """Schedule length so one sample streams per command tick; the effective
    cycle frequency is rate / n."""
    return max(4, round(rate_hz / frequency))


def run_episode(
    cfg: RobotConfig,
    gait: GaitParams,
    duration: float,
    seed: int = 0,
    channel: ChannelModel | None = None,
    record_trace: bool = False,
) -> EpisodeReport:
    """Stream a gait for a duration and report steady-state performance.

    Steady-state velocity and yaw rate are measured over the last half of
    the episode, trimmed to a whole number of gait cycles so periodic
    motion yields exact steady-state figures; mean current is charge over
    the full duration. COT is absent (None) when the robot does not move.
    With a channel model the command stream passes through the lossy link
    with latest-wins receive semantics; otherwise commands apply directly.
    """
    n = samples_for_frequency(gait.frequency)
    f_eff = COMMAND_RATE_HZ / n
    if duration < 5.0 / f_eff:
        raise ValueError("duration must cover at least 5 gait cycles")
    schedule = gait_joint_schedule(cfg.geom, gait, n)
    steps = round(duration * COMMAND_RATE_HZ)

    w = _from_schedule_state(cfg, schedule)
    trace = []

    chan = Channel(channel) if channel is not None else None
    receiver = Receiver(params=cfg.act)
    if chan is not None:
        receiver.targets = schedule.targets_at(0)
        frames = stream_frames(
            (schedule.targets_at(k) for k in range(steps)), cfg.act
        )

    half_state = None
    window_cycles = max(1, (steps // 2) // n)
    half_index = steps - window_cycles * n
    for k in range(steps):
        if chan is None:
            commands = schedule.targets_at(k)
            torque_on = True
        else:
            chan.submit(encode_command(next(frames)), k)
            for data in chan.poll(k):
                receiver.apply(decode_command(data))
            commands = receiver.targets
            torque_on = receiver.mode is not Mode.TORQUE_OFF
        prev = w
        w = step_world(w, cfg, commands, DT, torque_enabled=torque_on)
        if record_trace:
            v_inst = math.hypot(w.x - prev.x, w.y - prev.y) / DT
            trace.append(TraceRow(w.t, w.x, w.y, w.yaw, v_inst, sum(j.current for j in w.joints)))
        if k + 1 == half_index:
            half_state = w

    window = w.t - half_state.t
    v_ss = math.hypot(w.x - half_state.x, w.y - half_state.y) / window
    yaw_rate = (w.yaw - half_state.yaw) / window
    mean_current = w.charge / w.t
    try:
        cot = cost_of_transport(cfg.bus_voltage, mean_current, cfg.total_mass, v_ss)
    except ZeroVelocity:
        cot = None
    return EpisodeReport(
        v_ss=v_ss,
        mean_current=mean_current,
        cot=cot,
        yaw_rate=yaw_rate,
        duration=w.t,
        steps=steps,
        frequency_effective=f_eff,
        samples_per_cycle=n,
        charge=w.charge,
        energy=w.energy,
        bus_voltage=cfg.bus_voltage,
        mass_total=cfg.total_mass,
        stride_len=gait.stride_len,
        frequency=gait.frequency,
        duty=gait.duty,
        gait=gait.gait.value,
        turn=gait.turn,
        payload=cfg.payload,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class JumpReport:
    takeoff_speed: float
    apex_height: float
    apex_integrated: float
    push_ticks: int


def jump_episode(
    cfg: RobotConfig, crouch_y: float = 0.050, extend_y: float = 0.095
) -> JumpReport:
    """Command a crouch-to-full-extension push and report the jump.

    Quasi-dynamic vertical push: while the feet are planted, the joints are
    kinematically bound to the body height, so their speed is the body speed
    through the leg Jacobian. Available foot force follows the linear
    torque-speed curve tau_stall * (1 - w/w_max) of each motor; the body
    accelerates with the binding motor's force until either the stroke ends
    or the no-load tracking ceiling is reached. Takeoff speed is the fastest
    extension rate reached before liftoff; apex is the ballistic v^2/(2g),
    cross-checked by a step integrator.
    """
    if not crouch_y < extend_y:
        raise ValueError("crouch_y must be < extend_y")
    mid = cfg.geom.motor_spacing / 2.0
    q_target = inverse_kinematics(cfg.geom, FootPoint(mid, extend_y))
    inverse_kinematics(cfg.geom, FootPoint(mid, crouch_y))  # validates the crouch

    act = cfg.act
    y = crouch_y
    v = 0.0
    takeoff = 0.0
    ticks = 0
    for ticks in range(1, 4001):
        q = inverse_kinematics(cfg.geom, FootPoint(mid, y))
        _, _, dydt1, dydt2 = jacobian_components(cfg.geom, q)
        gain = abs(dydt1) + abs(dydt2)  # body m/s per rad/s of symmetric push
        if gain < 1e-9:
            takeoff = v
            break
        # no-load tracking ceiling for the remaining stroke
        err = max(abs(q_target.theta1 - q.theta1), abs(q_target.theta2 - q.theta2))
        v_ceiling = gain * min(speed_limit(act), act.kp * err)
        # operating point on the torque-speed curve at the current body speed
        w_op = v / gain
        avail = torque_available(act, w_op)
        force = 4.0 * min(avail / max(abs(dydt1), 1e-9),
                          avail / max(abs(dydt2), 1e-9))
        accel = force / cfg.total_mass - G
        v = min(max(0.0, v + accel * DT), v_ceiling)
        takeoff = max(takeoff, v)
        y_next = y + v * DT
        if y_next >= extend_y or v_ceiling <= 1e-12:
            break
        if v <= 0.0 and accel <= 0.0:
            break
        y = y_next

    apex = takeoff * takeoff / (2.0 * G)
    # ballistic cross-check; per-step update is exact for constant g
    h, vv, apex_int = 0.0, takeoff, 0.0
    while vv > 0.0:
        h += vv * DT - 0.5 * G * DT * DT
        vv -= G * DT
        apex_int = max(apex_int, h)
    return JumpReport(takeoff, apex, apex_int, ticks)


def trace_csv_rows(report: EpisodeReport):
    """Rows for the trace CSV: t, X, Y, yaw, v, current_total."""
    yield ("t", "X", "Y", "yaw", "v", "current_total")
    for r in report.trace:
        yield (r.t, r.x, r.y, r.yaw, r.v, r.current_total)
