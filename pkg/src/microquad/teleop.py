"""Live teleoperation session: the authoritative 200 Hz world loop.

A session owns one world, one command channel and one telemetry channel.
Every tick it turns the latest operator command into this tick's joint
targets (gait phase is a global counter, so parameter changes are
phase-continuous and never teleport a foot), frames and streams them
through the lossy link, applies whatever the receiver accepted, and steps
the world. State snapshots are published at a decimated rate for UIs.

Sessions are deterministic: a scripted command timeline replayed against
the same seeds yields byte-identical state traces, which is how the
network-facing server is tested against the headless path.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum

from .actuator import quantize_position
from .errors import SchemaError
from .gait import GaitParams, GaitType, gait_joint_schedule
from .geometry import FootPoint, inverse_kinematics
from .link import (
    Channel,
    ChannelModel,
    CommandFrame,
    Mode,
    Receiver,
    SEQ_MOD,
    TelemetryFrame,
    decode_command,
    decode_telemetry,
    encode_command,
    encode_telemetry,
)
from .metrics import G
from .simulator import (
    COMMAND_RATE_HZ,
    DT,
    RobotConfig,
    WorldState,
    samples_for_frequency,
    standing_state,
    step_world,
)

SCHEMA_VERSION = 1
STATE_RATE_HZ = 30
TELEMETRY_DECIMATION = 4
COT_WINDOW_S = 2.0
JUMP_CROUCH_TICKS = 60
JUMP_PUSH_TICKS = 60
JUMP_CROUCH_Y = 0.050
JUMP_EXTEND_Y = 0.095


class SessionMode(Enum):
    STAND = "stand"
    WALK = "walk"
    JUMP = "jump"
    TORQUE_OFF = "torque_off"


# GaitParams fields a client may override live.
OVERRIDABLE_PARAMS = (
    "stride_len",
    "frequency",
    "duty",
    "lift_amp",
    "ground_amp",
    "stand_height",
)


@dataclass(frozen=True)
class TeleopCommand:
    """Validated operator intent. forward scales the stride; turn commands
    the differential stride; overrides patch individual gait parameters."""

    forward: float = 0.0
    turn: float = 0.0
    gait: GaitType = GaitType.TROT
    mode: SessionMode = SessionMode.STAND
    overrides: tuple = ()


def command_ingest(payload) -> TeleopCommand:
    """Parse and validate a client command message.

    Accepts a JSON string or an already-decoded mapping. Unknown fields and
    out-of-range values are rejected with the offending field path.
    """
    if isinstance(payload, (str, bytes)):
        try:
            data = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc.msg}") from exc
    else:
        data = payload
    if not isinstance(data, dict):
        raise SchemaError("$", "expected a JSON object")

    allowed = {"v", "forward", "turn", "gait", "mode", "params"}
    for key in data:
        if key not in allowed:
            raise SchemaError(key, "unknown field")
    if "v" in data and data["v"] != SCHEMA_VERSION:
        raise SchemaError("v", f"unsupported schema version {data['v']!r}")

    def axis(name):
        value = data.get(name, 0.0)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(name, "expected a number")
        if not -1.0 <= value <= 1.0:
            raise SchemaError(name, "out of range [-1, 1]")
        return float(value)

    forward = axis("forward")
    turn = axis("turn")

    gait_name = data.get("gait", GaitType.TROT.value)
    try:
        gait = GaitType(gait_name)
    except ValueError:
        allowed_gaits = [g.value for g in GaitType]
        raise SchemaError("gait", f"expected one of {allowed_gaits}") from None

    mode_name = data.get("mode", SessionMode.STAND.value)
    try:
        mode = SessionMode(mode_name)
    except ValueError:
        allowed_modes = [m.value for m in SessionMode]
        raise SchemaError("mode", f"expected one of {allowed_modes}") from None

    overrides = []
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("params", "expected an object")
    for key in sorted(params):
        if key not in OVERRIDABLE_PARAMS:
            raise SchemaError(f"params.{key}", "unknown parameter")
        value = params[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"params.{key}", "expected a number")
        overrides.append((key, float(value)))

    cmd = TeleopCommand(forward, turn, gait, mode, tuple(overrides))
    _resolve_gait(GaitParams(), cmd)  # validates override ranges
    return cmd


def _resolve_gait(base: GaitParams, cmd: TeleopCommand) -> GaitParams:
    fields = {key: value for key, value in cmd.overrides}
    fields["gait"] = cmd.gait
    fields["turn"] = cmd.turn
    stride = fields.pop("stride_len", base.stride_len)
    fields["stride_len"] = abs(cmd.forward) * stride
    try:
        return replace(base, **fields)
    except ValueError as exc:
        raise SchemaError("params", str(exc)) from None


@dataclass(frozen=True)
class LinkStats:
    sent: int
    delivered: int
    dropped: int
    applied: int
    rejected_stale: int
    state_dropped: int

    def to_dict(self):
        return {
            "sent": self.sent,
            "delivered": self.delivered,
            "dropped": self.dropped,
            "applied": self.applied,
            "rejected_stale": self.rejected_stale,
            "state_dropped": self.state_dropped,
        }


@dataclass(frozen=True)
class StateUpdate:
    """Published session snapshot; serializes to the documented JSON schema."""

    t: float
    pose: tuple
    body_height: float
    joints: tuple
    currents: tuple
    speed: float
    cot: float | None
    battery_pct: float
    battery_voltage: float
    link: LinkStats
    mode: str
    gait: str

    def to_json_dict(self) -> dict:
        return {
            "v": SCHEMA_VERSION,
            "t": self.t,
            "pose": {"x": self.pose[0], "y": self.pose[1], "yaw": self.pose[2]},
            "body_height": self.body_height,
            "joints": list(self.joints),
            "currents": list(self.currents),
            "speed": self.speed,
            "cot": self.cot,
            "battery": {"pct": self.battery_pct, "voltage": self.battery_voltage},
            "link": self.link.to_dict(),
            "mode": self.mode,
            "gait": self.gait,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


class TeleopSession:
    """Deterministic 200 Hz teleop core, free of any I/O."""

    def __init__(
        self,
        cfg: RobotConfig,
        base_gait: GaitParams | None = None,
        channel: ChannelModel | None = None,
        state_rate_hz: int = STATE_RATE_HZ,
        telemetry_decimation: int = TELEMETRY_DECIMATION,
    ):
        self.cfg = cfg
        self.base_gait = base_gait or GaitParams()
        model = channel or ChannelModel()
        self.cmd_channel = Channel(model)
        self.tlm_channel = Channel(replace(model, seed=model.seed + 1))
        self.receiver = Receiver(params=cfg.act)
        self.world = standing_state(cfg, self.base_gait)
        self.command = TeleopCommand()
        self.tick_index = 0
        self.seq = 0
        self.state_rate_hz = state_rate_hz
        self.telemetry_decimation = telemetry_decimation
        self.state_dropped = 0
        self.last_telemetry: TelemetryFrame | None = None
        self._phase_num = 0
        self._phase_den = samples_for_frequency(self.base_gait.frequency)
        self._schedules = {}
        self._jump_tick = None
        self._stand_targets = self._pose_targets(self.base_gait.stand_height)
        self._cot_window = deque()

    # -- target generation ---------------------------------------------------

    def _pose_targets(self, extension: float):
        mid = self.cfg.geom.motor_spacing / 2.0
        q = inverse_kinematics(self.cfg.geom, FootPoint(mid, extension))
        return (q.theta1, q.theta2) * 4

    def _schedule_for(self, params: GaitParams, direction: float):
        key = (
            params.stride_len, params.frequency, params.duty, params.lift_amp,
            params.ground_amp, params.stand_height, params.gait, params.turn,
            direction,
        )
        cached = self._schedules.get(key)
        if cached is None:
            n = samples_for_frequency(params.frequency)
            cached = gait_joint_schedule(self.cfg.geom, params, n, direction)
            self._schedules[key] = cached
        return cached

    def _advance_phase(self, n: int):
        if n != self._phase_den:
            # parameter change: carry the phase fraction over to the new cycle
            self._phase_num = round(self._phase_num / self._phase_den * n) % n
            self._phase_den = n
        index = self._phase_num
        self._phase_num = (self._phase_num + 1) % n
        return index

    def _targets_for_tick(self):
        cmd = self.command
        if cmd.mode is SessionMode.TORQUE_OFF:
            return self._stand_targets, Mode.TORQUE_OFF
        if cmd.mode is SessionMode.JUMP:
            if self._jump_tick is None:
                self._jump_tick = self.tick_index
            dt_ticks = self.tick_index - self._jump_tick
            if dt_ticks < JUMP_CROUCH_TICKS:
                return self._pose_targets(JUMP_CROUCH_Y), Mode.STREAM
            if dt_ticks < JUMP_CROUCH_TICKS + JUMP_PUSH_TICKS:
                return self._pose_targets(JUMP_EXTEND_Y), Mode.STREAM
            self.command = replace(cmd, mode=SessionMode.STAND)
            self._jump_tick = None
            return self._stand_targets, Mode.STREAM
        if cmd.mode is SessionMode.STAND or (cmd.forward == 0.0 and cmd.turn == 0.0):
            params = self._resolved_params()
            self._stand_targets = self._pose_targets(params.stand_height)
            return self._stand_targets, Mode.STREAM
        params = self._resolved_params()
        schedule = self._schedule_for(params, 1.0 if cmd.forward >= 0 else -1.0)
        index = self._advance_phase(schedule.samples_per_cycle)
        return schedule.targets_at(index), Mode.STREAM

    def _resolved_params(self) -> GaitParams:
        cmd = self.command
        if cmd.mode is not SessionMode.WALK:
            cmd = replace(cmd, forward=0.0, turn=0.0)
        if cmd.forward == 0.0 and cmd.turn != 0.0:
            # pure spin: full differential about zero mean stride
            cmd = replace(cmd, forward=1.0)
        return _resolve_gait(self.base_gait, cmd)

    # -- the loop --------------------------------------------------------------

    def submit_command(self, cmd: TeleopCommand) -> None:
        """Last-writer-wins; takes effect on the next tick."""
        self.command = cmd

    def tick(self) -> StateUpdate | None:
        """Advance one command period; returns a StateUpdate on publish ticks."""
        targets, mode = self._targets_for_tick()
        frame = CommandFrame(
            self.seq,
            mode,
            tuple(quantize_position(a % (2 * math.pi), self.cfg.act) for a in targets),
        )
        self.seq = (self.seq + 1) % SEQ_MOD
        self.cmd_channel.submit(encode_command(frame), self.tick_index)
        for data in self.cmd_channel.poll(self.tick_index):
            self.receiver.apply(decode_command(data))

        torque_on = self.receiver.mode is not Mode.TORQUE_OFF
        commands = self.receiver.targets or self._stand_targets
        prev = self.world
        self.world = step_world(self.world, self.cfg, commands, DT, torque_enabled=torque_on)

        if self.tick_index % self.telemetry_decimation == 0:
            self._emit_telemetry()

        update = None
        rate = self.state_rate_hz
        if (self.tick_index + 1) * rate // COMMAND_RATE_HZ > self.tick_index * rate // COMMAND_RATE_HZ:
            update = self._snapshot(prev)
        self.tick_index += 1
        return update

    def run_scripted(self, timeline, n_ticks: int):
        """Deterministic replay: timeline maps tick index -> command payload
        (JSON text or dict). Returns every published StateUpdate as JSON."""
        schedule = {}
        for tick, payload in (timeline.items() if isinstance(timeline, dict) else timeline):
            schedule[int(tick)] = payload
        out = []
        for k in range(n_ticks):
            if k in schedule:
                self.submit_command(command_ingest(schedule[k]))
            update = self.tick()
            if update is not None:
                out.append(update.to_json())
        return out

    # -- telemetry & snapshots --------------------------------------------------

    def _emit_telemetry(self) -> None:
        w = self.world
        frame = TelemetryFrame(
            seq_echo=self.receiver.latest_seq or 0,
            positions=tuple(
                quantize_position(j.position % (2 * math.pi), self.cfg.act)
                for j in w.joints
            ),
            currents_ma=tuple(
                min(0xFFFF, round(j.current * 1000.0)) for j in w.joints
            ),
            battery_mv=round(self.cfg.bus_voltage * 1000.0),
            battery_pct=round(self._battery_fraction() * 100.0),
        )
        self.tlm_channel.submit(encode_telemetry(frame), self.tick_index)
        for data in self.tlm_channel.poll(self.tick_index):
            self.last_telemetry = decode_telemetry(data)

    def _battery_fraction(self) -> float:
        capacity_as = self.cfg.battery_capacity_ah * 3600.0
        return max(0.0, 1.0 - self.world.charge / capacity_as)

    def _rolling_cot(self) -> float | None:
        w = self.world
        window = self._cot_window
        window.append((w.t, w.x, w.y, w.charge))
        while window and w.t - window[0][0] > COT_WINDOW_S:
            window.popleft()
        t0, x0, y0, q0 = window[0]
        span = w.t - t0
        if span < 0.5:
            return None
        v_bar = math.hypot(w.x - x0, w.y - y0) / span
        if v_bar < 1e-6:
            return None
        i_bar = (w.charge - q0) / span
        return self.cfg.bus_voltage * i_bar / (self.cfg.total_mass * G * v_bar)

    def _snapshot(self, prev: WorldState) -> StateUpdate:
        w = self.world
        if self.last_telemetry is not None:
            battery_pct = float(self.last_telemetry.battery_pct)
        else:
            battery_pct = round(self._battery_fraction() * 100.0)
        stats = LinkStats(
            sent=self.cmd_channel.submitted,
            delivered=self.cmd_channel.delivered,
            dropped=self.cmd_channel.dropped,
            applied=self.receiver.applied,
            rejected_stale=self.receiver.rejected_stale,
            state_dropped=self.state_dropped,
        )
        return StateUpdate(
            t=w.t,
            pose=(w.x, w.y, w.yaw),
            body_height=w.body_height,
            joints=tuple(j.position for j in w.joints),
            currents=tuple(j.current for j in w.joints),
            speed=math.hypot(w.x - prev.x, w.y - prev.y) / DT,
            cot=self._rolling_cot(),
            battery_pct=battery_pct,
            battery_voltage=self.cfg.bus_voltage,
            link=stats,
            mode=self.command.mode.value,
            gait=self.command.gait.value,
        )
