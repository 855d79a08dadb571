"""Key-value configuration files.

Format: one `key = value` per line, `#` comments, blank lines ignored.
Units are meters, radians, kilograms, volts and amp-hours. Recognized keys
(all optional, defaults apply):

    leg.motor_spacing   leg.proximal_len   leg.distal_len
    leg.joint_min       leg.joint_max      leg.elbow (knees_outward|knees_inward)
    actuator.max_speed  actuator.stall_torque  actuator.gear_ratio
    actuator.idle_current  actuator.torque_current_coeff
    actuator.position_resolution  actuator.kp
    actuator.viscous_friction  actuator.reflected_inertia
    robot.body_len      robot.track_width  robot.mass  robot.payload
    robot.bus_voltage   robot.battery_capacity_ah
    gait.stride_len     gait.frequency     gait.duty
    gait.lift_amp       gait.ground_amp    gait.stand_height
    gait.gait (walk|trot|bound|pronk)      gait.turn
"""

from __future__ import annotations

from dataclasses import fields as dataclass_fields

from .actuator import ActuatorParams
from .errors import ConfigError
from .gait import GaitParams, GaitType
from .geometry import ElbowConfig, LegGeometry
from .simulator import RobotConfig

_LEG_KEYS = {f.name for f in dataclass_fields(LegGeometry)} - {"elbow"}
_ACT_KEYS = {f.name for f in dataclass_fields(ActuatorParams)}
_ROBOT_KEYS = {"body_len", "track_width", "mass", "payload", "bus_voltage",
               "battery_capacity_ah"}
_GAIT_KEYS = {f.name for f in dataclass_fields(GaitParams)} - {"gait"}


def parse_kv(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _take(kv: dict, prefix: str, known: set, enum_keys=()) -> dict:
    picked = {}
    for key in list(kv):
        if not key.startswith(prefix + "."):
            continue
        name = key[len(prefix) + 1:]
        raw = kv.pop(key)
        if name in enum_keys:
            picked[name] = raw
            continue
        if name not in known:
            raise ConfigError(f"unknown key {key!r}")
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: not a number: {raw!r}") from exc
        if name == "position_resolution":
            value = int(value)
        picked[name] = value
    return picked


def load_config_text(text: str) -> tuple[RobotConfig, GaitParams]:
    """Parse a config file body into (RobotConfig, GaitParams)."""
    kv = parse_kv(text)

    leg_kv = _take(kv, "leg", _LEG_KEYS, enum_keys=("elbow",))
    if "elbow" in leg_kv:
        try:
            leg_kv["elbow"] = ElbowConfig(leg_kv["elbow"])
        except ValueError as exc:
            raise ConfigError(
                f"leg.elbow: expected one of {[e.value for e in ElbowConfig]}"
            ) from exc
    act_kv = _take(kv, "actuator", _ACT_KEYS)
    robot_kv = _take(kv, "robot", _ROBOT_KEYS)
    gait_kv = _take(kv, "gait", _GAIT_KEYS, enum_keys=("gait",))
    if "gait" in gait_kv:
        try:
            gait_kv["gait"] = GaitType(gait_kv["gait"])
        except ValueError as exc:
            raise ConfigError(
                f"gait.gait: expected one of {[g.value for g in GaitType]}"
            ) from exc
    if kv:
        raise ConfigError(f"unknown keys: {sorted(kv)}")

    try:
        geom = LegGeometry(**leg_kv)
        act = ActuatorParams(**act_kv)
        cfg = RobotConfig(geom=geom, act=act, **robot_kv)
        gait = GaitParams(**gait_kv)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, gait


def load_config(path: str) -> tuple[RobotConfig, GaitParams]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config_text(fh.read())


def config_as_dict(cfg: RobotConfig, gait: GaitParams) -> dict:
    """Effective parameters, flattened with the file's key names."""
    out = {}
    for name in sorted(_LEG_KEYS):
        out[f"leg.{name}"] = getattr(cfg.geom, name)
    out["leg.elbow"] = cfg.geom.elbow.value
    for name in sorted(_ACT_KEYS):
        out[f"actuator.{name}"] = getattr(cfg.act, name)
    for name in sorted(_ROBOT_KEYS):
        out[f"robot.{name}"] = getattr(cfg, name)
    for name in sorted(_GAIT_KEYS):
        out[f"gait.{name}"] = getattr(gait, name)
    out["gait.gait"] = gait.gait.value
    return out
