"""Discrete-time smart-servo model.

Position tracking is a rate-limited proportional law: commanded velocity
kp * error saturates at the speed limit and the step never overshoots the
target. The speed limit follows the linear torque-speed line of a DC
servo: under load the achievable speed derates from max_speed toward zero
at stall torque, with viscous gear friction folded into the same balance
(solved in closed form, v_lim = max_speed * (stall - load) / (stall +
max_speed * viscous)). That derating is what caps trotting speed once gait
frequency outruns the loaded actuator.

The torque the motor bears is the external load plus viscous and
reflected-inertia terms for the motion it actually performs, clamped at
stall; current is affine in that torque magnitude, so current grows with
payload and with gait speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import OutOfRange, TorqueDisabled

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ActuatorParams:
    """Servo characteristics.

    max_speed, stall_torque and gear_ratio follow the published figures for
    the actuator class being modeled; idle_current, torque_current_coeff,
    viscous_friction and reflected_inertia are calibration knobs of this
    model, not measured ground truth.
    """

    max_speed: float = 48.0            # rad/s
    stall_torque: float = 0.23         # N*m
    gear_ratio: float = 77.0
    idle_current: float = 0.05         # A
    torque_current_coeff: float = 2.0  # A/(N*m)
    position_resolution: int = 4096    # ticks/rev
    kp: float = 256.0                  # 1/s, tracking gain
    viscous_friction: float = 0.012    # N*m*s/rad
    reflected_inertia: float = 5e-5    # kg*m^2 at the output shaft

    def __post_init__(self):
        if self.max_speed <= 0:
            raise ValueError("max_speed must be > 0")
        if self.stall_torque <= 0:
            raise ValueError("stall_torque must be > 0")
        if self.position_resolution < 2:
            raise ValueError("position_resolution must be >= 2")


@dataclass(frozen=True)
class ActuatorState:
    position: float
    target: float
    velocity: float = 0.0
    applied_torque: float = 0.0
    current: float = 0.0
    torque_enabled: bool = True


def speed_limit(p: ActuatorParams, load_torque: float = 0.0) -> float:
    """Achievable speed under an external load torque magnitude.

    Solves the torque-speed line v = max_speed * (1 - (load + b*v)/stall)
    for v; equals max_speed only for a frictionless unloaded motor.
    """
    load = min(abs(load_torque), p.stall_torque)
    return (
        p.max_speed
        * (p.stall_torque - load)
        / (p.stall_torque + p.max_speed * p.viscous_friction)
    )


def torque_available(p: ActuatorParams, speed: float) -> float:
    """Torque headroom at a given output speed on the same torque-speed
    line: stall at standstill, zero at the no-load speed."""
    avail = (
        p.stall_torque * (1.0 - abs(speed) / p.max_speed)
        - p.viscous_friction * abs(speed)
    )
    return max(0.0, avail)


def tracking_velocity(
    s: ActuatorState, p: ActuatorParams, dt: float, load_torque: float = 0.0
) -> float:
    """Velocity the tracking law will realize this step (after the loaded
    speed limit and the no-overshoot snap)."""
    err = s.target - s.position
    v_lim = speed_limit(p, load_torque)
    v = max(-v_lim, min(v_lim, p.kp * err))
    if abs(v) * dt > abs(err):
        v = err / dt
    return v


def step_actuator(
    s: ActuatorState, p: ActuatorParams, dt: float, load_torque: float = 0.0
) -> ActuatorState:
    """Advance one control period under the given external load torque
    magnitude.

    Raises TorqueDisabled when stepping a disabled actuator; callers that
    model a torque-off mode hold position and report zero current instead.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if not s.torque_enabled:
        raise TorqueDisabled("actuator torque is off")
    v = tracking_velocity(s, p, dt, load_torque)
    borne = (
        load_torque
        + p.viscous_friction * abs(v)
        + p.reflected_inertia * abs(v - s.velocity) / dt
    )
    torque = max(-p.stall_torque, min(p.stall_torque, borne))
    new = replace(
        s,
        position=s.position + v * dt,
        velocity=v,
        applied_torque=torque,
    )
    return replace(new, current=current_draw(new, p))


def current_draw(s: ActuatorState, p: ActuatorParams) -> float:
    """Idle floor plus a torque-proportional term; zero with torque off."""
    if not s.torque_enabled:
        return 0.0
    return p.idle_current + p.torque_current_coeff * abs(s.applied_torque)


def quantize_position(angle: float, p: ActuatorParams) -> int:
    """Encoder tick for an angle in [0, 2*pi)."""
    if not 0.0 <= angle < TWO_PI:
        raise OutOfRange(f"angle {angle!r} outside [0, 2*pi)")
    tick = math.floor(angle / TWO_PI * p.position_resolution)
    return min(tick, p.position_resolution - 1)


def dequantize_position(tick: int, p: ActuatorParams) -> float:
    """Angle at the tick's cell floor; round trip error < one tick quantum."""
    if not 0 <= tick < p.position_resolution:
        raise OutOfRange(f"tick {tick!r} outside [0, {p.position_resolution})")
    return tick * TWO_PI / p.position_resolution
