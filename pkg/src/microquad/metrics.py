"""Locomotion performance metrics.

Cost of transport is electrical power over weight times speed,
COT = V*i / (m*g*v_ss), with the total transported mass (robot plus any
payload) in the denominator. Speed normalizes by body length, payload by
robot mass, and workload is their product.
"""

from __future__ import annotations

from .errors import ZeroVelocity

G = 9.81  # m/s^2

VELOCITY_EPS = 1e-9


def cost_of_transport(voltage: float, current: float, mass: float, v_ss: float) -> float:
    """COT = V*i/(m*g*v_ss); undefined (ZeroVelocity) for v_ss <= 1e-9."""
    if mass <= 0:
        raise ValueError("mass must be > 0")
    if v_ss <= VELOCITY_EPS:
        raise ZeroVelocity(f"v_ss={v_ss!r} too small for a defined COT")
    return voltage * current / (mass * G * v_ss)


def normalized_speed(v_ss: float, body_len: float) -> float:
    """Body lengths per second (1/s)."""
    if body_len <= 0:
        raise ValueError("body_len must be > 0")
    return v_ss / body_len


def normalized_payload(payload: float, robot_mass: float) -> float:
    """Payload mass over robot mass (dimensionless)."""
    if robot_mass <= 0:
        raise ValueError("robot_mass must be > 0")
    return payload / robot_mass


def normalized_workload(norm_speed: float, norm_payload: float) -> float:
    """Normalized speed times normalized payload."""
    return norm_speed * norm_payload


def endurance_projection(battery_capacity_ah: float, fraction_used: float,
                         duration_h: float) -> float:
    """Mean current (A) implied by using a fraction of capacity in a duration."""
    if duration_h <= 0:
        raise ValueError("duration must be > 0")
    return fraction_used * battery_capacity_ah / duration_h


def runtime_remaining(battery_capacity_ah: float, mean_current: float) -> float:
    """Hours of runtime for a capacity at a mean current draw."""
    if mean_current <= 0:
        raise ValueError("mean_current must be > 0")
    return battery_capacity_ah / mean_current
