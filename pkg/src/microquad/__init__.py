"""Desk-scale software twin of a miniature five-bar-legged quadruped."""

from .actuator import (
    ActuatorParams,
    ActuatorState,
    current_draw,
    dequantize_position,
    quantize_position,
    step_actuator,
)
from .gait import (
    FootTrajectory,
    GaitParams,
    GaitType,
    LegPhaseMap,
    build_stride_trajectory,
    foot_point_at_phase,
    gait_joint_schedule,
    leg_phase_offsets,
    turning_adjust,
)
from .geometry import (
    ElbowConfig,
    FootPoint,
    JointPair,
    LegGeometry,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
    manipulability,
    occupancy_area,
    workspace_area_compare,
    workspace_sample,
)
from .link import (
    Channel,
    ChannelModel,
    CommandFrame,
    Mode,
    Receiver,
    TelemetryFrame,
    crc16_ccitt_false,
    decode_command,
    decode_telemetry,
    encode_command,
    encode_telemetry,
    seq_is_newer,
    stream_frames,
)
from .metrics import (
    cost_of_transport,
    endurance_projection,
    normalized_payload,
    normalized_speed,
    normalized_workload,
    runtime_remaining,
)
from .simulator import (
    EpisodeReport,
    JumpReport,
    RobotConfig,
    WorldState,
    jump_episode,
    run_episode,
    standing_state,
    step_world,
)
from .teleop import (
    SessionMode,
    StateUpdate,
    TeleopCommand,
    TeleopSession,
    command_ingest,
)

__version__ = "0.1.0"
