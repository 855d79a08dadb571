"""Exception hierarchy. Every failure mode callers are expected to handle
has its own type; all inherit from MicroquadError."""


class MicroquadError(Exception):
    """Base class for all package errors."""


class UnreachableClosure(MicroquadError):
    """Knee points too far apart (or coincident) for the distal links to meet."""


class Unreachable(MicroquadError):
    """Requested foot point lies outside a motor's annular reach."""


class JointLimitError(MicroquadError):
    """Joint angle outside the geometry's configured limits."""


class SingularPose(MicroquadError):
    """Jacobian undefined: the two distal links are (anti)parallel at the foot."""


class UnreachableTrajectory(MicroquadError):
    """A gait trajectory sample failed inverse kinematics."""

    def __init__(self, leg: str, index: int, cause: Exception):
        super().__init__(f"leg {leg}, sample {index}: {cause}")
        self.leg = leg
        self.index = index
        self.cause = cause


class TorqueDisabled(MicroquadError):
    """Actuator stepped while torque is off; position holds and current is zero."""


class OutOfRange(MicroquadError):
    """Angle outside the quantizer's [0, 2*pi) domain."""


class GeometryMismatch(MicroquadError):
    """Workspace comparison requires identical link lengths."""


class ZeroVelocity(MicroquadError):
    """Cost of transport is undefined at (near-)zero steady-state velocity."""


class ConfigError(MicroquadError):
    """Malformed or unknown key in a configuration file."""


class SchemaError(MicroquadError):
    """Client message failed validation; carries the offending field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.reason = message


class FrameError(MicroquadError):
    """Base class for frame codec rejections."""


class BadLength(FrameError):
    pass


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class BadCrc(FrameError):
    pass


class BadField(FrameError):
    """Structurally valid frame whose field values the encoder could never emit."""
