"""Command/telemetry frame codec and a simulated lossy datagram channel.

Wire layouts (all integers little-endian, CRC-16/CCITT-FALSE over every
byte preceding the crc field):

Command frame, 23 bytes, host -> robot at 200 Hz:

    offset  size  field
    0       1     magic = 0xA8
    1       1     version = 0x01
    2       2     seq (u16, wrapping)
    4       1     mode (0 = torque off, 1 = hold, 2 = stream)
    5       16    positions, 8 x u16 encoder ticks (12-bit range 0..4095)
    21      2     crc

Telemetry frame, 41 bytes, robot -> host:

    offset  size  field
    0       1     magic = 0xA9
    1       1     version = 0x01
    2       2     seq_echo (u16)
    4       16    positions, 8 x u16 ticks
    20      16    currents, 8 x u16 milliamps
    36      2     battery_mv (u16)
    38      1     battery_pct (u8, 0..100)
    39      2     crc

Timing is counted in integer virtual ticks throughout so every test is
deterministic. The receiver applies latest-wins semantics: a frame is
accepted only if its sequence number is newer under the wrapping window
(incoming - latest) mod 2^16 in [1, 2^15); stale or duplicate frames are
counted and dropped, and the last accepted positions are held across
losses.
"""

from __future__ import annotations

import heapq
import random
import struct
from dataclasses import dataclass, field
from enum import IntEnum

from .actuator import ActuatorParams, dequantize_position, quantize_position
from .errors import BadCrc, BadField, BadLength, BadMagic, BadVersion

COMMAND_MAGIC = 0xA8
TELEMETRY_MAGIC = 0xA9
PROTOCOL_VERSION = 0x01
COMMAND_LEN = 23
TELEMETRY_LEN = 41
POSITION_MAX = 4095
SEQ_MOD = 1 << 16
SEQ_HALF = 1 << 15

_CMD_STRUCT = struct.Struct("<BBHB8H")
_TLM_STRUCT = struct.Struct("<BBH8H8HHB")


class Mode(IntEnum):
    TORQUE_OFF = 0
    HOLD = 1
    STREAM = 2


def _crc_table():
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
        table.append(crc)
    return tuple(table)


_CRC_TABLE = _crc_table()


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout.
    Check value: crc16_ccitt_false(b"123456789") == 0x29B1."""
    crc = 0xFFFF
    for byte in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ byte]
    return crc


@dataclass(frozen=True)
class CommandFrame:
    seq: int
    mode: Mode
    positions: tuple

    def __post_init__(self):
        if not 0 <= self.seq < SEQ_MOD:
            raise ValueError("seq must be a u16")
        if len(self.positions) != 8:
            raise ValueError("exactly 8 joint positions required")
        if any(not 0 <= p <= POSITION_MAX for p in self.positions):
            raise ValueError(f"positions must be in [0, {POSITION_MAX}]")


@dataclass(frozen=True)
class TelemetryFrame:
    seq_echo: int
    positions: tuple
    currents_ma: tuple
    battery_mv: int
    battery_pct: int

    def __post_init__(self):
        if not 0 <= self.seq_echo < SEQ_MOD:
            raise ValueError("seq_echo must be a u16")
        if len(self.positions) != 8 or len(self.currents_ma) != 8:
            raise ValueError("8 positions and 8 currents required")
        if any(not 0 <= p <= POSITION_MAX for p in self.positions):
            raise ValueError(f"positions must be in [0, {POSITION_MAX}]")
        if any(not 0 <= c <= 0xFFFF for c in self.currents_ma):
            raise ValueError("currents must be u16 milliamps")
        if not 0 <= self.battery_mv <= 0xFFFF:
            raise ValueError("battery_mv must be a u16")
        if not 0 <= self.battery_pct <= 100:
            raise ValueError("battery_pct must be in [0, 100]")


def encode_command(f: CommandFrame) -> bytes:
    body = _CMD_STRUCT.pack(
        COMMAND_MAGIC, PROTOCOL_VERSION, f.seq, int(f.mode), *f.positions
    )
    return body + struct.pack("<H", crc16_ccitt_false(body))


def decode_command(data: bytes) -> CommandFrame:
    """Strict decode: rejects anything encode_command cannot produce."""
    if len(data) != COMMAND_LEN:
        raise BadLength(f"expected {COMMAND_LEN} bytes, got {len(data)}")
    if data[0] != COMMAND_MAGIC:
        raise BadMagic(f"magic 0x{data[0]:02X}")
    if data[1] != PROTOCOL_VERSION:
        raise BadVersion(f"version 0x{data[1]:02X}")
    (crc,) = struct.unpack_from("<H", data, COMMAND_LEN - 2)
    if crc != crc16_ccitt_false(data[:-2]):
        raise BadCrc("command frame checksum mismatch")
    _, _, seq, mode, *positions = _CMD_STRUCT.unpack_from(data)
    if mode not in (0, 1, 2):
        raise BadField(f"mode {mode}")
    if any(p > POSITION_MAX for p in positions):
        raise BadField("position tick above 12-bit range")
    return CommandFrame(seq, Mode(mode), tuple(positions))


def encode_telemetry(f: TelemetryFrame) -> bytes:
    body = _TLM_STRUCT.pack(
        TELEMETRY_MAGIC,
        PROTOCOL_VERSION,
        f.seq_echo,
        *f.positions,
        *f.currents_ma,
        f.battery_mv,
        f.battery_pct,
    )
    return body + struct.pack("<H", crc16_ccitt_false(body))


def decode_telemetry(data: bytes) -> TelemetryFrame:
    if len(data) != TELEMETRY_LEN:
        raise BadLength(f"expected {TELEMETRY_LEN} bytes, got {len(data)}")
    if data[0] != TELEMETRY_MAGIC:
        raise BadMagic(f"magic 0x{data[0]:02X}")
    if data[1] != PROTOCOL_VERSION:
        raise BadVersion(f"version 0x{data[1]:02X}")
    (crc,) = struct.unpack_from("<H", data, TELEMETRY_LEN - 2)
    if crc != crc16_ccitt_false(data[:-2]):
        raise BadCrc("telemetry frame checksum mismatch")
    fields = _TLM_STRUCT.unpack_from(data)
    seq_echo = fields[2]
    positions = fields[3:11]
    currents = fields[11:19]
    battery_mv, battery_pct = fields[19], fields[20]
    if any(p > POSITION_MAX for p in positions):
        raise BadField("position tick above 12-bit range")
    if battery_pct > 100:
        raise BadField(f"battery_pct {battery_pct}")
    return TelemetryFrame(seq_echo, positions, currents, battery_mv, battery_pct)


def decode_any(data: bytes):
    """Decode either frame type by magic; length is checked per type."""
    if len(data) == 0:
        raise BadLength("empty datagram")
    if data[0] == COMMAND_MAGIC:
        return decode_command(data)
    if data[0] == TELEMETRY_MAGIC:
        return decode_telemetry(data)
    raise BadMagic(f"magic 0x{data[0]:02X}")


def seq_is_newer(incoming: int, latest: int) -> bool:
    """Wrapping-window comparison: newer iff (incoming - latest) mod 2^16
    lies in [1, 2^15)."""
    return 0 < (incoming - latest) % SEQ_MOD < SEQ_HALF


@dataclass(frozen=True)
class ChannelModel:
    """Lossy datagram link parameters; reproducible given the seed."""

    drop_prob: float = 0.0
    latency_ticks: int = 0
    jitter_ticks: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.drop_prob <= 1.0:
            raise ValueError("drop_prob must be in [0, 1]")
        if self.latency_ticks < 0 or self.jitter_ticks < 0:
            raise ValueError("latency and jitter must be >= 0")


class Channel:
    """Seeded lossy channel on a virtual tick clock.

    Each submitted datagram is independently dropped with drop_prob;
    survivors arrive latency_ticks plus a uniform 0..jitter_ticks later.
    Deliveries are ordered by (arrival tick, submission order), so jitter
    can invert the order of consecutive datagrams.
    """

    def __init__(self, model: ChannelModel):
        self.model = model
        self._rng = random.Random(model.seed)
        self._queue = []
        self._serial = 0
        self.submitted = 0
        self.dropped = 0
        self.delivered = 0

    def submit(self, payload: bytes, tick: int) -> None:
        self.submitted += 1
        if self._rng.random() < self.model.drop_prob:
            self.dropped += 1
            return
        jitter = self._rng.randint(0, self.model.jitter_ticks) if self.model.jitter_ticks else 0
        arrival = tick + self.model.latency_ticks + jitter
        heapq.heappush(self._queue, (arrival, self._serial, payload))
        self._serial += 1

    def poll(self, tick: int):
        """Datagrams whose arrival tick has passed, in delivery order."""
        out = []
        while self._queue and self._queue[0][0] <= tick:
            out.append(heapq.heappop(self._queue)[2])
        self.delivered += len(out)
        return out


def channel_step(channel: Channel, payloads, tick: int):
    """Submit this tick's datagrams and collect everything now deliverable."""
    for payload in payloads:
        channel.submit(payload, tick)
    return channel.poll(tick)


@dataclass
class Receiver:
    """Robot-side latest-wins command sink.

    Tracks the newest applied sequence number, holds the last accepted
    targets across losses, and counts every outcome. Applied sequence
    numbers are strictly increasing in the wrapping order.
    """

    params: ActuatorParams = field(default_factory=ActuatorParams)
    latest_seq: int | None = None
    mode: Mode = Mode.HOLD
    targets: tuple | None = None
    received: int = 0
    applied: int = 0
    rejected_stale: int = 0

    def apply(self, frame: CommandFrame) -> bool:
        """Accept a frame iff newer than the last applied one; returns the
        accept decision. Rejection is a counted outcome, not an error."""
        self.received += 1
        if self.latest_seq is not None and not seq_is_newer(frame.seq, self.latest_seq):
            self.rejected_stale += 1
            return False
        self.latest_seq = frame.seq
        self.applied += 1
        self.mode = frame.mode
        if frame.mode is Mode.STREAM:
            self.targets = tuple(
                dequantize_position(t, self.params) for t in frame.positions
            )
        return True


def stream_frames(schedule, params: ActuatorParams, start_seq: int = 0,
                  mode: Mode = Mode.STREAM):
    """Frame per schedule entry: seq increments by one (wrapping), positions
    quantized to encoder ticks. One entry is streamed per tick at the
    configured rate, so a 200-entry schedule covers one second at 200 Hz."""
    seq = start_seq % SEQ_MOD
    for angles in schedule:
        ticks = tuple(quantize_position(a, params) for a in angles)
        yield CommandFrame(seq, mode, ticks)
        seq = (seq + 1) % SEQ_MOD


def frame_to_hex(data: bytes) -> str:
    return data.hex(" ")
