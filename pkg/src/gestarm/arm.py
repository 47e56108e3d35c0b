"""Mark II arm simulator: joint state, forward kinematics, torque audit,
and the exact "(x,y,z)\\n" serial byte stream the servo controller consumes.

The arm is a planar two-link chain (shoulder + elbow) carried on a yawing
base.  Angle conventions: shoulder 0 = horizontal, 90 = straight up; elbow
90 = aligned with the lower arm; base 0 = along +x.  All lengths are cm,
masses kg, torques kg*cm (hobby-servo stall-torque units).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .fuzzy import ServoCommand


class FrameRejectedError(ValueError):
    """Syntactically valid serial frame with a degree value out of range.

    ``remaining`` holds the buffer tail after the rejected frame so stream
    consumers can continue past it.
    """

    def __init__(self, message: str, remaining: bytes = b""):
        super().__init__(message)
        self.remaining = remaining


class IncompleteFrameError(ValueError):
    """No complete serial frame in the buffer yet."""


SERIAL_BAUD = 9600
SERIAL_BITS_PER_BYTE = 10  # 8N1: start bit + 8 data + stop bit


@dataclass(frozen=True)
class ArmGeometry:
    """Link dimensions, masses and servo ratings of the desk arm."""

    base_height: float = 11.0
    lower_len: float = 40.0
    upper_len: float = 20.0
    claw_len: float = 6.0
    lower_mass: float = 0.18
    upper_mass: float = 0.11
    claw_mass: float = 0.02
    main_servo_rating: float = 15.0
    grip_servo_rating: float = 1.0

    def __post_init__(self):
        for name in (
            "base_height",
            "lower_len",
            "upper_len",
            "claw_len",
            "lower_mass",
            "upper_mass",
            "claw_mass",
            "main_servo_rating",
            "grip_servo_rating",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class ArmState:
    """Driven joint angles, degrees in [0, 180]."""

    theta_base: float = 90.0
    theta_shoulder: float = 90.0
    theta_elbow: float = 90.0

    def __post_init__(self):
        for name in ("theta_base", "theta_shoulder", "theta_elbow"):
            v = getattr(self, name)
            if not 0.0 <= v <= 180.0:
                raise ValueError(f"{name}={v} outside [0, 180]")


class SerialFrame(NamedTuple):
    payload: bytes


class JointTorques(NamedTuple):
    shoulder: float
    elbow: float
    shoulder_overload: bool
    elbow_overload: bool

    def flags(self) -> frozenset[str]:
        out = set()
        if self.shoulder_overload:
            out.add("shoulder")
        if self.elbow_overload:
            out.add("elbow")
        return frozenset(out)


def _cos_deg(deg: float) -> float:
    d = deg % 360.0
    if d == 0.0:
        return 1.0
    if d == 90.0 or d == 270.0:
        return 0.0
    if d == 180.0:
        return -1.0
    return math.cos(math.radians(deg))


def _sin_deg(deg: float) -> float:
    d = deg % 360.0
    if d == 0.0 or d == 180.0:
        return 0.0
    if d == 90.0:
        return 1.0
    if d == 270.0:
        return -1.0
    return math.sin(math.radians(deg))


def apply_command(state: ArmState, cmd: ServoCommand) -> ArmState:
    """Absolute positioning: x drives base yaw, y shoulder, z elbow."""
    clamp = lambda v: min(180.0, max(0.0, float(v)))
    return ArmState(clamp(cmd.x), clamp(cmd.y), clamp(cmd.z))


def forward_kinematics(state: ArmState, g: ArmGeometry) -> tuple[float, float, float]:
    """End-effector position (x, y, z) in cm.

    The shoulder elevates the lower arm from horizontal; the elbow bends
    the upper arm + claw relative to the lower-arm extension; the base
    rotates the whole plane about the vertical axis.
    """
    el_s = state.theta_shoulder
    el_e = state.theta_elbow - 90.0
    tip = g.upper_len + g.claw_len
    reach = g.lower_len * _cos_deg(el_s) + tip * _cos_deg(el_s + el_e)
    height = g.base_height + g.lower_len * _sin_deg(el_s) + tip * _sin_deg(el_s + el_e)
    return (
        reach * _cos_deg(state.theta_base),
        reach * _sin_deg(state.theta_base),
        height,
    )


def static_torque(state: ArmState, g: ArmGeometry, payload_kg: float = 0.0) -> JointTorques:
    """Holding torque per joint with link masses at their midpoints.

    Each link (and the payload at the claw tip) loads a joint by its mass
    times the horizontal lever arm from that joint's axis; lever arms are
    taken unsigned, so the audit is a worst-case bound that can only grow
    with payload.  Overload flags compare against the main servo rating.
    """
    if payload_kg < 0:
        raise ValueError("payload_kg must be >= 0")
    el_s = state.theta_shoulder
    el_e = state.theta_elbow - 90.0
    cos_lower = _cos_deg(el_s)
    cos_upper = _cos_deg(el_s + el_e)

    lower_com = abs(g.lower_len / 2.0 * cos_lower)
    upper_com_from_shoulder = abs(g.lower_len * cos_lower + g.upper_len / 2.0 * cos_upper)
    claw_com_from_shoulder = abs(
        g.lower_len * cos_lower + (g.upper_len + g.claw_len / 2.0) * cos_upper
    )
    tip_from_shoulder = abs(g.lower_len * cos_lower + (g.upper_len + g.claw_len) * cos_upper)
    shoulder = (
        g.lower_mass * lower_com
        + g.upper_mass * upper_com_from_shoulder
        + g.claw_mass * claw_com_from_shoulder
        + payload_kg * tip_from_shoulder
    )

    upper_com_from_elbow = abs(g.upper_len / 2.0 * cos_upper)
    claw_com_from_elbow = abs((g.upper_len + g.claw_len / 2.0) * cos_upper)
    tip_from_elbow = abs((g.upper_len + g.claw_len) * cos_upper)
    elbow = (
        g.upper_mass * upper_com_from_elbow
        + g.claw_mass * claw_com_from_elbow
        + payload_kg * tip_from_elbow
    )

    return JointTorques(
        shoulder,
        elbow,
        shoulder > g.main_servo_rating,
        elbow > g.main_servo_rating,
    )


def encode_serial(cmd: ServoCommand) -> SerialFrame:
    """ASCII "(x,y,z)\\n" with decimal integers and no padding."""
    for v in (cmd.x, cmd.y, cmd.z):
        if not 0 <= v <= 180:
            raise ValueError(f"degree {v} outside [0, 180]")
    return SerialFrame(f"({cmd.x},{cmd.y},{cmd.z})\n".encode("ascii"))


def decode_serial(data: bytes) -> tuple[ServoCommand, bytes]:
    """Scan for the next well-formed frame; return it and the unread tail.

    Malformed bytes are skipped (resync at the next "(").  A frame that
    parses but carries a value outside [0, 180] raises
    :class:`FrameRejectedError`; a buffer with no complete frame raises
    :class:`IncompleteFrameError`.
    """
    pos = 0
    while True:
        start = data.find(b"(", pos)
        if start < 0:
            raise IncompleteFrameError("no serial frame in buffer")
        lf = data.find(b"\n", start + 1)
        if lf < 0:
            raise IncompleteFrameError("unterminated serial frame")
        if data[lf - 1 : lf] == b")":
            parts = data[start + 1 : lf - 1].split(b",")
            if len(parts) == 3 and all(p.isdigit() for p in parts):
                x, y, z = (int(p) for p in parts)
                if x > 180 or y > 180 or z > 180:
                    raise FrameRejectedError(
                        f"degrees out of range in {data[start : lf + 1]!r}",
                        remaining=data[lf + 1 :],
                    )
                return ServoCommand(x, y, z), data[lf + 1 :]
        pos = start + 1


def pacing_delay(frame: SerialFrame) -> float:
    """Seconds a 9600 bps 8N1 link takes to shift this frame out."""
    return len(frame.payload) * SERIAL_BITS_PER_BYTE / SERIAL_BAUD


def iter_serial_commands(data: bytes):
    """Yield every decodable command in a byte stream, resyncing as needed.

    Range-rejected frames are skipped (they would be dropped by the servo
    controller); iteration stops when no complete frame remains.
    """
    while True:
        try:
            cmd, data = decode_serial(data)
        except IncompleteFrameError:
            return
        except FrameRejectedError as exc:
            data = exc.remaining
            continue
        yield cmd
