"""Client-side pipeline: frame in, command out, looping capture to send.

Each frame runs FILTER (contrast threshold), DETECT (circle votes +
fingertip pick), CENTER (hand center + displacement), FUZZY (controller
step) and SEND (emit the wire command), then loops back to CAPTURE.
Losing track of the fingertips degrades to a zero displacement for that
frame; a degenerate (uniform or undersized) frame is skipped entirely.
"""

from __future__ import annotations

import enum
import logging
import socket
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Optional

from . import wire
from .frameio import GrayFrame, MIN_PIPELINE_SIZE
from .fuzzy import ControllerState, RuleBase, step_controller
from .vision import (
    Displacement,
    HandCenter,
    TrackingLostError,
    UniformFrameError,
    DEFAULT_R_MAX,
    DEFAULT_R_MIN,
    displacement,
    hand_center,
    hough_circles,
    normalize_and_threshold,
    select_fingertips,
)

logger = logging.getLogger(__name__)


class Phase(enum.Enum):
    INIT = "init"
    CAPTURE = "capture"
    FILTER = "filter"
    DETECT = "detect"
    CENTER = "center"
    FUZZY = "fuzzy"
    SEND = "send"


class StepStatus(enum.Enum):
    OK = "ok"
    TRACKING_LOST = "tracking-lost"
    SKIPPED_DEGENERATE = "skipped-degenerate"
    SKIPPED_SMALL = "skipped-small"


@dataclass
class PipelineConfig:
    r_min: int = DEFAULT_R_MIN
    r_max: int = DEFAULT_R_MAX
    rules: Optional[tuple[RuleBase, RuleBase]] = None


@dataclass
class ClientFsmState:
    """Per-client pipeline state; one instance per connection, never shared."""

    phase: Phase = Phase.INIT
    prev_center: Optional[HandCenter] = None
    controller: ControllerState = field(default_factory=ControllerState)
    seq: int = 1  # next command number
    frame_count: int = 0
    skipped_frames: int = 0
    tracking_losses: int = 0


class StepResult(NamedTuple):
    fsm: ClientFsmState
    cmd: Optional[wire.Cmd]
    center: Optional[HandCenter]
    disp: Optional[Displacement]
    status: StepStatus


def client_step(
    fsm: ClientFsmState,
    frame: GrayFrame,
    config: Optional[PipelineConfig] = None,
) -> StepResult:
    """Run one frame through the pipeline; returns the new state and command.

    The input state is left untouched.  A skipped frame produces no
    command; a tracking-lost frame produces a command for zero displacement
    (angles hold except for Z smoothing).
    """
    cfg = config or PipelineConfig()
    new = replace(
        fsm,
        controller=fsm.controller.copy(),
        frame_count=fsm.frame_count + 1,
    )
    frame_seq = new.frame_count

    if frame.width < MIN_PIPELINE_SIZE or frame.height < MIN_PIPELINE_SIZE:
        new.skipped_frames += 1
        new.phase = Phase.CAPTURE
        return StepResult(new, None, None, None, StepStatus.SKIPPED_SMALL)

    new.phase = Phase.FILTER
    try:
        binary = normalize_and_threshold(frame)
    except UniformFrameError:
        new.skipped_frames += 1
        new.phase = Phase.CAPTURE
        return StepResult(new, None, None, None, StepStatus.SKIPPED_DEGENERATE)

    new.phase = Phase.DETECT
    status = StepStatus.OK
    center: Optional[HandCenter] = None
    try:
        tips = select_fingertips(hough_circles(binary, cfg.r_min, cfg.r_max))
    except TrackingLostError:
        new.tracking_losses += 1
        status = StepStatus.TRACKING_LOST
        disp = Displacement(0.0, 0.0, 0.0)
    else:
        new.phase = Phase.CENTER
        center = hand_center(tips, frame_seq)
        disp = displacement(new.prev_center, center)
        new.prev_center = center

    new.phase = Phase.FUZZY
    cmd_out, new.controller = step_controller(
        disp, new.controller, rules=cfg.rules, seq=new.seq
    )

    new.phase = Phase.SEND
    msg = wire.Cmd(cmd_out.seq, cmd_out.x, cmd_out.y, cmd_out.z)
    new.seq += 1
    new.phase = Phase.CAPTURE
    return StepResult(new, msg, center, disp, status)


class TeleopClient:
    """Blocking TCP client for the line protocol."""

    def __init__(self, host: str, port: int, client_id: str = "client", timeout: float = 10.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._rfile = self._sock.makefile("rb")
        self.client_id = client_id
        self.session: Optional[str] = None

    def hello(self) -> str:
        reply = self.request(wire.Hello(self.client_id))
        if not isinstance(reply, wire.Welcome):
            raise ConnectionError(f"handshake failed: {reply}")
        self.session = reply.session
        return reply.session

    def request(self, msg: wire.WireMessage) -> wire.WireMessage:
        self._sock.sendall(wire.encode_wire(msg))
        line = self._rfile.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return wire.decode_wire(line)

    def send_command(self, seq: int, x: int, y: int, z: int) -> wire.WireMessage:
        return self.request(wire.Cmd(seq, x, y, z))

    def query_state(self) -> wire.State:
        reply = self.request(wire.StateQuery())
        if not isinstance(reply, wire.State):
            raise ConnectionError(f"expected STATE, got {reply}")
        return reply

    def close(self) -> None:
        try:
            self._rfile.close()
        finally:
            self._sock.close()

    def __enter__(self) -> "TeleopClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def run_client(
    host: str,
    port: int,
    frames: Iterable[GrayFrame],
    client_id: str = "client",
    config: Optional[PipelineConfig] = None,
    fps: Optional[float] = None,
) -> list[wire.WireMessage]:
    """Stream frames through the pipeline to a server; returns the replies."""
    replies: list[wire.WireMessage] = []
    with TeleopClient(host, port, client_id) as client:
        client.hello()
        fsm = ClientFsmState(phase=Phase.CAPTURE)
        for frame in frames:
            started = time.monotonic()
            fsm, cmd, _center, _disp, status = client_step(fsm, frame, config)
            if cmd is None:
                logger.info("frame %d skipped (%s)", fsm.frame_count, status.value)
            else:
                replies.append(client.request(cmd))
            if fps:
                budget = 1.0 / fps - (time.monotonic() - started)
                if budget > 0:
                    time.sleep(budget)
    return replies
