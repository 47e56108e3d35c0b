"""Arm service and network front-ends.

One process owns one arm.  All mutations (from any TCP client or from the
dashboard gateway) funnel through :class:`ArmService.apply`, which holds a
lock, applies the command, appends it to the command log and the serial
sink, and wakes the gateway broadcaster.  The TCP server is thread-per-
connection; the gateway speaks WebSocket text messages and throttles state
pushes.
"""

from __future__ import annotations

import logging
import queue
import secrets
import socket
import socketserver
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import ws
from .arm import ArmGeometry, ArmState, apply_command, encode_serial, forward_kinematics, pacing_delay, static_torque
from .fuzzy import ControllerState, RuleBase, ServoCommand, step_controller
from .vision import Displacement
from .wire import (
    Ack,
    Cmd,
    Error,
    Hello,
    State,
    StateQuery,
    Welcome,
    WireDecodeError,
    E_EXPIRED,
    E_MALFORMED,
    E_NO_SESSION,
    E_STALE_SEQ,
    decode_wire,
    encode_wire,
)

logger = logging.getLogger(__name__)

DEFAULT_IDLE_TIMEOUT = 30.0
DEFAULT_STATE_RATE = 30.0


class SerialSink:
    """Appends encoded serial frames to a file, in command order.

    Writes happen on a dedicated thread so optional 9600 bps pacing never
    stalls command handling.
    """

    def __init__(self, path: Path | str, pace: bool = False):
        self._file = open(path, "ab")
        self._pace = pace
        self._queue: queue.Queue = queue.Queue()
        self._thread = threading.Thread(target=self._run, name="serial-sink", daemon=True)
        self._thread.start()

    def write(self, cmd: ServoCommand) -> None:
        self._queue.put(encode_serial(cmd))

    def _run(self) -> None:
        while True:
            frame = self._queue.get()
            if frame is None:
                break
            self._file.write(frame.payload)
            self._file.flush()
            if self._pace:
                time.sleep(pacing_delay(frame))

    def close(self) -> None:
        self._queue.put(None)
        self._thread.join(timeout=5.0)
        self._file.close()


class ArmService:
    """Owns the single shared arm and serializes every mutation."""

    def __init__(
        self,
        geometry: Optional[ArmGeometry] = None,
        serial_sink: Optional[SerialSink] = None,
    ):
        self.geometry = geometry or ArmGeometry()
        self._state = ArmState()
        self._lock = threading.Lock()
        self._log: list[ServoCommand] = []
        self._sink = serial_sink
        self._listeners: list[Callable[[State], None]] = []
        self._grip_closed = False

    def apply(self, cmd: ServoCommand) -> State:
        """Apply one command in arrival order; returns the state snapshot."""
        with self._lock:
            self._state = apply_command(self._state, cmd)
            self._log.append(cmd)
            if self._sink is not None:
                self._sink.write(cmd)
            snap = self._snapshot_locked()
        for listener in list(self._listeners):
            listener(snap)
        return snap

    def snapshot(self) -> State:
        with self._lock:
            return self._snapshot_locked()

    @property
    def state(self) -> ArmState:
        with self._lock:
            return self._state

    def _snapshot_locked(self) -> State:
        fk = forward_kinematics(self._state, self.geometry)
        torques = static_torque(self._state, self.geometry)
        return State(
            round(self._state.theta_base),
            round(self._state.theta_shoulder),
            round(self._state.theta_elbow),
            fk[0],
            fk[1],
            fk[2],
            torques.flags(),
        )

    def command_log(self) -> list[ServoCommand]:
        with self._lock:
            return list(self._log)

    def add_listener(self, fn: Callable[[State], None]) -> None:
        self._listeners.append(fn)

    def set_grip(self, closed: bool) -> None:
        with self._lock:
            self._grip_closed = closed

    @property
    def grip_closed(self) -> bool:
        return self._grip_closed


@dataclass
class _Session:
    token: str
    client_id: str
    last_seq: int = 0
    last_active: float = field(default_factory=time.monotonic)


class TeleopServer:
    """Line-protocol TCP server; any number of clients drive the one arm."""

    def __init__(
        self,
        host: str,
        port: int,
        arm: ArmService,
        idle_timeout: float = DEFAULT_IDLE_TIMEOUT,
    ):
        self.arm = arm
        self.idle_timeout = idle_timeout
        self._sessions: dict[str, _Session] = {}
        self._sessions_lock = threading.Lock()
        outer = self

        class Handler(socketserver.StreamRequestHandler):
            def handle(self) -> None:
                self.connection.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
                session: Optional[_Session] = None
                peer = self.client_address
                logger.debug("client %s connected", peer)
                try:
                    for raw in self.rfile:
                        reply = outer._handle_line(raw, session)
                        if isinstance(reply, tuple):
                            reply, session = reply
                        if reply is not None:
                            self.wfile.write(encode_wire(reply))
                            self.wfile.flush()
                except (ConnectionError, OSError):
                    pass
                finally:
                    if session is not None:
                        outer._drop_session(session.token)
                    logger.debug("client %s disconnected", peer)

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), Handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, name="teleop-server", daemon=True
        )

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def start(self) -> "TeleopServer":
        self._thread.start()
        logger.info("teleop server listening on %s:%d", *self.address)
        return self

    def shutdown(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    # -- protocol handling ---------------------------------------------

    def _handle_line(self, raw: bytes, session: Optional[_Session]):
        try:
            msg = decode_wire(raw)
        except WireDecodeError as exc:
            return Error(exc.code, exc.text)

        if isinstance(msg, Hello):
            if session is not None:
                self._drop_session(session.token)
            new = _Session(token=secrets.token_hex(4), client_id=msg.client_id)
            with self._sessions_lock:
                self._sessions[new.token] = new
            return Welcome(new.token), new

        if isinstance(msg, (Cmd, StateQuery)):
            if session is None:
                return (Error(E_NO_SESSION, "HELLO first"), None)
            now = time.monotonic()
            if now - session.last_active > self.idle_timeout:
                self._drop_session(session.token)
                return (Error(E_EXPIRED, "session expired; HELLO again"), None)
            session.last_active = now
            if isinstance(msg, StateQuery):
                return self.arm.snapshot()
            if msg.seq <= session.last_seq:
                return Error(
                    E_STALE_SEQ,
                    f"seq {msg.seq} not after last acked {session.last_seq}",
                )
            self.arm.apply(ServoCommand(msg.x, msg.y, msg.z, msg.seq))
            session.last_seq = msg.seq
            return Ack(msg.seq)

        # Clients should only ever send HELLO/CMD/STATE?; anything else
        # decodes fine but is not for us.
        return Error(E_MALFORMED, f"unexpected message {type(msg).__name__}")

    def _drop_session(self, token: str) -> None:
        with self._sessions_lock:
            self._sessions.pop(token, None)


class GatewayServer:
    """WebSocket gateway: pushes arm state, accepts virtual-hand input.

    Outbound: "STATE <x> <y> <z> <fx> <fy> <fz> <flags>" after every applied
    command, coalesced to at most ``state_rate`` pushes per second.
    Inbound: "MOVE <dx> <dy> <dz>" runs through a server-side fuzzy
    controller exactly like a client's inference stage; "GRIP 0|1" toggles
    the simulator-local grip.  Malformed input is logged and ignored.
    """

    def __init__(
        self,
        host: str,
        port: int,
        arm: ArmService,
        state_rate: float = DEFAULT_STATE_RATE,
        rules: Optional[tuple[RuleBase, RuleBase]] = None,
    ):
        self.arm = arm
        self._rules = rules
        self._interval = 1.0 / state_rate
        self._controller = ControllerState()
        self._ctl_lock = threading.Lock()
        self._ctl_seq = 0
        self._clients: list[ws.WsConnection] = []
        self._clients_lock = threading.Lock()
        self._dirty = threading.Event()
        self._stop = threading.Event()
        self._listen = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listen.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listen.bind((host, port))
        self._listen.listen(8)
        self._accept_thread = threading.Thread(
            target=self._accept_loop, name="gateway-accept", daemon=True
        )
        self._push_thread = threading.Thread(
            target=self._push_loop, name="gateway-push", daemon=True
        )
        arm.add_listener(lambda _snap: self._dirty.set())

    @property
    def address(self) -> tuple[str, int]:
        return self._listen.getsockname()[:2]

    def start(self) -> "GatewayServer":
        self._accept_thread.start()
        self._push_thread.start()
        logger.info("gateway listening on ws://%s:%d", *self.address)
        return self

    def shutdown(self) -> None:
        self._stop.set()
        try:
            self._listen.close()
        except OSError:
            pass
        with self._clients_lock:
            clients = list(self._clients)
            self._clients.clear()
        for conn in clients:
            conn.close()

    # -- connection handling ---------------------------------------------

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                sock, peer = self._listen.accept()
            except OSError:
                return
            threading.Thread(
                target=self._serve_client,
                args=(sock, peer),
                name=f"gateway-client-{peer[1]}",
                daemon=True,
            ).start()

    def _serve_client(self, sock: socket.socket, peer) -> None:
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        try:
            conn = ws.accept(sock)
        except (ws.HandshakeError, OSError) as exc:
            logger.warning("gateway handshake from %s failed: %s", peer, exc)
            sock.close()
            return
        logger.debug("dashboard %s connected", peer)
        with self._clients_lock:
            self._clients.append(conn)
        # Fresh connections get the current state immediately.
        try:
            conn.send_text(self._state_line())
        except OSError:
            pass
        try:
            while not self._stop.is_set():
                text = conn.recv_text()
                if text is None:
                    break
                self._handle_input(text.strip())
        finally:
            with self._clients_lock:
                if conn in self._clients:
                    self._clients.remove(conn)
            conn.close()
            logger.debug("dashboard %s disconnected", peer)

    def _handle_input(self, text: str) -> None:
        parts = text.split()
        if not parts:
            return
        if parts[0] == "MOVE" and len(parts) == 4:
            try:
                dx, dy, dz = (float(p) for p in parts[1:])
            except ValueError:
                logger.warning("ignoring malformed MOVE: %r", text)
                return
            with self._ctl_lock:
                self._ctl_seq += 1
                cmd, self._controller = step_controller(
                    Displacement(dx, dy, dz),
                    self._controller,
                    rules=self._rules,
                    seq=self._ctl_seq,
                )
            self.arm.apply(cmd)
            return
        if parts[0] == "GRIP" and len(parts) == 2 and parts[1] in ("0", "1"):
            self.arm.set_grip(parts[1] == "1")
            self._dirty.set()
            return
        logger.warning("ignoring malformed dashboard message: %r", text)

    # -- state pushes ------------------------------------------------------

    def _state_line(self) -> str:
        return encode_wire(self.arm.snapshot()).decode("ascii").rstrip("\n")

    def _push_loop(self) -> None:
        while not self._stop.is_set():
            if not self._dirty.wait(timeout=0.2):
                continue
            self._dirty.clear()
            line = self._state_line()
            with self._clients_lock:
                clients = list(self._clients)
            for conn in clients:
                try:
                    conn.send_text(line)
                except OSError:
                    pass
            # Coalesce bursts: nothing more goes out until the next tick.
            time.sleep(self._interval)
