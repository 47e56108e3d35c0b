"""Minimal RFC 6455 WebSocket framing over plain sockets.

Only what the dashboard gateway needs: the HTTP upgrade handshake, text
frames, ping/pong, and the close exchange.  Server-to-client frames go
unmasked, client-to-server frames masked, per the RFC.  No extensions, no
subprotocols; fragmented messages are reassembled.
"""

from __future__ import annotations

import base64
import hashlib
import os
import socket
from typing import Optional

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA

_MAX_HANDSHAKE = 16 * 1024
_MAX_PAYLOAD = 1 << 20


class HandshakeError(ValueError):
    """The peer did not complete a valid WebSocket upgrade."""


def _accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _read_until_headers_end(sock: socket.socket) -> bytes:
    data = b""
    while b"\r\n\r\n" not in data:
        if len(data) > _MAX_HANDSHAKE:
            raise HandshakeError("oversized handshake request")
        chunk = sock.recv(4096)
        if not chunk:
            raise HandshakeError("connection closed during handshake")
        data += chunk
    return data


class WsConnection:
    """One established WebSocket endpoint (either side).

    ``pending`` carries bytes that arrived bundled with the handshake and
    belong to the first frame.
    """

    def __init__(self, sock: socket.socket, *, mask_outgoing: bool, pending: bytes = b""):
        self._sock = sock
        self._mask = mask_outgoing
        self._buffer = pending
        self._closed = False

    def send_text(self, text: str) -> None:
        self._send_frame(OP_TEXT, text.encode("utf-8"))

    def recv_text(self) -> Optional[str]:
        """Next text message, or None once the connection is closed.

        Ping frames are answered transparently; binary messages are
        skipped (the gateway protocol is text only).
        """
        while True:
            msg = self._recv_message()
            if msg is None:
                return None
            opcode, payload = msg
            if opcode == OP_TEXT:
                return payload.decode("utf-8", errors="replace")
            # binary: ignore and keep reading

    def close(self, code: int = 1000) -> None:
        if not self._closed:
            try:
                self._send_frame(OP_CLOSE, code.to_bytes(2, "big"))
            except OSError:
                pass
            self._closed = True
        try:
            self._sock.close()
        except OSError:
            pass

    # -- framing ------------------------------------------------------

    def _send_frame(self, opcode: int, payload: bytes) -> None:
        header = bytearray([0x80 | opcode])
        mask_bit = 0x80 if self._mask else 0x00
        n = len(payload)
        if n < 126:
            header.append(mask_bit | n)
        elif n < (1 << 16):
            header.append(mask_bit | 126)
            header += n.to_bytes(2, "big")
        else:
            header.append(mask_bit | 127)
            header += n.to_bytes(8, "big")
        if self._mask:
            key = os.urandom(4)
            header += key
            payload = _mask_payload(payload, key)
        self._sock.sendall(bytes(header) + payload)

    def _recv_message(self) -> Optional[tuple[int, bytes]]:
        """Reassemble one data message; handles control frames inline."""
        message_op = None
        buffer = b""
        while True:
            frame = self._recv_frame()
            if frame is None:
                return None
            fin, opcode, payload = frame
            if opcode == OP_CLOSE:
                self.close()
                return None
            if opcode == OP_PING:
                try:
                    self._send_frame(OP_PONG, payload)
                except OSError:
                    return None
                continue
            if opcode == OP_PONG:
                continue
            if opcode in (OP_TEXT, OP_BINARY):
                message_op = opcode
                buffer = payload
            elif opcode == OP_CONT and message_op is not None:
                buffer += payload
            else:
                return None  # protocol violation; drop the connection
            if fin:
                return message_op, buffer

    def _read_exact(self, n: int) -> Optional[bytes]:
        while len(self._buffer) < n:
            try:
                chunk = self._sock.recv(4096)
            except OSError:
                return None
            if not chunk:
                return None
            self._buffer += chunk
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def _recv_frame(self) -> Optional[tuple[bool, int, bytes]]:
        head = self._read_exact(2)
        if head is None:
            return None
        fin = bool(head[0] & 0x80)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            ext = self._read_exact(2)
            if ext is None:
                return None
            length = int.from_bytes(ext, "big")
        elif length == 127:
            ext = self._read_exact(8)
            if ext is None:
                return None
            length = int.from_bytes(ext, "big")
        if length > _MAX_PAYLOAD:
            return None
        key = None
        if masked:
            key = self._read_exact(4)
            if key is None:
                return None
        payload = self._read_exact(length) if length else b""
        if payload is None:
            return None
        if key:
            payload = _mask_payload(payload, key)
        return fin, opcode, payload


def _mask_payload(payload: bytes, key: bytes) -> bytes:
    out = bytearray(payload)
    for i in range(len(out)):
        out[i] ^= key[i & 3]
    return bytes(out)


def accept(sock: socket.socket) -> WsConnection:
    """Server side: perform the upgrade handshake on a fresh TCP socket."""
    request = _read_until_headers_end(sock)
    head, _, leftover = request.partition(b"\r\n\r\n")
    lines = head.split(b"\r\n")
    headers = {}
    for raw in lines[1:]:
        name, _, value = raw.partition(b":")
        headers[name.strip().lower()] = value.strip()
    if b"websocket" not in headers.get(b"upgrade", b"").lower():
        raise HandshakeError("missing Upgrade: websocket")
    key = headers.get(b"sec-websocket-key")
    if not key:
        raise HandshakeError("missing Sec-WebSocket-Key")
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {_accept_key(key.decode('ascii'))}\r\n"
        "\r\n"
    )
    sock.sendall(response.encode("ascii"))
    return WsConnection(sock, mask_outgoing=False, pending=leftover)


def connect(host: str, port: int, resource: str = "/", timeout: float = 5.0) -> WsConnection:
    """Client side: open a TCP connection and upgrade it."""
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    nonce = base64.b64encode(os.urandom(16)).decode("ascii")
    request = (
        f"GET {resource} HTTP/1.1\r\n"
        f"Host: {host}:{port}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {nonce}\r\n"
        "Sec-WebSocket-Version: 13\r\n"
        "\r\n"
    )
    sock.sendall(request.encode("ascii"))
    reply = _read_until_headers_end(sock)
    head, _, leftover = reply.partition(b"\r\n\r\n")
    status = head.split(b"\r\n", 1)[0]
    if b"101" not in status:
        sock.close()
        raise HandshakeError(f"upgrade refused: {status!r}")
    expected = _accept_key(nonce).encode("ascii")
    if expected not in head:
        sock.close()
        raise HandshakeError("bad Sec-WebSocket-Accept from server")
    return WsConnection(sock, mask_outgoing=True, pending=leftover)
