"""Client/server line protocol: LF-terminated ASCII messages over TCP.

Grammar (one message per line):

    HELLO <client_id>
    WELCOME <session>
    CMD <seq> <x> <y> <z>
    ACK <seq>
    STATE?
    STATE <x> <y> <z> <fk_x> <fk_y> <fk_z> <flags>
    ERR <code> <text...>

Degrees are integers in [0, 180]; FK coordinates are floats printed with
repr so decode(encode(m)) is the identity; <flags> is a comma-joined list
of overloaded joints or "-" when none.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# Error codes used in ERR replies.
E_MALFORMED = 400
E_NO_SESSION = 401
E_STALE_SEQ = 409
E_RANGE = 422
E_EXPIRED = 440

_FLAG_NAMES = frozenset({"shoulder", "elbow"})


class WireDecodeError(ValueError):
    """Line could not be decoded; carries the ERR code to reply with."""

    def __init__(self, code: int, text: str):
        super().__init__(text)
        self.code = code
        self.text = text


@dataclass(frozen=True)
class Hello:
    client_id: str


@dataclass(frozen=True)
class Welcome:
    session: str


@dataclass(frozen=True)
class Cmd:
    seq: int
    x: int
    y: int
    z: int


@dataclass(frozen=True)
class Ack:
    seq: int


@dataclass(frozen=True)
class StateQuery:
    pass


@dataclass(frozen=True)
class State:
    x: int
    y: int
    z: int
    fk_x: float
    fk_y: float
    fk_z: float
    overload: frozenset[str]


@dataclass(frozen=True)
class Error:
    code: int
    text: str


WireMessage = Union[Hello, Welcome, Cmd, Ack, StateQuery, State, Error]


def _check_token(kind: str, value: str) -> str:
    if not value or any(ch.isspace() for ch in value):
        raise ValueError(f"{kind} must be a single non-empty token: {value!r}")
    return value


def _check_degrees(*values: int) -> None:
    for v in values:
        if not 0 <= v <= 180:
            raise ValueError(f"degree {v} outside [0, 180]")


def encode_wire(m: WireMessage) -> bytes:
    """Encode a message as one LF-terminated ASCII line."""
    if isinstance(m, Hello):
        line = f"HELLO {_check_token('client_id', m.client_id)}"
    elif isinstance(m, Welcome):
        line = f"WELCOME {_check_token('session', m.session)}"
    elif isinstance(m, Cmd):
        _check_degrees(m.x, m.y, m.z)
        line = f"CMD {m.seq} {m.x} {m.y} {m.z}"
    elif isinstance(m, Ack):
        line = f"ACK {m.seq}"
    elif isinstance(m, StateQuery):
        line = "STATE?"
    elif isinstance(m, State):
        _check_degrees(m.x, m.y, m.z)
        flags = ",".join(sorted(m.overload)) if m.overload else "-"
        line = f"STATE {m.x} {m.y} {m.z} {m.fk_x!r} {m.fk_y!r} {m.fk_z!r} {flags}"
    elif isinstance(m, Error):
        line = f"ERR {m.code} {m.text}"
    else:
        raise TypeError(f"not a wire message: {m!r}")
    return (line + "\n").encode("ascii")


def decode_wire(line: Union[bytes, str]) -> WireMessage:
    """Decode one line; raises :class:`WireDecodeError` with an ERR code."""
    if isinstance(line, bytes):
        try:
            text = line.decode("ascii")
        except UnicodeDecodeError:
            raise WireDecodeError(E_MALFORMED, "non-ASCII line") from None
    else:
        text = line
    text = text.rstrip("\r\n")
    if not text:
        raise WireDecodeError(E_MALFORMED, "empty line")
    parts = text.split(" ")
    verb = parts[0]

    if verb == "HELLO":
        _need(parts, 2)
        return Hello(parts[1])
    if verb == "WELCOME":
        _need(parts, 2)
        return Welcome(parts[1])
    if verb == "CMD":
        _need(parts, 5)
        seq = _int(parts[1], "seq")
        x, y, z = (_int(p, "degree") for p in parts[2:5])
        if seq < 0:
            raise WireDecodeError(E_MALFORMED, f"negative seq {seq}")
        for v in (x, y, z):
            if not 0 <= v <= 180:
                raise WireDecodeError(E_RANGE, f"degree {v} outside [0, 180]")
        return Cmd(seq, x, y, z)
    if verb == "ACK":
        _need(parts, 2)
        return Ack(_int(parts[1], "seq"))
    if verb == "STATE?":
        _need(parts, 1)
        return StateQuery()
    if verb == "STATE":
        _need(parts, 8)
        x, y, z = (_int(p, "degree") for p in parts[1:4])
        for v in (x, y, z):
            if not 0 <= v <= 180:
                raise WireDecodeError(E_RANGE, f"degree {v} outside [0, 180]")
        try:
            fk = tuple(float(p) for p in parts[4:7])
        except ValueError:
            raise WireDecodeError(E_MALFORMED, "bad FK coordinate") from None
        flags = frozenset() if parts[7] == "-" else frozenset(parts[7].split(","))
        if not flags <= _FLAG_NAMES:
            raise WireDecodeError(E_MALFORMED, f"unknown overload flag in {parts[7]!r}")
        return State(x, y, z, *fk, flags)
    if verb == "ERR":
        if len(parts) < 3:
            raise WireDecodeError(E_MALFORMED, f"ERR needs a code and text: {text!r}")
        return Error(_int(parts[1], "code"), " ".join(parts[2:]))

    raise WireDecodeError(E_MALFORMED, f"unknown verb {verb!r}")


def _need(parts: list[str], arity: int) -> None:
    if len(parts) != arity:
        raise WireDecodeError(
            E_MALFORMED, f"{parts[0]} expects {arity - 1} fields, got {len(parts) - 1}"
        )


def _int(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise WireDecodeError(E_MALFORMED, f"bad {what} {token!r}") from None
