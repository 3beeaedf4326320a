"""Agent wire protocol: length-prefixed JSON frames over one reliable stream.

Frame layout (see docs/agent-protocol.md for the byte-level contract):

    +----------------------+--------------------------+
    | 4 bytes, big-endian  | UTF-8 JSON body          |
    | unsigned body length |                          |
    +----------------------+--------------------------+

Body: {"type": <str>, "correlation_id": <str|null>, "payload": {...}}

The agent dials the service and keeps the stream open; the service never
dials agents. Requests are multiplexed by correlation id, so a slow fetch
does not block an unrelated listing on the same stream.
"""

from __future__ import annotations

import json
import socket
import struct
from dataclasses import dataclass

PROTOCOL_VERSION = 1

CHUNK_SIZE = 64 * 1024
MAX_FRAME_BYTES = 4 * 1024 * 1024
_HEADER = struct.Struct(">I")

HELLO = "HELLO"
HELLO_OK = "HELLO_OK"
PING = "PING"
PONG = "PONG"
LIST_REQ = "LIST_REQ"
LIST_RESP = "LIST_RESP"
FETCH_REQ = "FETCH_REQ"
FETCH_CHUNK = "FETCH_CHUNK"
FETCH_END = "FETCH_END"
ERROR = "ERROR"

MESSAGE_TYPES = frozenset({
    HELLO, HELLO_OK, PING, PONG,
    LIST_REQ, LIST_RESP, FETCH_REQ, FETCH_CHUNK, FETCH_END, ERROR,
})

# ERROR payload codes
ERR_AUTH_FAILED = "auth_failed"
ERR_PROTOCOL = "protocol"
ERR_NOT_FOUND = "not_found"
ERR_REJECTED = "rejected"
ERR_IO = "io"


class WireProtocolError(Exception):
    """The peer sent something the protocol does not allow."""


class ConnectionClosed(Exception):
    """The stream ended (EOF) while a frame was expected."""


@dataclass
class Message:
    type: str
    correlation_id: str | None
    payload: dict


def pack_message(msg_type: str, correlation_id: str | None, payload: dict | None = None) -> bytes:
    body = json.dumps(
        {"type": msg_type, "correlation_id": correlation_id, "payload": payload or {}},
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")
    if len(body) > MAX_FRAME_BYTES:
        raise WireProtocolError(f"frame too large: {len(body)} bytes")
    return _HEADER.pack(len(body)) + body


def send_message(sock: socket.socket, msg_type: str, correlation_id: str | None,
                 payload: dict | None = None) -> None:
    sock.sendall(pack_message(msg_type, correlation_id, payload))


def recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionClosed("stream closed")
        buf.extend(chunk)
    return bytes(buf)


def recv_message(sock: socket.socket) -> Message:
    (length,) = _HEADER.unpack(recv_exact(sock, _HEADER.size))
    if length > MAX_FRAME_BYTES:
        raise WireProtocolError(f"frame too large: {length} bytes")
    try:
        body = json.loads(recv_exact(sock, length).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WireProtocolError(f"bad frame body: {exc}") from exc
    if not isinstance(body, dict):
        raise WireProtocolError("frame body must be a JSON object")
    msg_type = body.get("type")
    if msg_type not in MESSAGE_TYPES:
        raise WireProtocolError(f"unknown message type: {msg_type!r}")
    correlation_id = body.get("correlation_id")
    if correlation_id is not None and not isinstance(correlation_id, str):
        raise WireProtocolError("correlation_id must be a string or null")
    payload = body.get("payload")
    if not isinstance(payload, dict):
        raise WireProtocolError("payload must be a JSON object")
    return Message(type=msg_type, correlation_id=correlation_id, payload=payload)


def validate_rel_path(path: str) -> str:
    """Reject paths that could escape a share root. Returns the path.

    Allowed: "" (the share root) and forward-slash relative paths whose
    segments are plain names. Both the service and the agent run this; the
    agent additionally confines the resolved path to the share root.
    """
    from ..errors import RemotePathRejected

    if not isinstance(path, str):
        raise RemotePathRejected("path must be a string")
    if path == "":
        return path
    if "\x00" in path or "\\" in path:
        raise RemotePathRejected("path contains forbidden characters")
    if path.startswith("/") or path.startswith("~"):
        raise RemotePathRejected("path must be relative")
    for segment in path.split("/"):
        if segment in ("", ".", ".."):
            raise RemotePathRejected(f"forbidden path segment: {segment!r}")
    return path
