"""Reference share agent.

Dials the service's agent port (outbound only: the machine can sit behind
NAT), authenticates, then answers listing and fetch requests for its
configured shares, read-only. Each share is a label mapped to a local
directory; requests never escape the share root (paths are screened before
any filesystem access and the resolved target is confined to the root).
"""

from __future__ import annotations

import base64
import logging
import os
import queue
import socket
import threading

from ..errors import RemotePathRejected
from . import protocol
from .protocol import ConnectionClosed, Message, WireProtocolError, validate_rel_path

logger = logging.getLogger(__name__)


class AgentError(Exception):
    pass


class ShareAgent:
    def __init__(
        self,
        host: str,
        port: int,
        agent_id: str,
        shares: dict[str, str],
        token: str | None = None,
        username: str | None = None,
        password: str | None = None,
        chunk_size: int = protocol.CHUNK_SIZE,
        connect_timeout: float = 10.0,
    ):
        self.host = host
        self.port = port
        self.agent_id = agent_id
        self.shares = {label: os.path.realpath(path) for label, path in shares.items()}
        self._auth = {"token": token, "username": username, "password": password}
        self.chunk_size = chunk_size
        self.connect_timeout = connect_timeout
        self._sock: socket.socket | None = None
        self._send_lock = threading.Lock()
        self._requests: queue.Queue[Message | None] = queue.Queue()
        self._stopping = threading.Event()
        self._threads: list[threading.Thread] = []
        self.connected = threading.Event()

    # -- connection ---------------------------------------------------------------

    def connect(self) -> None:
        sock = socket.create_connection((self.host, self.port), timeout=self.connect_timeout)
        try:
            hello = {"version": protocol.PROTOCOL_VERSION, "agent_id": self.agent_id}
            if self._auth["token"]:
                hello["token"] = self._auth["token"]
            else:
                hello["username"] = self._auth["username"]
                hello["password"] = self._auth["password"]
            protocol.send_message(sock, protocol.HELLO, None, hello)
            reply = protocol.recv_message(sock)
            if reply.type == protocol.ERROR:
                raise AgentError(f"handshake rejected: {reply.payload.get('message')}")
            if reply.type != protocol.HELLO_OK:
                raise AgentError(f"unexpected handshake reply: {reply.type}")
        except Exception:
            sock.close()
            raise
        sock.settimeout(None)
        self._sock = sock
        self.connected.set()

    def start(self) -> None:
        """Connect and serve on background threads."""
        if self._sock is None:
            self.connect()
        reader = threading.Thread(target=self._read_loop, name="agent-reader", daemon=True)
        worker = threading.Thread(target=self._work_loop, name="agent-worker", daemon=True)
        reader.start()
        worker.start()
        self._threads = [reader, worker]

    def stop(self) -> None:
        self._stopping.set()
        self.connected.clear()
        self._requests.put(None)
        if self._sock is not None:
            try:
                self._sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                self._sock.close()
            except OSError:
                pass
            self._sock = None

    def run_forever(self, reconnect_delay: float = 5.0) -> None:
        """Serve until stopped, reconnecting after connection loss."""
        while not self._stopping.is_set():
            try:
                if self._sock is None:
                    self.connect()
                    logger.info("agent %s connected to %s:%s", self.agent_id, self.host, self.port)
                worker = threading.Thread(target=self._work_loop, daemon=True)
                worker.start()
                try:
                    self._read_loop()
                finally:
                    self._requests.put(None)
                    worker.join(timeout=5)
            except AgentError:
                raise  # credential/handshake problems are not retried
            except (OSError, ConnectionClosed, WireProtocolError) as exc:
                logger.warning("agent connection lost: %s", exc)
            self.connected.clear()
            if self._sock is not None:
                try:
                    self._sock.close()
                except OSError:
                    pass
                self._sock = None
            if self._stopping.wait(reconnect_delay):
                return

    # -- protocol loops ---------------------------------------------------------------

    def _send(self, msg_type: str, correlation_id: str | None, payload: dict | None = None) -> None:
        sock = self._sock
        if sock is None:
            return
        with self._send_lock:
            protocol.send_message(sock, msg_type, correlation_id, payload)

    def _read_loop(self) -> None:
        sock = self._sock
        while not self._stopping.is_set() and sock is not None:
            try:
                msg = protocol.recv_message(sock)
            except (ConnectionClosed, WireProtocolError, OSError):
                break
            if msg.type == protocol.PING:
                # answered inline so a long fetch never starves the heartbeat
                try:
                    self._send(protocol.PONG, msg.correlation_id)
                except OSError:
                    break
            elif msg.type in (protocol.LIST_REQ, protocol.FETCH_REQ):
                self._requests.put(msg)
            elif msg.type == protocol.PONG:
                continue
            else:
                logger.debug("agent ignoring %s", msg.type)
        self.connected.clear()

    def _work_loop(self) -> None:
        while not self._stopping.is_set():
            msg = self._requests.get()
            if msg is None:
                return
            try:
                if msg.type == protocol.LIST_REQ:
                    self._handle_list(msg)
                elif msg.type == protocol.FETCH_REQ:
                    self._handle_fetch(msg)
            except OSError:
                return

    # -- request handlers ----------------------------------------------------------------

    def _resolve(self, share: str, rel_path: str) -> str:
        root = self.shares.get(share)
        if root is None:
            raise FileNotFoundError(f"no such share: {share}")
        validate_rel_path(rel_path)
        target = os.path.realpath(os.path.join(root, rel_path)) if rel_path else root
        if target != root and os.path.commonpath([root, target]) != root:
            raise RemotePathRejected(f"path escapes share: {rel_path!r}")
        return target

    def _error(self, msg: Message, code: str, text: str) -> None:
        self._send(protocol.ERROR, msg.correlation_id, {"code": code, "message": text})

    def _handle_list(self, msg: Message) -> None:
        share = msg.payload.get("share", "")
        path = msg.payload.get("path", "")
        try:
            target = self._resolve(share, path)
            with os.scandir(target) as it:
                entries = []
                for dirent in it:
                    try:
                        st = dirent.stat(follow_symlinks=False)
                    except OSError:
                        continue
                    is_dir = dirent.is_dir(follow_symlinks=False)
                    entries.append({
                        "name": dirent.name,
                        "kind": "dir" if is_dir else "file",
                        "size": 0 if is_dir else st.st_size,
                        "modified": st.st_mtime,
                    })
            entries.sort(key=lambda e: e["name"])
            self._send(protocol.LIST_RESP, msg.correlation_id, {"entries": entries})
        except RemotePathRejected as exc:
            self._error(msg, protocol.ERR_REJECTED, str(exc))
        except (FileNotFoundError, NotADirectoryError) as exc:
            self._error(msg, protocol.ERR_NOT_FOUND, str(exc))
        except OSError as exc:
            self._error(msg, protocol.ERR_IO, str(exc))

    def _handle_fetch(self, msg: Message) -> None:
        share = msg.payload.get("share", "")
        path = msg.payload.get("path", "")
        try:
            target = self._resolve(share, path)
            if not os.path.isfile(target):
                raise FileNotFoundError(f"not a file: {path!r}")
            size = 0
            seq = 0
            with open(target, "rb") as fh:
                while True:
                    chunk = fh.read(self.chunk_size)
                    if not chunk:
                        break
                    self._send(protocol.FETCH_CHUNK, msg.correlation_id, {
                        "seq": seq,
                        "data": base64.b64encode(chunk).decode("ascii"),
                    })
                    seq += 1
                    size += len(chunk)
            self._send(protocol.FETCH_END, msg.correlation_id, {"size": size})
        except RemotePathRejected as exc:
            self._error(msg, protocol.ERR_REJECTED, str(exc))
        except (FileNotFoundError, NotADirectoryError, IsADirectoryError) as exc:
            self._error(msg, protocol.ERR_NOT_FOUND, str(exc))
        except OSError as exc:
            self._error(msg, protocol.ERR_IO, str(exc))
