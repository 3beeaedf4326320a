"""Accepts and supervises agent connections.

Agents dial in, authenticate with a HELLO, and keep the stream open; the
gateway NEVER opens a connection toward an agent (that is the whole point:
agents behind NAT only need outbound reachability). Listing and fetch
requests are relayed over the agent's own stream and answered by
correlation id. A heartbeat thread pings each session and declares it dead
after three silent intervals.
"""

from __future__ import annotations

import base64
import logging
import queue
import socket
import threading
import time
from typing import TYPE_CHECKING, Iterator

from ..errors import (
    AgentOffline,
    NotFound,
    RemotePathRejected,
    RemoteProtocolError,
    TransferTimeout,
)
from ..store import new_id
from . import protocol
from .protocol import ConnectionClosed, Message, WireProtocolError

if TYPE_CHECKING:
    from ..service.accounts import AccountService

logger = logging.getLogger(__name__)

_QUEUE_DEPTH = 64  # inbound frames buffered per in-flight request
_CLOSED = ("closed", None)


class AgentSession:
    """One live agent connection (always agent-initiated)."""

    initiated_by = "agent"

    def __init__(self, sock: socket.socket, account: str, agent_id: str,
                 version: int, connected_at: float):
        self.sock = sock
        self.account = account
        self.agent_id = agent_id
        self.version = version
        self.connected_at = connected_at
        self.last_seen = time.monotonic()
        self.alive = True
        self._send_lock = threading.Lock()
        self._state_lock = threading.Lock()
        self._pending: dict[str, queue.Queue] = {}

    @property
    def key(self) -> tuple[str, str]:
        return (self.account, self.agent_id)

    def send(self, msg_type: str, correlation_id: str | None, payload: dict | None = None) -> None:
        with self._send_lock:
            protocol.send_message(self.sock, msg_type, correlation_id, payload)

    def register(self, correlation_id: str) -> queue.Queue:
        q: queue.Queue = queue.Queue(maxsize=_QUEUE_DEPTH)
        with self._state_lock:
            self._pending[correlation_id] = q
        return q

    def unregister(self, correlation_id: str) -> None:
        with self._state_lock:
            self._pending.pop(correlation_id, None)

    def dispatch(self, msg: Message) -> None:
        """Route an inbound response frame to its waiting request."""
        with self._state_lock:
            q = self._pending.get(msg.correlation_id)
        if q is None:
            return  # request gone (timed out or cancelled); drop the frame
        item = (msg.type, msg.payload)
        while self.alive:
            try:
                q.put(item, timeout=0.5)
                return
            except queue.Full:
                with self._state_lock:
                    if msg.correlation_id not in self._pending:
                        return

    def close(self) -> None:
        self.alive = False
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass
        with self._state_lock:
            pending = list(self._pending.values())
            self._pending.clear()
        for q in pending:
            try:
                q.put_nowait(_CLOSED)
            except queue.Full:
                pass


class AgentGateway:
    def __init__(
        self,
        accounts: AccountService,
        heartbeat_interval: float = 10.0,
        missed_heartbeats: int = 3,
        list_timeout: float = 5.0,
        fetch_idle_timeout: float = 30.0,
        hello_timeout: float = 10.0,
    ):
        self._accounts = accounts
        self.heartbeat_interval = heartbeat_interval
        self.missed_heartbeats = missed_heartbeats
        self.list_timeout = list_timeout
        self.fetch_idle_timeout = fetch_idle_timeout
        self.hello_timeout = hello_timeout
        self._sessions: dict[tuple[str, str], AgentSession] = {}
        self._lock = threading.Lock()
        self._listener: socket.socket | None = None
        self._stopping = threading.Event()
        self._threads: list[threading.Thread] = []

    # -- lifecycle ---------------------------------------------------------------

    def start(self, host: str = "127.0.0.1", port: int = 0) -> int:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((host, port))
        listener.listen(16)
        self._listener = listener
        accept = threading.Thread(target=self._accept_loop, name="agent-accept", daemon=True)
        monitor = threading.Thread(target=self._monitor_loop, name="agent-heartbeat", daemon=True)
        accept.start()
        monitor.start()
        self._threads = [accept, monitor]
        return listener.getsockname()[1]

    def close(self) -> None:
        self._stopping.set()
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._lock:
            sessions = list(self._sessions.values())
            self._sessions.clear()
        for session in sessions:
            session.close()

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while not self._stopping.is_set():
            try:
                conn, addr = self._listener.accept()
            except OSError:
                return
            threading.Thread(
                target=self._serve_agent, args=(conn, addr),
                name=f"agent-conn-{addr[1]}", daemon=True,
            ).start()

    # -- per-connection ------------------------------------------------------------

    def _serve_agent(self, conn: socket.socket, addr) -> None:
        session = None
        try:
            conn.settimeout(self.hello_timeout)
            hello = protocol.recv_message(conn)
            session = self._handshake(conn, hello)
            conn.settimeout(None)
            session.send(protocol.HELLO_OK, hello.correlation_id, {
                "version": protocol.PROTOCOL_VERSION,
                "heartbeat_interval": self.heartbeat_interval,
            })
            self._read_loop(session)
        except (ConnectionClosed, WireProtocolError, OSError, socket.timeout) as exc:
            logger.debug("agent connection %s ended: %s", addr, exc)
        except _HandshakeRejected:
            pass
        finally:
            if session is not None:
                self._drop_session(session)
            else:
                try:
                    conn.close()
                except OSError:
                    pass

    def _handshake(self, conn: socket.socket, hello: Message) -> AgentSession:
        if hello.type != protocol.HELLO:
            self._reject(conn, hello.correlation_id, protocol.ERR_PROTOCOL,
                         "first message must be HELLO")
        payload = hello.payload
        if payload.get("version") != protocol.PROTOCOL_VERSION:
            self._reject(conn, hello.correlation_id, protocol.ERR_PROTOCOL,
                         f"unsupported protocol version {payload.get('version')!r}")
        agent_id = payload.get("agent_id")
        if not isinstance(agent_id, str) or not agent_id:
            self._reject(conn, hello.correlation_id, protocol.ERR_PROTOCOL,
                         "agent_id must be a non-empty string")
        account = self._authenticate(payload)
        if account is None:
            self._reject(conn, hello.correlation_id, protocol.ERR_AUTH_FAILED,
                         "authentication failed")
        session = AgentSession(
            sock=conn, account=account, agent_id=agent_id,
            version=payload["version"],
            connected_at=self._accounts.now(),
        )
        with self._lock:
            old = self._sessions.get(session.key)
            self._sessions[session.key] = session
        if old is not None:
            old.close()  # a fresh handshake supersedes the previous session
        return session

    def _authenticate(self, payload: dict) -> str | None:
        token = payload.get("token")
        if isinstance(token, str) and token:
            try:
                return self._accounts.authenticate(token)
            except Exception:
                return None
        username = payload.get("username")
        password = payload.get("password")
        if isinstance(username, str) and isinstance(password, str):
            return self._accounts.verify_credentials(username, password)
        return None

    def _reject(self, conn: socket.socket, correlation_id: str | None,
                code: str, message: str) -> None:
        try:
            protocol.send_message(conn, protocol.ERROR, correlation_id,
                                  {"code": code, "message": message})
        except OSError:
            pass
        try:
            conn.close()
        except OSError:
            pass
        raise _HandshakeRejected(message)

    def _read_loop(self, session: AgentSession) -> None:
        while session.alive:
            msg = protocol.recv_message(session.sock)
            session.last_seen = time.monotonic()
            if msg.type == protocol.PONG:
                continue
            if msg.type == protocol.PING:
                session.send(protocol.PONG, msg.correlation_id)
                continue
            if msg.type in (protocol.LIST_RESP, protocol.FETCH_CHUNK,
                            protocol.FETCH_END, protocol.ERROR):
                if msg.correlation_id is not None:
                    session.dispatch(msg)
                continue
            raise WireProtocolError(f"unexpected message from agent: {msg.type}")

    def _drop_session(self, session: AgentSession) -> None:
        with self._lock:
            if self._sessions.get(session.key) is session:
                del self._sessions[session.key]
        session.close()

    def _monitor_loop(self) -> None:
        while not self._stopping.wait(self.heartbeat_interval):
            deadline = time.monotonic() - self.heartbeat_interval * self.missed_heartbeats
            with self._lock:
                sessions = list(self._sessions.values())
            for session in sessions:
                if session.last_seen < deadline:
                    logger.info("agent %s/%s missed %d heartbeats, dropping",
                                session.account, session.agent_id, self.missed_heartbeats)
                    self._drop_session(session)
                    continue
                try:
                    session.send(protocol.PING, None)
                except OSError:
                    self._drop_session(session)

    # -- session queries -------------------------------------------------------------

    def live_session(self, account: str, agent_id: str) -> AgentSession | None:
        with self._lock:
            session = self._sessions.get((account, agent_id))
        if session is not None and session.alive:
            return session
        return None

    def live_agent_ids(self, account: str) -> list[str]:
        with self._lock:
            return sorted(agent_id for (acct, agent_id), s in self._sessions.items()
                          if acct == account and s.alive)

    # -- relayed requests ---------------------------------------------------------------

    def request_listing(self, session: AgentSession, share: str, path: str):
        """Returns ("ok", entries), ("error", code, message) or ("timeout",)."""
        correlation_id = new_id()
        q = session.register(correlation_id)
        try:
            session.send(protocol.LIST_REQ, correlation_id, {"share": share, "path": path})
            try:
                kind, payload = q.get(timeout=self.list_timeout)
            except queue.Empty:
                return ("timeout",)
            if (kind, payload) == _CLOSED:
                return ("timeout",)
            if kind == protocol.LIST_RESP:
                entries = payload.get("entries")
                if not isinstance(entries, list):
                    return ("error", protocol.ERR_PROTOCOL, "malformed LIST_RESP")
                return ("ok", entries)
            if kind == protocol.ERROR:
                return ("error", payload.get("code", protocol.ERR_IO),
                        payload.get("message", ""))
            return ("error", protocol.ERR_PROTOCOL, f"unexpected {kind}")
        except OSError:
            return ("timeout",)
        finally:
            session.unregister(correlation_id)

    def open_fetch(self, session: AgentSession, share: str, path: str) -> Iterator[bytes]:
        """Stream a remote file's bytes as they arrive, chunk by chunk.

        Raises TransferTimeout when the stream stalls past the idle deadline
        or the agent dies mid-transfer; the exception carries how many bytes
        made it through (partial data is thereby flagged, never passed off
        as complete).
        """
        correlation_id = new_id()
        q = session.register(correlation_id)

        def stream() -> Iterator[bytes]:
            received = 0
            expected_seq = 0
            try:
                try:
                    session.send(protocol.FETCH_REQ, correlation_id,
                                 {"share": share, "path": path})
                except OSError:
                    raise AgentOffline("agent connection lost") from None
                while True:
                    try:
                        kind, payload = q.get(timeout=self.fetch_idle_timeout)
                    except queue.Empty:
                        raise TransferTimeout(
                            f"no data from agent for {self.fetch_idle_timeout}s",
                            bytes_received=received) from None
                    if (kind, payload) == _CLOSED:
                        raise TransferTimeout("agent connection lost mid-transfer",
                                              bytes_received=received)
                    if kind == protocol.FETCH_CHUNK:
                        if payload.get("seq") != expected_seq:
                            raise RemoteProtocolError(
                                f"chunk out of order: got {payload.get('seq')}, "
                                f"want {expected_seq}")
                        try:
                            data = base64.b64decode(payload.get("data", ""), validate=True)
                        except (ValueError, TypeError) as exc:
                            raise RemoteProtocolError(f"bad chunk encoding: {exc}") from exc
                        expected_seq += 1
                        received += len(data)
                        yield data
                    elif kind == protocol.FETCH_END:
                        size = payload.get("size")
                        if isinstance(size, int) and size != received:
                            raise RemoteProtocolError(
                                f"size mismatch: agent reported {size}, got {received}")
                        return
                    elif kind == protocol.ERROR:
                        code = payload.get("code")
                        message = payload.get("message", "")
                        if code == protocol.ERR_NOT_FOUND:
                            raise NotFound(message or "remote path not found")
                        if code == protocol.ERR_REJECTED:
                            raise RemotePathRejected(message or "remote path rejected")
                        raise RemoteProtocolError(message or f"agent error: {code}")
                    else:
                        raise RemoteProtocolError(f"unexpected {kind} during fetch")
            finally:
                session.unregister(correlation_id)

        return stream()


class _HandshakeRejected(Exception):
    pass
