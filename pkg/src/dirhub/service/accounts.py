"""User accounts and bearer-token sessions.

Usernames are unique case-insensitively. Login failures are reported
identically whether the username is unknown or the password wrong. Tokens
come from the process CSPRNG (256 bits) and expire after a TTL; sessions
are in-memory only and do not survive a restart.
"""

from __future__ import annotations

import re
import secrets
from dataclasses import dataclass
from typing import TYPE_CHECKING

from ..errors import AuthFailed, BadRequest, UserNotFound, UsernameTaken, WeakPassword
from ..store import Store, new_id
from .passwords import PasswordRecord, hash_password, verify_password

if TYPE_CHECKING:
    pass

SESSION_TTL_SECONDS = 24 * 3600
MIN_PASSWORD_LENGTH = 8
_USERNAME_RE = re.compile(r"^[^\s/]{1,64}$")


@dataclass
class UserAccount:
    id: str
    username: str
    password: PasswordRecord | None  # None = login disabled (system account)
    created_at: float


@dataclass
class Session:
    token: str
    user: str
    expires_at: float


class AccountService:
    def __init__(self, store: Store, password_cost: dict | None = None,
                 session_ttl: float = SESSION_TTL_SECONDS):
        self._store = store
        self._password_cost = password_cost
        self._session_ttl = session_ttl

    def register(self, username: str, password: str) -> UserAccount:
        if not isinstance(username, str) or not _USERNAME_RE.match(username or ""):
            raise BadRequest("username must be 1-64 characters without whitespace or '/'")
        if not isinstance(password, str) or len(password) < MIN_PASSWORD_LENGTH:
            raise WeakPassword(f"password must be at least {MIN_PASSWORD_LENGTH} characters")
        store = self._store
        with store.lock:
            key = username.casefold()
            if key in store.users_by_name:
                raise UsernameTaken(f"username {username!r} is taken")
            account = UserAccount(
                id=new_id(),
                username=username,
                password=hash_password(password, self._password_cost),
                created_at=store.now(),
            )
            store.users[account.id] = account
            store.users_by_name[key] = account.id
            return account

    def create_system_account(self, username: str) -> UserAccount:
        """Built-in account with no usable password (owns the root)."""
        store = self._store
        with store.lock:
            account = UserAccount(id=new_id(), username=username, password=None,
                                  created_at=store.now())
            store.users[account.id] = account
            store.users_by_name[username.casefold()] = account.id
            return account

    def verify_credentials(self, username: str, password: str) -> str | None:
        """User id on success, None otherwise (never says which part failed)."""
        store = self._store
        with store.lock:
            user_id = store.users_by_name.get((username or "").casefold())
            account = store.users.get(user_id) if user_id else None
        if account is None or account.password is None:
            return None
        if not verify_password(password or "", account.password):
            return None
        return account.id

    def login(self, username: str, password: str) -> Session:
        user_id = self.verify_credentials(username, password)
        if user_id is None:
            raise AuthFailed("invalid username or password")
        store = self._store
        with store.lock:
            session = Session(
                token=secrets.token_urlsafe(32),
                user=user_id,
                expires_at=store.now() + self._session_ttl,
            )
            store.sessions[session.token] = session
            return session

    def authenticate(self, token: str | None) -> str:
        """Resolve a bearer token to a user id; expired tokens are purged."""
        store = self._store
        with store.lock:
            session = store.sessions.get(token or "")
            if session is None:
                raise AuthFailed("invalid or missing token")
            if session.expires_at <= store.now():
                del store.sessions[session.token]
                raise AuthFailed("session expired")
            return session.user

    def logout(self, token: str) -> None:
        with self._store.lock:
            self._store.sessions.pop(token, None)

    # -- lookups -----------------------------------------------------------------

    def get(self, user_id: str) -> UserAccount:
        account = self._store.users.get(user_id)
        if account is None:
            raise UserNotFound(f"no such user id: {user_id}")
        return account

    def by_name(self, username: str) -> UserAccount:
        user_id = self._store.users_by_name.get((username or "").casefold())
        if user_id is None:
            raise UserNotFound(f"no such user: {username}")
        return self._store.users[user_id]

    def username(self, user_id: str) -> str:
        return self.get(user_id).username

    def now(self) -> float:
        return self._store.now()
