"""Shared mutable state for one service instance.

All writes happen under ``lock`` (single-writer contract: one mutation is
visible atomically). Readers take the same lock briefly to get a consistent
view; nothing holds it across network I/O.
"""

from __future__ import annotations

import threading
import time
import uuid
from typing import TYPE_CHECKING, Callable

if TYPE_CHECKING:
    from .authz import GrantSet
    from .groups import GroupState
    from .relay.service import MountBinding
    from .service.accounts import Session, UserAccount
    from .tree import Article, Directory


def new_id() -> str:
    """Opaque unique identifier; never reused (uuid4)."""
    return uuid.uuid4().hex


class Store:
    def __init__(self, clock: Callable[[], float] = time.time):
        self.clock = clock
        self.lock = threading.RLock()

        self.users: dict[str, UserAccount] = {}
        self.users_by_name: dict[str, str] = {}  # casefolded username -> user id

        self.dirs: dict[str, Directory] = {}
        self.children: dict[str, dict[str, str]] = {}  # dir id -> {casefolded name: child id}

        self.articles: dict[str, Article] = {}
        self.articles_by_dir: dict[str, list[str]] = {}

        self.groups: dict[str, GroupState] = {}
        self.grants: dict[str, GrantSet] = {}

        self.mounts: dict[str, MountBinding] = {}
        self.blobs: dict[str, bytes] = {}  # sha256 hex -> attachment bytes

        self.sessions: dict[str, Session] = {}  # ephemeral, never persisted

        self.root_id: str | None = None
        self.system_user_id: str | None = None

    def now(self) -> float:
        return self.clock()
