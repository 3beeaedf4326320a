"""Service facade: one Hub wires the store and every subsystem together.

A fresh Hub boots with the global root directory "ALL", owned by a built-in
system account that cannot log in. The root is undeletable and untrashable
and its matrix lets any signed-in user see it and create top-level
directories, so everyone shares one common tree.
"""

from __future__ import annotations

import time
from typing import Callable

from .authz import Authorizer, GrantSet, root_matrix
from .groups import GroupService, GroupState
from .relay.service import MountService
from .search import SearchService
from .service import persistence
from .service.accounts import AccountService
from .store import Store, new_id
from .tree import Directory, DirState, ROOT_NAME, TreeStore, Visibility

SYSTEM_USERNAME = "system"


class Hub:
    def __init__(self, store: Store | None = None,
                 clock: Callable[[], float] = time.time,
                 password_cost: dict | None = None,
                 session_ttl: float | None = None):
        self.store = store if store is not None else Store(clock=clock)
        account_kwargs = {"password_cost": password_cost}
        if session_ttl is not None:
            account_kwargs["session_ttl"] = session_ttl
        self.accounts = AccountService(self.store, **account_kwargs)
        self.authz = Authorizer(self.store)
        self.tree = TreeStore(self.store, self.authz)
        self.groups = GroupService(self.store, self.authz)
        self.search = SearchService(self.store, self.tree, self.authz)
        self.mounts = MountService(self.store, self.tree, self.authz, self.accounts)
        if self.store.root_id is None:
            self._bootstrap()

    def _bootstrap(self) -> None:
        store = self.store
        with store.lock:
            system = self.accounts.create_system_account(SYSTEM_USERNAME)
            root = Directory(
                id=new_id(),
                name=ROOT_NAME,
                parent=None,
                owner=system.id,
                state=DirState.ACTIVE,
                visibility=Visibility.PUBLIC,
                matrix=root_matrix(),
                created_at=store.now(),
            )
            store.dirs[root.id] = root
            store.children[root.id] = {}
            store.groups[root.id] = GroupState(directory=root.id)
            store.grants[root.id] = GrantSet()
            store.articles_by_dir[root.id] = []
            store.root_id = root.id
            store.system_user_id = system.id

    @property
    def root_id(self) -> str:
        assert self.store.root_id is not None
        return self.store.root_id

    # -- persistence ---------------------------------------------------------------

    def save(self, data_dir: str) -> str:
        return persistence.save_state(self.store, data_dir)

    @classmethod
    def load(cls, data_dir: str, clock: Callable[[], float] = time.time,
             password_cost: dict | None = None) -> "Hub":
        store = persistence.load_state(data_dir, clock=clock)
        return cls(store=store, password_cost=password_cost)
