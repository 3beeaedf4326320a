"""Mount bindings and the viewer-facing side of the relay.

A binding ties (directory, account, agent, share label) together. When a
viewer lists a directory's mounts, each binding whose agent is connected is
asked for a live listing; bindings without a live agent degrade to a single
"Unavailable" placeholder instead of failing the listing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterator

from ..authz import Right
from ..errors import AgentOffline, BadRequest, DuplicateBinding, NotFound, NotOwner, TrashedDirectory
from ..store import Store, new_id
from .protocol import validate_rel_path

if TYPE_CHECKING:
    from ..authz import Authorizer
    from ..service.accounts import AccountService
    from ..tree import TreeStore
    from .gateway import AgentGateway


class EntryKind(Enum):
    FILE = "File"
    DIR = "Dir"


class Availability(Enum):
    LIVE = "Live"
    UNAVAILABLE = "Unavailable"


@dataclass
class MountBinding:
    id: str
    directory: str
    account: str
    agent_id: str
    share_path: str  # the agent-side share label
    created_at: float


@dataclass
class RemoteEntry:
    name: str
    kind: EntryKind
    size: int
    modified: float
    availability: Availability


@dataclass
class MountEntryView:
    """A remote entry plus the binding it came from (clients need the
    binding id to fetch the file and the label to tell mounts apart)."""

    binding_id: str
    label: str
    entry: RemoteEntry


class MountService:
    def __init__(self, store: Store, tree: TreeStore, authz: Authorizer,
                 accounts: AccountService):
        self._store = store
        self._tree = tree
        self._authz = authz
        self._accounts = accounts
        self.gateway: AgentGateway | None = None  # attached when the relay port is up

    def label_for(self, binding: MountBinding) -> str:
        return f"{self._accounts.username(binding.account)}:{binding.share_path}"

    # -- binding management ----------------------------------------------------

    def bind_mount(self, dir_id: str, actor: str, agent_id: str, share_path: str) -> MountBinding:
        from ..tree import DirState

        store = self._store
        with store.lock:
            d = self._tree.require_visible(dir_id, actor)
            if d.state is not DirState.ACTIVE:
                raise TrashedDirectory("cannot mount into a trashed directory")
            if not isinstance(agent_id, str) or not agent_id:
                raise BadRequest("agent_id must be non-empty")
            if not isinstance(share_path, str) or not share_path:
                raise BadRequest("share_path must be non-empty")
            self._authz.require_right(actor, dir_id, Right.PUBLISH)
            for other in store.mounts.values():
                if (other.directory, other.account, other.agent_id, other.share_path) == \
                        (dir_id, actor, agent_id, share_path):
                    raise DuplicateBinding("identical binding already exists")
            binding = MountBinding(
                id=new_id(), directory=dir_id, account=actor,
                agent_id=agent_id, share_path=share_path, created_at=store.now(),
            )
            store.mounts[binding.id] = binding
            return binding

    def unbind_mount(self, binding_id: str, actor: str) -> None:
        store = self._store
        with store.lock:
            binding = store.mounts.get(binding_id)
            if binding is None:
                raise NotFound(f"no such binding: {binding_id}")
            directory = store.dirs.get(binding.directory)
            if binding.account != actor and (directory is None or directory.owner != actor):
                raise NotOwner("only the binding owner or the directory owner may unbind")
            del store.mounts[binding_id]

    def get_binding(self, binding_id: str) -> MountBinding:
        binding = self._store.mounts.get(binding_id)
        if binding is None:
            raise NotFound(f"no such binding: {binding_id}")
        return binding

    def bindings_for(self, dir_id: str, viewer: str | None) -> list[MountBinding]:
        store = self._store
        with store.lock:
            self._tree.require_visible(dir_id, viewer)
            self._authz.require_right(viewer, dir_id, Right.READ)
            bindings = [m for m in store.mounts.values() if m.directory == dir_id]
            bindings.sort(key=lambda m: (self.label_for(m), m.id))
            return bindings

    def is_live(self, binding: MountBinding) -> bool:
        if self.gateway is None:
            return False
        return self.gateway.live_session(binding.account, binding.agent_id) is not None

    # -- relayed operations ------------------------------------------------------

    def list_mount_entries(self, dir_id: str, viewer: str | None,
                           sub_path: str = "") -> list[MountEntryView]:
        """Merge live listings from every binding on the directory.

        The sub path is forwarded to each live agent. A binding that is
        offline or does not answer in time contributes one Unavailable
        placeholder named after its label; a binding whose share simply has
        no such sub path contributes nothing.
        """
        validate_rel_path(sub_path)
        bindings = self.bindings_for(dir_id, viewer)  # permission checks live here

        views: list[MountEntryView] = []
        for binding in bindings:
            label = self.label_for(binding)
            session = None
            if self.gateway is not None:
                session = self.gateway.live_session(binding.account, binding.agent_id)
            if session is None:
                views.append(self._placeholder(binding, label))
                continue
            result = self.gateway.request_listing(session, binding.share_path, sub_path)
            if result[0] == "ok":
                for raw in result[1]:
                    entry = _parse_entry(raw)
                    if entry is not None:
                        views.append(MountEntryView(binding_id=binding.id, label=label,
                                                    entry=entry))
            elif result[0] == "timeout":
                views.append(self._placeholder(binding, label))
            # ("error", ...) from a live agent: that share has nothing at this
            # sub path; it contributes no entries.
        return views

    def _placeholder(self, binding: MountBinding, label: str) -> MountEntryView:
        return MountEntryView(
            binding_id=binding.id,
            label=label,
            entry=RemoteEntry(name=label, kind=EntryKind.DIR, size=0,
                              modified=binding.created_at,
                              availability=Availability.UNAVAILABLE),
        )

    def fetch_mounted_file(self, dir_id: str | None, viewer: str | None,
                           binding_id: str, rel_path: str) -> Iterator[bytes]:
        """Relay one file's bytes from the agent to the caller as a stream."""
        validate_rel_path(rel_path)
        with self._store.lock:
            binding = self.get_binding(binding_id)
            if dir_id is not None and binding.directory != dir_id:
                raise NotFound(f"binding {binding_id} is not mounted on {dir_id}")
            self._tree.require_visible(binding.directory, viewer)
            self._authz.require_right(viewer, binding.directory, Right.READ)
        if self.gateway is None:
            raise AgentOffline("no agent gateway running")
        session = self.gateway.live_session(binding.account, binding.agent_id)
        if session is None:
            raise AgentOffline(f"agent {binding.agent_id} is not connected")
        return self.gateway.open_fetch(session, binding.share_path, rel_path)


def _parse_entry(raw) -> RemoteEntry | None:
    if not isinstance(raw, dict):
        return None
    name = raw.get("name")
    kind = raw.get("kind")
    if not isinstance(name, str) or not name or kind not in ("file", "dir"):
        return None
    size = raw.get("size", 0)
    modified = raw.get("modified", 0)
    if not isinstance(size, int) or isinstance(size, bool) or size < 0:
        size = 0
    if not isinstance(modified, (int, float)) or isinstance(modified, bool):
        modified = 0
    return RemoteEntry(
        name=name,
        kind=EntryKind.FILE if kind == "file" else EntryKind.DIR,
        size=0 if kind == "dir" else size,
        modified=float(modified),
        availability=Availability.LIVE,
    )
