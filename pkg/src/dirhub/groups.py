"""Per-directory group lifecycle.

Each directory doubles as a group. Public directories are open to join;
private ones queue an application the owner permits or refuses. Owners can
also kick members and blacklist users (a blacklisted user is stripped of
membership and any pending application, and holds no roles on the directory
while listed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .errors import (
    AlreadyBlacklisted,
    AlreadyMember,
    AlreadyPending,
    BadRequest,
    Blacklisted,
    NoSuchApplication,
    NotBlacklisted,
    NotFound,
    NotMember,
    OwnerCannotJoin,
    TrashedDirectory,
)

if TYPE_CHECKING:
    from .authz import Authorizer
    from .store import Store


class JoinOutcome(Enum):
    JOINED = "Joined"
    APPLICATION_PENDING = "ApplicationPending"


@dataclass
class PendingApplication:
    user: str
    applied_at: float


@dataclass
class GroupState:
    """Invariants: members and blacklist are disjoint, pending users are not
    members, and the owner is never a member."""

    directory: str
    members: set[str] = field(default_factory=set)
    pending: list[PendingApplication] = field(default_factory=list)  # FIFO
    blacklist: set[str] = field(default_factory=set)

    def is_pending(self, user: str) -> bool:
        return any(app.user == user for app in self.pending)

    def drop_pending(self, user: str) -> bool:
        before = len(self.pending)
        self.pending = [app for app in self.pending if app.user != user]
        return len(self.pending) != before


class GroupService:
    def __init__(self, store: Store, authz: Authorizer):
        self._store = store
        self._authz = authz

    def state(self, dir_id: str) -> GroupState:
        group = self._store.groups.get(dir_id)
        if group is None:
            raise NotFound(f"no such directory: {dir_id}")
        return group

    def set_visibility(self, dir_id: str, actor: str, visibility) -> None:
        from .tree import Visibility  # local import to avoid a cycle

        if isinstance(visibility, str):
            try:
                visibility = Visibility(visibility)
            except ValueError:
                raise BadRequest("visibility must be Public or Private") from None
        with self._store.lock:
            d = self._authz.require_owner(dir_id, actor)
            d.visibility = visibility  # pending applications are left untouched

    def join(self, dir_id: str, user: str) -> JoinOutcome:
        from .tree import DirState, Visibility

        store = self._store
        with store.lock:
            d = store.dirs.get(dir_id)
            if d is None:
                raise NotFound(f"no such directory: {dir_id}")
            if d.state is not DirState.ACTIVE:
                raise TrashedDirectory("directory is trashed")
            if d.owner == user:
                raise OwnerCannotJoin("the owner is not a joinable member of their own group")
            group = self.state(dir_id)
            if user in group.blacklist:
                raise Blacklisted("user is blacklisted on this directory")
            if user in group.members:
                raise AlreadyMember("already a group member")
            if group.is_pending(user):
                raise AlreadyPending("application already pending")
            if d.visibility is Visibility.PUBLIC:
                group.members.add(user)
                return JoinOutcome.JOINED
            group.pending.append(PendingApplication(user=user, applied_at=store.now()))
            return JoinOutcome.APPLICATION_PENDING

    def pending_applications(self, dir_id: str, actor: str) -> list[PendingApplication]:
        """Owner-only view of the application queue, oldest first."""
        with self._store.lock:
            self._authz.require_owner(dir_id, actor)
            return list(self.state(dir_id).pending)

    def review_application(self, dir_id: str, actor: str, applicant: str, decision: str) -> None:
        if decision not in ("Permit", "Refuse"):
            raise BadRequest("decision must be Permit or Refuse")
        with self._store.lock:
            self._authz.require_owner(dir_id, actor)
            group = self.state(dir_id)
            if not group.is_pending(applicant):
                raise NoSuchApplication(f"no pending application from {applicant}")
            group.drop_pending(applicant)
            if decision == "Permit":
                group.members.add(applicant)

    def remove_member(self, dir_id: str, actor: str, user: str) -> None:
        with self._store.lock:
            self._authz.require_owner(dir_id, actor)
            group = self.state(dir_id)
            if user not in group.members:
                raise NotMember("not a group member")
            group.members.discard(user)

    def blacklist_user(self, dir_id: str, actor: str, user: str) -> None:
        with self._store.lock:
            self._authz.require_owner(dir_id, actor)
            group = self.state(dir_id)
            if user in group.blacklist:
                raise AlreadyBlacklisted("already blacklisted")
            group.blacklist.add(user)
            group.members.discard(user)
            group.drop_pending(user)

    def unblacklist_user(self, dir_id: str, actor: str, user: str) -> None:
        with self._store.lock:
            self._authz.require_owner(dir_id, actor)
            group = self.state(dir_id)
            if user not in group.blacklist:
                raise NotBlacklisted("not blacklisted")
            group.blacklist.discard(user)
