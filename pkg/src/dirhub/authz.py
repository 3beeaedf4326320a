"""Per-directory authorization.

Every directory carries a 5-role x 4-right boolean matrix. A user holds a
right on a directory iff at least one of the roles they currently hold has
that right checked (plain OR over held roles). Roles are derived live from
ownership, group membership, grants, and the blacklist; nothing is cached
or snapshotted.

Administrative operations (replacing the matrix, granting, group audits,
visibility, delete/trash) are owner-gated and bypass the matrix entirely,
so an all-false matrix can never lock the owner out of administration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import (
    AlreadyGranted,
    NotFound,
    NotGranted,
    NotOwner,
    PermissionDenied,
    UserNotFound,
)

if TYPE_CHECKING:
    from .store import Store
    from .tree import Directory


class Role(Enum):
    DIR_CREATOR = "DirCreator"
    THIS_GROUP = "thisGroup"
    GRANT_GROUP = "grantGroup"
    GRANT_USER = "grantUser"
    ANY_USER = "AnyUser"


class Right(Enum):
    PUBLISH = "Publish"
    READ = "Read"
    CREATE_SUB_DIR = "CreateSubDir"
    SHOW_DIR = "ShowDir"


ROLES: tuple[Role, ...] = tuple(Role)
RIGHTS: tuple[Right, ...] = tuple(Right)

_ROLE_INDEX = {role: i for i, role in enumerate(ROLES)}
_RIGHT_INDEX = {right: i for i, right in enumerate(RIGHTS)}

_ROLE_BY_WIRE = {role.value: role for role in ROLES}
_RIGHT_BY_WIRE = {right.value: right for right in RIGHTS}


def bit_position(role: Role, right: Right) -> int:
    """Canonical cell position in the 20-bit packed grid (public layout:
    ``role_index * 4 + right_index`` in declaration order)."""
    return _ROLE_INDEX[role] * len(RIGHTS) + _RIGHT_INDEX[right]


def role_mask(roles: Iterable[Role], right: Right) -> int:
    """Bitmask selecting the cells of ``right`` across the given roles."""
    mask = 0
    for role in roles:
        mask |= 1 << bit_position(role, right)
    return mask


class AuthMatrix:
    """Immutable 20-cell boolean grid indexed by (Role, Right).

    Stored as a 20-bit integer; replacing a directory's matrix is a single
    reference assignment, so checks never observe a half-updated grid.
    """

    __slots__ = ("_bits",)

    NUM_BITS = len(ROLES) * len(RIGHTS)

    def __init__(self, bits: int = 0):
        if not 0 <= bits < (1 << self.NUM_BITS):
            raise ValueError(f"matrix bits out of range: {bits!r}")
        self._bits = bits

    @property
    def bits(self) -> int:
        return self._bits

    @classmethod
    def from_bits(cls, bits: int) -> AuthMatrix:
        return cls(bits)

    @classmethod
    def from_cells(cls, cells: Mapping[tuple[Role, Right], bool]) -> AuthMatrix:
        bits = 0
        for (role, right), value in cells.items():
            if value:
                bits |= 1 << bit_position(role, right)
        return cls(bits)

    @classmethod
    def from_wire(cls, payload) -> AuthMatrix:
        """Parse the API shape: {role name: {right name: bool}} with all 20
        cells present and exact role/right spellings."""
        if not isinstance(payload, dict) or set(payload) != set(_ROLE_BY_WIRE):
            raise ValueError("matrix must map exactly the five role names")
        bits = 0
        for role_name, row in payload.items():
            if not isinstance(row, dict) or set(row) != set(_RIGHT_BY_WIRE):
                raise ValueError(f"row {role_name!r} must map exactly the four right names")
            for right_name, value in row.items():
                if not isinstance(value, bool):
                    raise ValueError(f"cell {role_name}/{right_name} must be a boolean")
                if value:
                    bits |= 1 << bit_position(_ROLE_BY_WIRE[role_name], _RIGHT_BY_WIRE[right_name])
        return cls(bits)

    def to_wire(self) -> dict[str, dict[str, bool]]:
        return {
            role.value: {right.value: self.get(role, right) for right in RIGHTS}
            for role in ROLES
        }

    def get(self, role: Role, right: Right) -> bool:
        return bool(self._bits >> bit_position(role, right) & 1)

    def allows(self, roles: Iterable[Role], right: Right) -> bool:
        """OR rule: true iff any held role has the right checked."""
        return bool(self._bits & role_mask(roles, right))

    def with_cell(self, role: Role, right: Right, value: bool) -> AuthMatrix:
        bit = 1 << bit_position(role, right)
        return AuthMatrix(self._bits | bit if value else self._bits & ~bit)

    def __eq__(self, other) -> bool:
        return isinstance(other, AuthMatrix) and other._bits == self._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __repr__(self) -> str:
        return f"AuthMatrix(bits=0b{self._bits:020b})"


def default_matrix() -> AuthMatrix:
    """Matrix given to newly created directories: the creator gets everything,
    group members everything but sub-directory creation, everyone else may
    read and see the directory; grant rows start empty."""
    cells = {(role, right): False for role in ROLES for right in RIGHTS}
    for right in RIGHTS:
        cells[Role.DIR_CREATOR, right] = True
    for right in (Right.PUBLISH, Right.READ, Right.SHOW_DIR):
        cells[Role.THIS_GROUP, right] = True
    for right in (Right.READ, Right.SHOW_DIR):
        cells[Role.ANY_USER, right] = True
    return AuthMatrix.from_cells(cells)


def root_matrix() -> AuthMatrix:
    """The global root additionally lets every signed-in user create
    top-level directories."""
    return default_matrix().with_cell(Role.ANY_USER, Right.CREATE_SUB_DIR, True)


@dataclass
class GrantSet:
    """Individually granted users and granted groups (a group is identified
    by its directory)."""

    users: set[str] = field(default_factory=set)
    groups: set[str] = field(default_factory=set)


class Authorizer:
    def __init__(self, store: Store):
        self._store = store

    def _dir(self, dir_id: str) -> Directory:
        d = self._store.dirs.get(dir_id)
        if d is None:
            raise NotFound(f"no such directory: {dir_id}")
        return d

    def roles_of(self, user: str | None, dir_id: str) -> frozenset[Role]:
        """Roles ``user`` currently holds toward ``dir_id``.

        Unauthenticated callers hold no roles anywhere. A user blacklisted on
        the directory holds no roles on it at all, AnyUser included. Granted
        groups are evaluated live: membership changes after the grant count.
        """
        store = self._store
        with store.lock:
            d = self._dir(dir_id)
            if user is None:
                return frozenset()
            group = store.groups.get(dir_id)
            if group is not None and user in group.blacklist:
                return frozenset()
            roles = {Role.ANY_USER}
            if d.owner == user:
                roles.add(Role.DIR_CREATOR)
            if group is not None and user in group.members:
                roles.add(Role.THIS_GROUP)
            grants = store.grants.get(dir_id)
            if grants is not None:
                if user in grants.users:
                    roles.add(Role.GRANT_USER)
                for group_dir in grants.groups:
                    member_group = store.groups.get(group_dir)
                    if (
                        member_group is not None
                        and user in member_group.members
                        and user not in member_group.blacklist
                    ):
                        roles.add(Role.GRANT_GROUP)
                        break
            return frozenset(roles)

    def check_right(self, user: str | None, dir_id: str, right: Right) -> bool:
        with self._store.lock:
            d = self._dir(dir_id)
            return d.matrix.allows(self.roles_of(user, dir_id), right)

    def require_right(self, user: str | None, dir_id: str, right: Right) -> None:
        if not self.check_right(user, dir_id, right):
            raise PermissionDenied(right=right.value)

    def require_owner(self, dir_id: str, actor: str | None) -> Directory:
        d = self._dir(dir_id)
        if d.owner != actor:
            raise NotOwner("only the directory owner may do this")
        return d

    # -- owner-gated administration (bypasses the matrix) --------------------

    def set_matrix(self, dir_id: str, actor: str, matrix: AuthMatrix) -> None:
        with self._store.lock:
            d = self.require_owner(dir_id, actor)
            d.matrix = matrix

    def grant_user(self, dir_id: str, actor: str, user: str) -> None:
        store = self._store
        with store.lock:
            self.require_owner(dir_id, actor)
            if user not in store.users:
                raise UserNotFound(f"no such user: {user}")
            grants = store.grants[dir_id]
            if user in grants.users:
                raise AlreadyGranted("user already granted")
            grants.users.add(user)

    def revoke_user(self, dir_id: str, actor: str, user: str) -> None:
        store = self._store
        with store.lock:
            self.require_owner(dir_id, actor)
            grants = store.grants[dir_id]
            if user not in grants.users:
                raise NotGranted("user not granted")
            grants.users.discard(user)

    def grant_group(self, dir_id: str, actor: str, group_dir: str) -> None:
        store = self._store
        with store.lock:
            self.require_owner(dir_id, actor)
            if group_dir not in store.dirs:
                raise NotFound(f"no such directory: {group_dir}")
            grants = store.grants[dir_id]
            if group_dir in grants.groups:
                raise AlreadyGranted("group already granted")
            grants.groups.add(group_dir)

    def revoke_group(self, dir_id: str, actor: str, group_dir: str) -> None:
        store = self._store
        with store.lock:
            self.require_owner(dir_id, actor)
            grants = store.grants[dir_id]
            if group_dir not in grants.groups:
                raise NotGranted("group not granted")
            grants.groups.discard(group_dir)

    def grants_of(self, dir_id: str, actor: str) -> GrantSet:
        with self._store.lock:
            self.require_owner(dir_id, actor)
            g = self._store.grants[dir_id]
            return GrantSet(users=set(g.users), groups=set(g.groups))
