"""The global directory tree and published articles.

One tree, rooted at "ALL". Every node is a directory with an owner, a
lifecycle state (Active/Trashed), a visibility (Public/Private group), and
its own authorization matrix. Articles are published into exactly one
directory and carry optional file attachments (stored content-addressed).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

from .authz import AuthMatrix, GrantSet, Right, default_matrix
from .errors import (
    AlreadyTrashed,
    DuplicateName,
    InvalidAttachment,
    InvalidName,
    InvalidTitle,
    NotEmpty,
    NotFound,
    NotOwner,
    NotTrashed,
    ParentNotFound,
    ParentTrashed,
    RootUndeletable,
    RootUntrashable,
    TrashedDirectory,
)
from .groups import GroupState
from .store import Store, new_id

if TYPE_CHECKING:
    from .authz import Authorizer

ROOT_NAME = "ALL"
MAX_NAME_LENGTH = 255
DEFAULT_MAX_ATTACHMENT_BYTES = 32 * 1024 * 1024
BAR_SEPARATOR = " / "


class DirState(Enum):
    ACTIVE = "Active"
    TRASHED = "Trashed"


class Visibility(Enum):
    PUBLIC = "Public"
    PRIVATE = "Private"


@dataclass
class Directory:
    id: str
    name: str
    parent: str | None  # None only for the root
    owner: str
    state: DirState
    visibility: Visibility
    matrix: AuthMatrix
    created_at: float


@dataclass
class Attachment:
    filename: str
    sha256: str
    size: int


@dataclass
class Article:
    id: str
    directory: str
    author: str
    title: str
    abstract: str
    body: str
    attachments: list[Attachment]
    published_at: float

    @property
    def url(self) -> str:
        return f"/a/{self.id}"


@dataclass
class NavigatorBar:
    """Breadcrumb from the root to a directory: ordered (id, name) pairs."""

    segments: list[tuple[str, str]]

    @property
    def text(self) -> str:
        return BAR_SEPARATOR.join(name for _, name in self.segments)


def validate_directory_name(name: str) -> None:
    if not isinstance(name, str) or not name:
        raise InvalidName("name must be non-empty")
    if name != name.strip():
        raise InvalidName("name must not have leading or trailing whitespace")
    if "/" in name:
        raise InvalidName("name must not contain '/'")
    if len(name) > MAX_NAME_LENGTH:
        raise InvalidName(f"name longer than {MAX_NAME_LENGTH} characters")


class TreeStore:
    def __init__(self, store: Store, authz: Authorizer,
                 max_attachment_bytes: int = DEFAULT_MAX_ATTACHMENT_BYTES):
        self._store = store
        self._authz = authz
        self.max_attachment_bytes = max_attachment_bytes

    # -- lookups ---------------------------------------------------------------

    def get(self, dir_id: str) -> Directory:
        d = self._store.dirs.get(dir_id)
        if d is None:
            raise NotFound(f"no such directory: {dir_id}")
        return d

    def chain(self, dir_id: str) -> list[Directory]:
        """Directories from the root down to ``dir_id``."""
        nodes = []
        d = self.get(dir_id)
        while True:
            nodes.append(d)
            if d.parent is None:
                break
            d = self.get(d.parent)
        nodes.reverse()
        return nodes

    def is_visible(self, dir_id: str, viewer: str | None) -> bool:
        """A directory is hidden when any node on its root chain is trashed,
        unless the viewer owns every trashed node on that chain."""
        if dir_id not in self._store.dirs:
            return False
        return all(
            d.state is DirState.ACTIVE or d.owner == viewer
            for d in self.chain(dir_id)
        )

    def require_visible(self, dir_id: str, viewer: str | None) -> Directory:
        d = self.get(dir_id)
        if not self.is_visible(dir_id, viewer):
            # Hidden subtrees look like missing directories to outsiders.
            raise NotFound(f"no such directory: {dir_id}")
        return d

    # -- directory lifecycle -----------------------------------------------------

    def create_directory(self, parent: str, name: str, creator: str) -> Directory:
        store = self._store
        with store.lock:
            if parent not in store.dirs:
                raise ParentNotFound(f"no such directory: {parent}")
            if not self.is_visible(parent, creator):
                raise ParentNotFound(f"no such directory: {parent}")
            parent_dir = store.dirs[parent]
            if parent_dir.state is not DirState.ACTIVE:
                raise ParentTrashed("parent directory is trashed")
            validate_directory_name(name)
            self._authz.require_right(creator, parent, Right.CREATE_SUB_DIR)
            siblings = store.children.setdefault(parent, {})
            key = name.casefold()
            if key in siblings:
                raise DuplicateName(f"a sibling named {name!r} already exists")
            d = Directory(
                id=new_id(),
                name=name,
                parent=parent,
                owner=creator,
                state=DirState.ACTIVE,
                visibility=Visibility.PUBLIC,
                matrix=default_matrix(),
                created_at=store.now(),
            )
            store.dirs[d.id] = d
            siblings[key] = d.id
            store.children[d.id] = {}
            store.groups[d.id] = GroupState(directory=d.id)
            store.grants[d.id] = GrantSet()
            store.articles_by_dir[d.id] = []
            return d

    def delete_directory(self, dir_id: str, actor: str) -> None:
        store = self._store
        with store.lock:
            d = self.get(dir_id)
            if d.parent is None:
                raise RootUndeletable("the root directory cannot be deleted")
            if d.owner != actor:
                raise NotOwner("only the owner may delete a directory")
            group = store.groups[dir_id]
            if group.members:
                raise NotEmpty("members")
            if store.articles_by_dir.get(dir_id):
                raise NotEmpty("articles")
            if store.children.get(dir_id):
                raise NotEmpty("children")
            del store.dirs[dir_id]
            store.children[d.parent].pop(d.name.casefold(), None)
            store.children.pop(dir_id, None)
            store.groups.pop(dir_id, None)
            store.grants.pop(dir_id, None)
            store.articles_by_dir.pop(dir_id, None)
            # Bindings hang off the directory; they go with it.
            stale = [b for b, m in store.mounts.items() if m.directory == dir_id]
            for b in stale:
                del store.mounts[b]

    def trash_directory(self, dir_id: str, actor: str) -> None:
        with self._store.lock:
            d = self.get(dir_id)
            if d.parent is None:
                raise RootUntrashable("the root directory cannot be trashed")
            if d.owner != actor:
                raise NotOwner("only the owner may trash a directory")
            if d.state is DirState.TRASHED:
                raise AlreadyTrashed("directory already trashed")
            d.state = DirState.TRASHED

    def restore_directory(self, dir_id: str, actor: str) -> None:
        with self._store.lock:
            d = self.get(dir_id)
            if d.owner != actor:
                raise NotOwner("only the owner may restore a directory")
            if d.state is not DirState.TRASHED:
                raise NotTrashed("directory is not trashed")
            if d.parent is not None and self.get(d.parent).state is not DirState.ACTIVE:
                raise ParentTrashed("parent directory is trashed")
            d.state = DirState.ACTIVE

    # -- navigation ---------------------------------------------------------------

    def navigator_path(self, dir_id: str) -> NavigatorBar:
        with self._store.lock:
            return NavigatorBar(segments=[(d.id, d.name) for d in self.chain(dir_id)])

    def domain_tool_view(self, dir_id: str, viewer: str | None) -> tuple[Directory, list[Directory]]:
        """Current directory plus the children this viewer may see.

        A child is listed when the viewer holds ShowDir on it and it is
        active; owners additionally see their own trashed children (so they
        can restore them)."""
        with self._store.lock:
            d = self.require_visible(dir_id, viewer)
            self._authz.require_right(viewer, dir_id, Right.SHOW_DIR)
            return d, self._visible_children(dir_id, viewer)

    def list_children(self, dir_id: str, viewer: str | None) -> list[Directory]:
        return self.domain_tool_view(dir_id, viewer)[1]

    def _visible_children(self, dir_id: str, viewer: str | None) -> list[Directory]:
        store = self._store
        children = []
        for child_id in store.children.get(dir_id, {}).values():
            child = store.dirs[child_id]
            if child.state is not DirState.ACTIVE and child.owner != viewer:
                continue
            if self._authz.check_right(viewer, child_id, Right.SHOW_DIR):
                children.append(child)
        children.sort(key=lambda c: (c.name.casefold(), c.id))
        return children

    # -- articles --------------------------------------------------------------------

    def publish_article(
        self,
        dir_id: str,
        author: str,
        title: str,
        abstract: str = "",
        body: str = "",
        attachments: Sequence[tuple[str, bytes]] = (),
    ) -> Article:
        store = self._store
        with store.lock:
            d = self.require_visible(dir_id, author)
            if d.state is not DirState.ACTIVE:
                raise TrashedDirectory("cannot publish into a trashed directory")
            self._authz.require_right(author, dir_id, Right.PUBLISH)
            if not isinstance(title, str) or not title.strip():
                raise InvalidTitle("title must be non-empty")
            attached = self._ingest_attachments(attachments)
            article = Article(
                id=new_id(),
                directory=dir_id,
                author=author,
                title=title,
                abstract=abstract or "",
                body=body or "",
                attachments=attached,
                published_at=store.now(),
            )
            store.articles[article.id] = article
            store.articles_by_dir.setdefault(dir_id, []).append(article.id)
            return article

    def _ingest_attachments(self, attachments: Sequence[tuple[str, bytes]]) -> list[Attachment]:
        seen: set[str] = set()
        out: list[Attachment] = []
        for filename, content in attachments:
            if not filename or not isinstance(filename, str):
                raise InvalidAttachment("attachment filename must be non-empty")
            if filename in seen:
                raise InvalidAttachment(f"duplicate attachment filename: {filename}")
            if len(content) > self.max_attachment_bytes:
                raise InvalidAttachment(
                    f"attachment {filename!r} exceeds {self.max_attachment_bytes} bytes"
                )
            seen.add(filename)
            digest = hashlib.sha256(content).hexdigest()
            self._store.blobs[digest] = bytes(content)
            out.append(Attachment(filename=filename, sha256=digest, size=len(content)))
        return out

    def list_articles(self, dir_id: str, viewer: str | None) -> list[Article]:
        """Articles of one directory, newest first (ties broken by id)."""
        store = self._store
        with store.lock:
            self.require_visible(dir_id, viewer)
            self._authz.require_right(viewer, dir_id, Right.READ)
            articles = [store.articles[a] for a in store.articles_by_dir.get(dir_id, [])]
            articles.sort(key=lambda a: (-a.published_at, a.id))
            return articles

    def get_article(self, article_id: str, viewer: str | None) -> Article:
        store = self._store
        with store.lock:
            article = store.articles.get(article_id)
            if article is None:
                raise NotFound(f"no such article: {article_id}")
            self.require_visible(article.directory, viewer)
            self._authz.require_right(viewer, article.directory, Right.READ)
            return article

    def get_attachment(self, article_id: str, filename: str, viewer: str | None) -> bytes:
        with self._store.lock:
            article = self.get_article(article_id, viewer)
            for att in article.attachments:
                if att.filename == filename:
                    return self._store.blobs[att.sha256]
            raise NotFound(f"no attachment named {filename!r}")
