"""Single-file snapshot persistence.

The whole service state serializes to one JSON document carrying a schema
version and a checksum over the canonical state encoding; attachment bytes
live beside it, content-addressed by sha256. Writes go to a temp file in
the same directory and land with an atomic rename, so a crash mid-save
leaves the previous snapshot intact.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from typing import Callable

from ..authz import AuthMatrix, GrantSet
from ..errors import CorruptSnapshot, SchemaVersionMismatch
from ..groups import GroupState, PendingApplication
from ..relay.service import MountBinding
from ..store import Store
from ..tree import Article, Attachment, Directory, DirState, Visibility
from .accounts import UserAccount
from .passwords import PasswordRecord

SCHEMA_VERSION = 1
SNAPSHOT_NAME = "snapshot.json"
BLOBS_DIR = "blobs"


def _canonical(state: dict) -> bytes:
    return json.dumps(state, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def encode_state(store: Store) -> dict:
    with store.lock:
        users = [
            {
                "id": u.id,
                "username": u.username,
                "password": u.password.to_dict() if u.password else None,
                "created_at": u.created_at,
            }
            for u in sorted(store.users.values(), key=lambda u: u.id)
        ]
        dirs = [
            {
                "id": d.id,
                "name": d.name,
                "parent": d.parent,
                "owner": d.owner,
                "state": d.state.value,
                "visibility": d.visibility.value,
                "matrix": d.matrix.to_wire(),
                "created_at": d.created_at,
            }
            for d in sorted(store.dirs.values(), key=lambda d: d.id)
        ]
        articles = [
            {
                "id": a.id,
                "directory": a.directory,
                "author": a.author,
                "title": a.title,
                "abstract": a.abstract,
                "body": a.body,
                "attachments": [
                    {"filename": att.filename, "sha256": att.sha256, "size": att.size}
                    for att in a.attachments
                ],
                "published_at": a.published_at,
            }
            for a in sorted(store.articles.values(), key=lambda a: a.id)
        ]
        groups = [
            {
                "directory": g.directory,
                "members": sorted(g.members),
                "pending": [{"user": p.user, "applied_at": p.applied_at} for p in g.pending],
                "blacklist": sorted(g.blacklist),
            }
            for g in sorted(store.groups.values(), key=lambda g: g.directory)
        ]
        grants = [
            {"directory": dir_id, "users": sorted(g.users), "groups": sorted(g.groups)}
            for dir_id, g in sorted(store.grants.items())
        ]
        mounts = [
            {
                "id": m.id,
                "directory": m.directory,
                "account": m.account,
                "agent_id": m.agent_id,
                "share_path": m.share_path,
                "created_at": m.created_at,
            }
            for m in sorted(store.mounts.values(), key=lambda m: m.id)
        ]
        return {
            "users": users,
            "dirs": dirs,
            "articles": articles,
            "groups": groups,
            "grants": grants,
            "mounts": mounts,
            "root_id": store.root_id,
            "system_user_id": store.system_user_id,
        }


def decode_state(state: dict, clock: Callable[[], float] = time.time) -> Store:
    store = Store(clock=clock)
    try:
        for u in state["users"]:
            account = UserAccount(
                id=u["id"],
                username=u["username"],
                password=PasswordRecord.from_dict(u["password"]) if u["password"] else None,
                created_at=u["created_at"],
            )
            store.users[account.id] = account
            store.users_by_name[account.username.casefold()] = account.id
        for d in state["dirs"]:
            directory = Directory(
                id=d["id"],
                name=d["name"],
                parent=d["parent"],
                owner=d["owner"],
                state=DirState(d["state"]),
                visibility=Visibility(d["visibility"]),
                matrix=AuthMatrix.from_wire(d["matrix"]),
                created_at=d["created_at"],
            )
            store.dirs[directory.id] = directory
            store.children.setdefault(directory.id, {})
            store.articles_by_dir.setdefault(directory.id, [])
        for directory in store.dirs.values():
            if directory.parent is not None:
                store.children[directory.parent][directory.name.casefold()] = directory.id
        for a in state["articles"]:
            article = Article(
                id=a["id"],
                directory=a["directory"],
                author=a["author"],
                title=a["title"],
                abstract=a["abstract"],
                body=a["body"],
                attachments=[
                    Attachment(filename=att["filename"], sha256=att["sha256"], size=att["size"])
                    for att in a["attachments"]
                ],
                published_at=a["published_at"],
            )
            store.articles[article.id] = article
        for dir_id in store.dirs:
            ids = [a.id for a in store.articles.values() if a.directory == dir_id]
            ids.sort(key=lambda i: (store.articles[i].published_at, i))
            store.articles_by_dir[dir_id] = ids
        for g in state["groups"]:
            store.groups[g["directory"]] = GroupState(
                directory=g["directory"],
                members=set(g["members"]),
                pending=[PendingApplication(user=p["user"], applied_at=p["applied_at"])
                         for p in g["pending"]],
                blacklist=set(g["blacklist"]),
            )
        for g in state["grants"]:
            store.grants[g["directory"]] = GrantSet(users=set(g["users"]),
                                                    groups=set(g["groups"]))
        for m in state["mounts"]:
            store.mounts[m["id"]] = MountBinding(
                id=m["id"],
                directory=m["directory"],
                account=m["account"],
                agent_id=m["agent_id"],
                share_path=m["share_path"],
                created_at=m["created_at"],
            )
        store.root_id = state["root_id"]
        store.system_user_id = state["system_user_id"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptSnapshot(f"snapshot state malformed: {exc}") from exc
    if store.root_id not in store.dirs:
        raise CorruptSnapshot("snapshot has no root directory")
    return store


def save_state(store: Store, data_dir: str) -> str:
    """Write blobs then the snapshot; returns the snapshot path."""
    os.makedirs(data_dir, exist_ok=True)
    blob_dir = os.path.join(data_dir, BLOBS_DIR)
    os.makedirs(blob_dir, exist_ok=True)

    state = encode_state(store)
    with store.lock:
        blobs = dict(store.blobs)
    for digest, content in blobs.items():
        blob_path = os.path.join(blob_dir, digest)
        if not os.path.exists(blob_path):
            fd, tmp = tempfile.mkstemp(dir=blob_dir, prefix=".blob-")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(content)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, blob_path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise

    payload = _canonical(state)
    document = {
        "schema": SCHEMA_VERSION,
        "sha256": hashlib.sha256(payload).hexdigest(),
        "state": state,
    }
    path = os.path.join(data_dir, SNAPSHOT_NAME)
    fd, tmp = tempfile.mkstemp(dir=data_dir, prefix=".snapshot-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(document, fh, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    try:
        dir_fd = os.open(data_dir, os.O_DIRECTORY)
        try:
            os.fsync(dir_fd)
        finally:
            os.close(dir_fd)
    except OSError:
        pass
    return path


def load_state(data_dir: str, clock: Callable[[], float] = time.time) -> Store:
    path = os.path.join(data_dir, SNAPSHOT_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptSnapshot(f"cannot read snapshot: {exc}") from exc
    if not isinstance(document, dict) or "schema" not in document:
        raise CorruptSnapshot("snapshot missing schema marker")
    if document["schema"] != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"snapshot schema {document['schema']!r}, this build reads {SCHEMA_VERSION}")
    state = document.get("state")
    digest = document.get("sha256")
    if not isinstance(state, dict) or not isinstance(digest, str):
        raise CorruptSnapshot("snapshot missing state or checksum")
    if hashlib.sha256(_canonical(state)).hexdigest() != digest:
        raise CorruptSnapshot("snapshot checksum mismatch")

    store = decode_state(state, clock=clock)

    blob_dir = os.path.join(data_dir, BLOBS_DIR)
    needed: set[str] = set()
    for article in store.articles.values():
        for att in article.attachments:
            needed.add(att.sha256)
    for digest in needed:
        blob_path = os.path.join(blob_dir, digest)
        try:
            with open(blob_path, "rb") as fh:
                content = fh.read()
        except OSError as exc:
            raise CorruptSnapshot(f"missing attachment blob {digest}: {exc}") from exc
        if hashlib.sha256(content).hexdigest() != digest:
            raise CorruptSnapshot(f"attachment blob {digest} does not match its hash")
        store.blobs[digest] = content
    return store
