"""Shared scenario builders used across test modules."""

from __future__ import annotations

import random

from dirhub.authz import Right, Role, default_matrix

COURSE_NAME = "Class(2017-2018-1)ZSTU"
COURSE_SUBDIRS = [
    "help",
    "homework",
    "materials",
    "notice",
    "lecture materials",
    "student homework",
    "Exam and Test",
    "lecture notes",
]


def build_course_tree(hub, teacher: str) -> dict:
    """Teacher's course layout: ALL / computer / Operating System / <course>
    with the standard eight subdirectories."""
    computer = hub.tree.create_directory(hub.root_id, "computer", teacher)
    os_dir = hub.tree.create_directory(computer.id, "Operating System", teacher)
    course = hub.tree.create_directory(os_dir.id, COURSE_NAME, teacher)
    subdirs = {
        name: hub.tree.create_directory(course.id, name, teacher)
        for name in COURSE_SUBDIRS
    }
    return {
        "computer": computer,
        "os": os_dir,
        "course": course,
        "subdirs": subdirs,
    }


def open_student_homework(hub, teacher: str, fixture: dict) -> None:
    """Let joined students create their own directories under
    'student homework'."""
    target = fixture["subdirs"]["student homework"]
    hub.authz.set_matrix(
        target.id, teacher,
        default_matrix().with_cell(Role.THIS_GROUP, Right.CREATE_SUB_DIR, True),
    )


def build_random_tree(hub, owner: str, n_dirs: int, rng: random.Random) -> list:
    """Random tree of n_dirs nodes under the root; returns the directories."""
    dirs = []
    for i in range(n_dirs):
        parent = rng.choice(dirs).id if dirs and rng.random() < 0.8 else hub.root_id
        dirs.append(hub.tree.create_directory(parent, f"node-{i}", owner))
    return dirs


class RandomOpMachine:
    """Drives a hub with random operations, swallowing expected domain errors.

    Used to grow arbitrary-but-valid states for round-trip and invariant
    testing. Deterministic for a given seed and op count.
    """

    OPS = (
        "create", "create", "create", "create",
        "publish", "publish",
        "join", "join",
        "trash", "restore", "delete",
        "kick", "blacklist", "unblacklist", "review",
        "visibility", "matrix", "grant_user", "revoke_user", "grant_group",
        "bind", "unbind",
    )

    def __init__(self, hub, user_ids, rng: random.Random):
        from dirhub.errors import ApiError

        self.hub = hub
        self.users = list(user_ids)
        self.rng = rng
        self.counter = 0
        self._ApiError = ApiError

    def _dirs(self):
        return list(self.hub.store.dirs)

    def step(self):
        rng = self.rng
        hub = self.hub
        op = rng.choice(self.OPS)
        user = rng.choice(self.users)
        dir_id = rng.choice(self._dirs())
        self.counter += 1
        try:
            if op == "create":
                # mostly under parents where creation can actually succeed,
                # or the tree never grows past the root
                if rng.random() < 0.8:
                    candidates = [i for i, d in hub.store.dirs.items()
                                  if d.owner == user or i == hub.root_id]
                    dir_id = rng.choice(candidates)
                hub.tree.create_directory(dir_id, f"d{self.counter}", user)
            elif op == "publish":
                attachments = []
                if rng.random() < 0.3:
                    attachments = [(f"f{self.counter}.bin",
                                    rng.randbytes(rng.randrange(0, 64)))]
                hub.tree.publish_article(dir_id, user, f"title {self.counter}",
                                         f"abstract {self.counter}", "body",
                                         attachments)
            elif op == "join":
                hub.groups.join(dir_id, user)
            elif op == "trash":
                hub.tree.trash_directory(dir_id, user)
            elif op == "restore":
                hub.tree.restore_directory(dir_id, user)
            elif op == "delete":
                hub.tree.delete_directory(dir_id, user)
            elif op == "kick":
                hub.groups.remove_member(dir_id, user, rng.choice(self.users))
            elif op == "blacklist":
                hub.groups.blacklist_user(dir_id, user, rng.choice(self.users))
            elif op == "unblacklist":
                hub.groups.unblacklist_user(dir_id, user, rng.choice(self.users))
            elif op == "review":
                decision = "Permit" if rng.random() < 0.7 else "Refuse"
                hub.groups.review_application(dir_id, user, rng.choice(self.users), decision)
            elif op == "visibility":
                hub.groups.set_visibility(dir_id, user,
                                          rng.choice(["Public", "Private"]))
            elif op == "matrix":
                from dirhub.authz import AuthMatrix
                hub.authz.set_matrix(dir_id, user, AuthMatrix.from_bits(rng.getrandbits(20)))
            elif op == "grant_user":
                hub.authz.grant_user(dir_id, user, rng.choice(self.users))
            elif op == "revoke_user":
                hub.authz.revoke_user(dir_id, user, rng.choice(self.users))
            elif op == "grant_group":
                hub.authz.grant_group(dir_id, user, rng.choice(self._dirs()))
            elif op == "bind":
                hub.mounts.bind_mount(dir_id, user, f"agent-{rng.randrange(3)}",
                                      f"share-{rng.randrange(3)}")
            elif op == "unbind":
                mounts = list(hub.store.mounts)
                if mounts:
                    hub.mounts.unbind_mount(rng.choice(mounts), user)
        except self._ApiError:
            pass

    def run(self, n_ops: int):
        for _ in range(n_ops):
            self.step()


def observable_tree(hub, include_ids=False, include_times=True) -> dict:
    """Id-free (by default) recursive dump of everything observable, for
    equality comparisons between two states."""
    store = hub.store
    username = hub.accounts.username

    def dump_dir(dir_id):
        d = store.dirs[dir_id]
        group = store.groups[dir_id]
        grants = store.grants[dir_id]
        articles = [store.articles[a] for a in store.articles_by_dir.get(dir_id, [])]
        articles.sort(key=lambda a: (a.published_at, a.id))
        node = {
            "name": d.name,
            "owner": username(d.owner),
            "state": d.state.value,
            "visibility": d.visibility.value,
            "matrix": d.matrix.to_wire(),
            "members": sorted(username(u) for u in group.members),
            "pending": [username(p.user) for p in group.pending],
            "blacklist": sorted(username(u) for u in group.blacklist),
            "granted_users": sorted(username(u) for u in grants.users),
            "granted_groups": sorted(store.dirs[g].name for g in grants.groups
                                     if g in store.dirs),
            "articles": [
                {
                    "title": a.title,
                    "abstract": a.abstract,
                    "body": a.body,
                    "author": username(a.author),
                    "attachments": [(att.filename, att.sha256, att.size)
                                    for att in a.attachments],
                    **({"published_at": a.published_at} if include_times else {}),
                }
                for a in articles
            ],
            "mounts": sorted(
                (username(m.account), m.agent_id, m.share_path)
                for m in store.mounts.values() if m.directory == dir_id
            ),
            "children": {
                store.dirs[cid].name: dump_dir(cid)
                for cid in store.children.get(dir_id, {}).values()
            },
        }
        if include_ids:
            node["id"] = dir_id
        if include_times:
            node["created_at"] = d.created_at
        return node

    return {
        "tree": dump_dir(store.root_id),
        "users": sorted(u.username for u in store.users.values()),
    }
