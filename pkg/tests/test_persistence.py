"""Snapshot save/load: round-trip fidelity, atomicity, corruption detection."""

import json
import os
import random

import pytest

from dirhub import Hub
from dirhub.errors import CorruptSnapshot, SchemaVersionMismatch
from dirhub.service import persistence

from conftest import CHEAP_PASSWORDS, FakeClock, register
from fixtures import RandomOpMachine, observable_tree


def grown_hub(seed=1234, n_ops=200):
    clock = FakeClock()
    hub = Hub(clock=clock, password_cost=CHEAP_PASSWORDS)
    users = [register(hub, f"user{i}") for i in range(5)]
    rng = random.Random(seed)
    machine = RandomOpMachine(hub, users, rng)
    for _ in range(n_ops):
        clock.advance(1)
        machine.step()
    return hub


def test_empty_round_trip(tmp_path):
    hub = Hub(password_cost=CHEAP_PASSWORDS)
    hub.save(str(tmp_path))
    reloaded = Hub.load(str(tmp_path), password_cost=CHEAP_PASSWORDS)
    assert observable_tree(reloaded) == observable_tree(hub)
    assert reloaded.root_id == hub.root_id


def test_random_state_round_trip_preserves_everything(tmp_path):
    hub = grown_hub()
    hub.save(str(tmp_path))
    reloaded = Hub.load(str(tmp_path), password_cost=CHEAP_PASSWORDS)

    # identical observable tree, including ids and timestamps
    assert observable_tree(reloaded, include_ids=True, include_times=True) == \
        observable_tree(hub, include_ids=True, include_times=True)

    # attachment bytes survive via the blob sidecar
    for article in hub.store.articles.values():
        for att in article.attachments:
            assert reloaded.store.blobs[att.sha256] == hub.store.blobs[att.sha256]

    # derived queries agree on both sides
    for dir_id in hub.store.dirs:
        assert [d.id for d in reloaded.tree.chain(dir_id)] == \
            [d.id for d in hub.tree.chain(dir_id)]
        for user in list(hub.store.users)[:3]:
            assert reloaded.authz.roles_of(user, dir_id) == hub.authz.roles_of(user, dir_id)

    # logins work against reloaded password records
    reloaded.accounts.login("user0", "correct horse battery staple")


def test_double_save_is_stable(tmp_path):
    hub = grown_hub(seed=77, n_ops=60)
    first = hub.save(str(tmp_path))
    with open(first, "rb") as fh:
        one = fh.read()
    hub.save(str(tmp_path))
    with open(first, "rb") as fh:
        two = fh.read()
    assert one == two  # canonical encoding: same state, same bytes


def test_sessions_are_not_persisted(tmp_path):
    hub = Hub(password_cost=CHEAP_PASSWORDS)
    hub.accounts.register("dana", "long enough password")
    session = hub.accounts.login("dana", "long enough password")
    hub.save(str(tmp_path))
    reloaded = Hub.load(str(tmp_path), password_cost=CHEAP_PASSWORDS)
    from dirhub.errors import AuthFailed
    with pytest.raises(AuthFailed):
        reloaded.accounts.authenticate(session.token)


def test_truncated_snapshot_detected(tmp_path):
    hub = grown_hub(seed=5, n_ops=40)
    path = hub.save(str(tmp_path))
    with open(path, "rb") as fh:
        blob = fh.read()
    with open(path, "wb") as fh:
        fh.write(blob[: len(blob) // 2])
    with pytest.raises(CorruptSnapshot):
        Hub.load(str(tmp_path))


def test_flipped_state_bit_detected_by_checksum(tmp_path):
    hub = grown_hub(seed=6, n_ops=40)
    path = hub.save(str(tmp_path))
    with open(path, "r", encoding="utf-8") as fh:
        document = json.load(fh)
    document["state"]["users"][0]["username"] += "x"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh)
    with pytest.raises(CorruptSnapshot):
        Hub.load(str(tmp_path))


def test_schema_version_mismatch(tmp_path):
    hub = Hub(password_cost=CHEAP_PASSWORDS)
    path = hub.save(str(tmp_path))
    with open(path, "r", encoding="utf-8") as fh:
        document = json.load(fh)
    document["schema"] = 999
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh)
    with pytest.raises(SchemaVersionMismatch):
        Hub.load(str(tmp_path))


def test_missing_blob_detected(tmp_path):
    hub = Hub(password_cost=CHEAP_PASSWORDS)
    user = register(hub, "dana")
    d = hub.tree.create_directory(hub.root_id, "d", user)
    article = hub.tree.publish_article(d.id, user, "t", attachments=[("f", b"payload")])
    hub.save(str(tmp_path))
    os.unlink(tmp_path / "blobs" / article.attachments[0].sha256)
    with pytest.raises(CorruptSnapshot):
        Hub.load(str(tmp_path))


def test_crash_before_rename_leaves_previous_snapshot_loadable(tmp_path, monkeypatch):
    hub = grown_hub(seed=9, n_ops=30)
    hub.save(str(tmp_path))
    before = observable_tree(hub, include_ids=True)

    register(hub, "latecomer")

    real_replace = os.replace

    def crash(src, dst):
        if os.path.basename(dst) == persistence.SNAPSHOT_NAME:
            raise OSError("simulated crash between write and rename")
        return real_replace(src, dst)

    monkeypatch.setattr(os, "replace", crash)
    with pytest.raises(OSError):
        hub.save(str(tmp_path))
    monkeypatch.setattr(os, "replace", real_replace)

    reloaded = Hub.load(str(tmp_path), password_cost=CHEAP_PASSWORDS)
    assert observable_tree(reloaded, include_ids=True) == before
    assert "latecomer" not in reloaded.store.users_by_name


def test_missing_snapshot_raises_file_not_found(tmp_path):
    with pytest.raises(FileNotFoundError):
        Hub.load(str(tmp_path))
