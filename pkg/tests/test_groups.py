"""Group membership workflow: join, audit, kick, blacklist."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirhub import Hub
from dirhub.authz import AuthMatrix, Right, Role
from dirhub.errors import (
    AlreadyBlacklisted,
    AlreadyMember,
    AlreadyPending,
    BadRequest,
    Blacklisted,
    NoSuchApplication,
    NotBlacklisted,
    NotMember,
    NotOwner,
    OwnerCannotJoin,
    TrashedDirectory,
)
from dirhub.groups import JoinOutcome
from dirhub.tree import Visibility

from conftest import CHEAP_PASSWORDS, register
from oracles import roles_oracle


def test_join_public_group(hub, users):
    d = hub.tree.create_directory(hub.root_id, "course", users["alice"])
    assert hub.groups.join(d.id, users["bob"]) is JoinOutcome.JOINED
    assert Role.THIS_GROUP in hub.authz.roles_of(users["bob"], d.id)


def test_join_private_group_queues_application(hub, users):
    owner, applicant = users["alice"], users["bob"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.set_visibility(d.id, owner, Visibility.PRIVATE)
    assert hub.groups.join(d.id, applicant) is JoinOutcome.APPLICATION_PENDING
    assert Role.THIS_GROUP not in hub.authz.roles_of(applicant, d.id)
    pending = hub.groups.pending_applications(d.id, owner)
    assert [p.user for p in pending] == [applicant]


def test_permit_grants_membership(hub, users):
    owner, applicant = users["alice"], users["bob"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.set_visibility(d.id, owner, "Private")
    hub.groups.join(d.id, applicant)
    hub.groups.review_application(d.id, owner, applicant, "Permit")
    assert Role.THIS_GROUP in hub.authz.roles_of(applicant, d.id)
    assert hub.groups.pending_applications(d.id, owner) == []


def test_refuse_allows_reapplying(hub, users):
    owner, applicant = users["alice"], users["bob"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.set_visibility(d.id, owner, Visibility.PRIVATE)
    hub.groups.join(d.id, applicant)
    hub.groups.review_application(d.id, owner, applicant, "Refuse")
    assert applicant not in hub.groups.state(d.id).members
    assert hub.groups.join(d.id, applicant) is JoinOutcome.APPLICATION_PENDING


def test_review_validation(hub, users):
    owner = users["alice"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    with pytest.raises(NoSuchApplication):
        hub.groups.review_application(d.id, owner, users["bob"], "Permit")
    hub.groups.set_visibility(d.id, owner, Visibility.PRIVATE)
    hub.groups.join(d.id, users["bob"])
    with pytest.raises(NotOwner):
        hub.groups.review_application(d.id, users["carol"], users["bob"], "Permit")
    with pytest.raises(BadRequest):
        hub.groups.review_application(d.id, owner, users["bob"], "maybe")


def test_double_join_rejected(hub, users):
    d = hub.tree.create_directory(hub.root_id, "course", users["alice"])
    hub.groups.join(d.id, users["bob"])
    with pytest.raises(AlreadyMember):
        hub.groups.join(d.id, users["bob"])
    hub.groups.set_visibility(d.id, users["alice"], Visibility.PRIVATE)
    hub.groups.join(d.id, users["carol"])
    with pytest.raises(AlreadyPending):
        hub.groups.join(d.id, users["carol"])


def test_owner_cannot_join_own_group(hub, users):
    d = hub.tree.create_directory(hub.root_id, "course", users["alice"])
    with pytest.raises(OwnerCannotJoin):
        hub.groups.join(d.id, users["alice"])


def test_join_trashed_directory_fails(hub, users):
    owner = users["alice"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.tree.trash_directory(d.id, owner)
    with pytest.raises(TrashedDirectory):
        hub.groups.join(d.id, users["bob"])


def test_going_public_does_not_auto_approve_pending(hub, users):
    owner = users["alice"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.set_visibility(d.id, owner, Visibility.PRIVATE)
    hub.groups.join(d.id, users["bob"])
    hub.groups.join(d.id, users["carol"])
    hub.groups.set_visibility(d.id, owner, Visibility.PUBLIC)
    state = hub.groups.state(d.id)
    assert [p.user for p in state.pending] == [users["bob"], users["carol"]]
    assert state.members == set()
    # the applicant can short-circuit by just joining now
    hub.groups.review_application(d.id, owner, users["bob"], "Refuse")
    assert hub.groups.join(d.id, users["bob"]) is JoinOutcome.JOINED


def test_set_visibility_owner_only(hub, users):
    d = hub.tree.create_directory(hub.root_id, "course", users["alice"])
    with pytest.raises(NotOwner):
        hub.groups.set_visibility(d.id, users["bob"], Visibility.PRIVATE)


def test_kick_removes_this_group_role_immediately(hub, users):
    owner, member = users["alice"], users["bob"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    # only members may read
    cells = {(role, right): False for role in Role for right in Right}
    cells[(Role.DIR_CREATOR, Right.READ)] = True
    cells[(Role.THIS_GROUP, Right.READ)] = True
    hub.authz.set_matrix(d.id, owner, AuthMatrix.from_cells(cells))
    hub.groups.join(d.id, member)
    assert hub.authz.check_right(member, d.id, Right.READ)
    hub.groups.remove_member(d.id, owner, member)
    assert not hub.authz.check_right(member, d.id, Right.READ)
    with pytest.raises(NotMember):
        hub.groups.remove_member(d.id, owner, member)
    # kicked is not blacklisted: re-join works
    assert hub.groups.join(d.id, member) is JoinOutcome.JOINED


def test_blacklist_strips_membership_and_all_roles(hub, users):
    owner, member = users["alice"], users["bob"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.join(d.id, member)
    hub.groups.blacklist_user(d.id, owner, member)
    state = hub.groups.state(d.id)
    assert member not in state.members
    assert member in state.blacklist
    # even the AnyUser Read of the default matrix is gone
    assert not hub.authz.check_right(member, d.id, Right.READ)
    assert hub.authz.roles_of(member, d.id) == frozenset()
    with pytest.raises(Blacklisted):
        hub.groups.join(d.id, member)


def test_blacklist_drops_pending_application(hub, users):
    owner, applicant = users["alice"], users["bob"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.set_visibility(d.id, owner, Visibility.PRIVATE)
    hub.groups.join(d.id, applicant)
    hub.groups.blacklist_user(d.id, owner, applicant)
    assert hub.groups.pending_applications(d.id, owner) == []


def test_unblacklist_allows_rejoining(hub, users):
    owner, member = users["alice"], users["bob"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.blacklist_user(d.id, owner, member)
    with pytest.raises(AlreadyBlacklisted):
        hub.groups.blacklist_user(d.id, owner, member)
    hub.groups.unblacklist_user(d.id, owner, member)
    with pytest.raises(NotBlacklisted):
        hub.groups.unblacklist_user(d.id, owner, member)
    assert hub.groups.join(d.id, member) is JoinOutcome.JOINED


def test_pending_is_fifo_oldest_first(hub, users, clock):
    owner = users["alice"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.set_visibility(d.id, owner, Visibility.PRIVATE)
    order = []
    for name in ("bob", "carol"):
        clock.advance(5)
        hub.groups.join(d.id, users[name])
        order.append(users[name])
    pending = hub.groups.pending_applications(d.id, owner)
    assert [p.user for p in pending] == order
    assert pending[0].applied_at < pending[1].applied_at


# -- randomized sequences keep the state invariants ------------------------------------

OPS = ("join", "permit", "refuse", "kick", "blacklist", "unblacklist", "flip_visibility")


def check_group_invariants(hub, dir_id, owner):
    state = hub.groups.state(dir_id)
    pending_users = {p.user for p in state.pending}
    assert not (state.members & state.blacklist)
    assert not (pending_users & state.members)
    assert owner not in state.members
    assert len(pending_users) == len(state.pending)  # no duplicate applications
    # authz agrees with raw state for every involved user
    for user in state.members | state.blacklist | pending_users:
        assert hub.authz.roles_of(user, dir_id) == frozenset(
            roles_oracle(hub.store, user, dir_id))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(OPS), st.integers(0, 3)), max_size=50))
def test_random_sequences_preserve_group_invariants(ops):
    hub = Hub(password_cost=CHEAP_PASSWORDS)
    owner = register(hub, "owner")
    members = [register(hub, f"u{i}") for i in range(4)]
    d = hub.tree.create_directory(hub.root_id, "group", owner)
    for op, idx in ops:
        user = members[idx]
        try:
            if op == "join":
                hub.groups.join(d.id, user)
            elif op == "permit":
                hub.groups.review_application(d.id, owner, user, "Permit")
            elif op == "refuse":
                hub.groups.review_application(d.id, owner, user, "Refuse")
            elif op == "kick":
                hub.groups.remove_member(d.id, owner, user)
            elif op == "blacklist":
                hub.groups.blacklist_user(d.id, owner, user)
            elif op == "unblacklist":
                hub.groups.unblacklist_user(d.id, owner, user)
            elif op == "flip_visibility":
                current = hub.tree.get(d.id).visibility
                flipped = Visibility.PRIVATE if current is Visibility.PUBLIC else Visibility.PUBLIC
                hub.groups.set_visibility(d.id, owner, flipped)
        except (AlreadyMember, AlreadyPending, Blacklisted, NoSuchApplication,
                NotMember, AlreadyBlacklisted, NotBlacklisted, OwnerCannotJoin):
            pass
        check_group_invariants(hub, d.id, owner)


def test_review_changes_membership_by_at_most_one(hub, users):
    owner = users["alice"]
    d = hub.tree.create_directory(hub.root_id, "course", owner)
    hub.groups.set_visibility(d.id, owner, Visibility.PRIVATE)
    hub.groups.join(d.id, users["bob"])
    hub.groups.join(d.id, users["carol"])
    before_members = len(hub.groups.state(d.id).members)
    before_pending = len(hub.groups.state(d.id).pending)
    hub.groups.review_application(d.id, owner, users["bob"], "Permit")
    state = hub.groups.state(d.id)
    assert len(state.members) == before_members + 1
    assert len(state.pending) == before_pending - 1
