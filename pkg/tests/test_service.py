"""HTTP surface tests: auth, error mapping, endpoint/direct parity."""

import base64
import json

import pytest
import requests

from dirhub import Hub
from dirhub.authz import Right, Role, default_matrix
from dirhub.service.http import DirhubServer

from conftest import CHEAP_PASSWORDS, FakeClock

PASSWORD = "correct horse battery staple"


class Api:
    """Tiny per-user wrapper around requests for the fixture server."""

    def __init__(self, base):
        self.base = base
        self.token = None

    def call(self, method, path, json_body=None, params=None, token=None, **kw):
        headers = {}
        tok = token if token is not None else self.token
        if tok:
            headers["Authorization"] = f"Bearer {tok}"
        return requests.request(method, self.base + path, json=json_body,
                                params=params, headers=headers, timeout=30, **kw)

    def ok(self, method, path, json_body=None, params=None, **kw):
        r = self.call(method, path, json_body, params, **kw)
        assert r.status_code < 400, f"{method} {path}: {r.status_code} {r.text}"
        return r.json()

    def register_and_login(self, username):
        self.call("POST", "/api/register", {"username": username, "password": PASSWORD})
        r = self.ok("POST", "/api/login", {"username": username, "password": PASSWORD})
        self.token = r["token"]
        return r["user"]["id"]


@pytest.fixture
def service():
    clock = FakeClock()
    hub = Hub(clock=clock, password_cost=CHEAP_PASSWORDS)
    server = DirhubServer(hub)
    server.start()
    try:
        yield hub, server, clock
    finally:
        server.stop()


@pytest.fixture
def api(service):
    _, server, _ = service
    return Api(server.url)


def test_register_login_whoami(api):
    api.register_and_login("dana")
    me = api.ok("GET", "/api/me")
    assert me["username"] == "dana"


def test_unauthenticated_requests_rejected(api):
    r = api.call("GET", "/api/dirs")
    assert r.status_code == 401
    r = api.call("POST", "/api/dirs", {"parent": "x", "name": "y"})
    assert r.status_code == 401
    assert r.json()["error"] == "auth_failed"


def test_expired_token_is_401_everywhere(service, api):
    _, _, clock = service
    api.register_and_login("dana")
    clock.advance(24 * 3600 + 1)
    for method, path in (("GET", "/api/dirs"), ("GET", "/api/me"),
                         ("GET", "/api/search?q=x&mode=DIR")):
        r = api.call(method, path)
        assert r.status_code == 401, path


def test_malformed_json_body_is_400(api):
    api.register_and_login("dana")
    r = requests.post(api.base + "/api/dirs", data=b"{nope",
                      headers={"Authorization": f"Bearer {api.token}",
                               "Content-Type": "application/json"}, timeout=30)
    assert r.status_code == 400


def test_missing_fields_are_400(api):
    api.register_and_login("dana")
    r = api.call("POST", "/api/dirs", {"parent": "x"})
    assert r.status_code == 400


def test_unknown_route_and_method(api):
    api.register_and_login("dana")
    assert api.call("GET", "/api/nope").status_code == 404
    assert api.call("DELETE", "/api/search").status_code == 405


def test_error_status_classes(service, api):
    hub, _, _ = service
    api.register_and_login("owner")
    root = api.ok("GET", "/api/dirs")
    d = api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "mine"})

    other = Api(api.base)
    other.register_and_login("other")

    # 403: matrix denies
    r = other.call("POST", "/api/dirs", {"parent": d["id"], "name": "x"})
    assert (r.status_code, r.json()["error"]) == (403, "permission_denied")
    # 403: owner-gated admin
    r = other.call("POST", f"/api/dirs/{d['id']}/matrix",
                   {"matrix": default_matrix().to_wire()})
    assert (r.status_code, r.json()["error"]) == (403, "not_owner")
    # 404: missing
    assert other.call("GET", "/api/dirs/missing").status_code == 404
    # 409: duplicate
    r = api.call("POST", "/api/dirs", {"parent": root["id"], "name": "MINE"})
    assert (r.status_code, r.json()["error"]) == (409, "duplicate_name")
    # 400: invalid name
    r = api.call("POST", "/api/dirs", {"parent": root["id"], "name": "a/b"})
    assert (r.status_code, r.json()["error"]) == (400, "invalid_name")


def test_matrix_get_set_round_trip(api):
    api.register_and_login("owner")
    root = api.ok("GET", "/api/dirs")
    d = api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "mine"})
    grid = api.ok("GET", f"/api/dirs/{d['id']}/matrix")["matrix"]
    grid["AnyUser"]["Publish"] = True
    api.ok("POST", f"/api/dirs/{d['id']}/matrix", {"matrix": grid})
    again = api.ok("GET", f"/api/dirs/{d['id']}/matrix")["matrix"]
    assert again == grid


def test_group_flow_over_http(api):
    api.register_and_login("owner")
    root = api.ok("GET", "/api/dirs")
    d = api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "club"})
    api.ok("POST", f"/api/dirs/{d['id']}/visibility", {"visibility": "Private"})

    member = Api(api.base)
    member.register_and_login("member")
    outcome = member.ok("POST", f"/api/dirs/{d['id']}/join")
    assert outcome["outcome"] == "ApplicationPending"

    pending = api.ok("GET", f"/api/dirs/{d['id']}/applications")["applications"]
    assert [p["username"] for p in pending] == ["member"]
    api.ok("POST", f"/api/dirs/{d['id']}/applications/member", {"decision": "Permit"})

    info = member.ok("GET", f"/api/dirs/{d['id']}")
    assert info["viewer"]["is_member"] is True

    api.ok("DELETE", f"/api/dirs/{d['id']}/members/member")
    api.ok("POST", f"/api/dirs/{d['id']}/blacklist/member", {"action": "add"})
    r = member.call("POST", f"/api/dirs/{d['id']}/join")
    assert r.status_code == 403  # blacklisted
    api.ok("POST", f"/api/dirs/{d['id']}/blacklist/member", {"action": "remove"})
    # the directory is still Private, so rejoining queues a fresh application
    assert member.ok("POST", f"/api/dirs/{d['id']}/join")["outcome"] == "ApplicationPending"


def test_article_and_attachment_over_http(api):
    api.register_and_login("author")
    root = api.ok("GET", "/api/dirs")
    d = api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "pub"})
    payload = bytes(range(256))
    article = api.ok("POST", f"/api/dirs/{d['id']}/articles", {
        "title": "T", "abstract": "A", "body": "B",
        "attachments": [{"filename": "data.bin",
                         "content_b64": base64.b64encode(payload).decode()}],
    })
    # canonical /a/ URL and the /api/ alias both resolve
    for prefix in ("", "/api"):
        got = api.ok("GET", f"{prefix}{article['url']}")
        assert got["title"] == "T" and got["body"] == "B"
    r = api.call("GET", f"{article['url']}/attachments/data.bin")
    assert r.status_code == 200
    assert r.content == payload


def test_search_over_http(api):
    api.register_and_login("dana")
    root = api.ok("GET", "/api/dirs")
    api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "protocol course"})
    hits = api.ok("GET", "/api/search", params={"q": "protocol and course",
                                                "mode": "DIR"})["hits"]
    assert len(hits) == 1
    assert "protocol course" in hits[0]["bar"]["text"]
    r = api.call("GET", "/api/search", params={"q": "x", "mode": "BOGUS"})
    assert (r.status_code, r.json()["error"]) == (400, "invalid_mode")


def test_bar_endpoint(api):
    api.register_and_login("dana")
    root = api.ok("GET", "/api/dirs")
    a = api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "a"})
    b = api.ok("POST", "/api/dirs", {"parent": a["id"], "name": "b"})
    bar = api.ok("GET", f"/api/dirs/{b['id']}/bar")
    assert bar["text"] == "ALL / a / b"
    assert [s["name"] for s in bar["segments"]] == ["ALL", "a", "b"]


def test_no_endpoint_leaks_what_direct_calls_deny(service, api):
    """Endpoint x principal sweep: HTTP answers must match direct-module
    outcomes for viewers with different rights."""
    hub, _, _ = service
    owner_api = Api(api.base)
    owner = owner_api.register_and_login("owner")
    outsider_api = Api(api.base)
    outsider_api.register_and_login("outsider")

    root = owner_api.ok("GET", "/api/dirs")
    d = owner_api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "guarded"})
    owner_api.ok("POST", f"/api/dirs/{d['id']}/articles", {"title": "T"})
    # lock the directory down to the owner
    grid = default_matrix().to_wire()
    for right in ("Publish", "Read", "CreateSubDir", "ShowDir"):
        grid["thisGroup"][right] = False
        grid["AnyUser"][right] = False
    owner_api.ok("POST", f"/api/dirs/{d['id']}/matrix", {"matrix": grid})

    from dirhub.errors import ApiError

    outsider_id = hub.store.users_by_name["outsider"]

    checks = [
        ("GET", f"/api/dirs/{d['id']}", lambda u: hub.tree.domain_tool_view(d["id"], u)),
        ("GET", f"/api/dirs/{d['id']}/children", lambda u: hub.tree.list_children(d["id"], u)),
        ("GET", f"/api/dirs/{d['id']}/articles", lambda u: hub.tree.list_articles(d["id"], u)),
        ("GET", f"/api/dirs/{d['id']}/matrix",
         lambda u: hub.authz.require_owner(d["id"], u)),
        ("GET", f"/api/dirs/{d['id']}/mounts",
         lambda u: hub.mounts.bindings_for(d["id"], u)),
    ]
    for method, path, direct in checks:
        r = outsider_api.call(method, path)
        try:
            direct(outsider_id)
            direct_ok = True
        except ApiError:
            direct_ok = False
        assert (r.status_code < 400) == direct_ok, f"{path}: http={r.status_code}"
        # and the owner passes everywhere the direct call passes
        r = owner_api.call(method, path)
        try:
            direct(owner)
            owner_ok = True
        except ApiError:
            owner_ok = False
        assert (r.status_code < 400) == owner_ok, f"{path} owner: http={r.status_code}"


def test_dir_get_is_visibility_gated_like_view(service, api):
    hub, _, _ = service
    api.register_and_login("owner")
    root = api.ok("GET", "/api/dirs")
    d = api.ok("POST", "/api/dirs", {"parent": root["id"], "name": "gone"})
    api.ok("POST", f"/api/dirs/{d['id']}/trash")
    outsider = Api(api.base)
    outsider.register_and_login("outsider")
    assert outsider.call("GET", f"/api/dirs/{d['id']}").status_code == 404
    assert api.call("GET", f"/api/dirs/{d['id']}").status_code == 200  # owner


def test_service_info_without_ui(api):
    r = requests.get(api.base + "/", timeout=10)
    assert r.status_code == 200
    assert r.json()["service"] == "dirhub"


def test_scenario_over_http_equals_direct_calls(service, api):
    """Same script through the API and through module calls lands in the
    same observable state."""
    from fixtures import observable_tree
    from conftest import CHEAP_PASSWORDS as CHEAP

    hub_http, _, _ = service

    # -- via HTTP
    teacher = Api(api.base)
    teacher.register_and_login("teacher")
    root = teacher.ok("GET", "/api/dirs")
    course = teacher.ok("POST", "/api/dirs", {"parent": root["id"], "name": "course"})
    teacher.ok("POST", f"/api/dirs/{course['id']}/visibility", {"visibility": "Private"})
    student = Api(api.base)
    student.register_and_login("student")
    student.ok("POST", f"/api/dirs/{course['id']}/join")
    teacher.ok("POST", f"/api/dirs/{course['id']}/applications/student",
               {"decision": "Permit"})
    student.ok("POST", f"/api/dirs/{course['id']}/articles",
               {"title": "hello", "abstract": "hi"})

    # -- direct
    direct = Hub(password_cost=CHEAP)
    t = direct.accounts.register("teacher", PASSWORD).id
    s = direct.accounts.register("student", PASSWORD).id
    c = direct.tree.create_directory(direct.root_id, "course", t)
    direct.groups.set_visibility(c.id, t, "Private")
    direct.groups.join(c.id, s)
    direct.groups.review_application(c.id, t, s, "Permit")
    direct.tree.publish_article(c.id, s, "hello", "hi")

    assert observable_tree(hub_http, include_times=False) == \
        observable_tree(direct, include_times=False)
