"""HTTP+JSON surface over the whole service.

Every handler authenticates the bearer token and re-derives permissions
through the core modules; nothing trusts client-supplied flags. Domain
errors map onto status classes (400 validation, 401 unauthenticated,
403 denied, 404 missing, 409 state conflicts). The server also serves the
static web client, when one is built, for any non-API path.
"""

from __future__ import annotations

import base64
import json
import logging
import mimetypes
import os
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Iterator
from urllib.parse import parse_qs, unquote, urlsplit

from ..authz import AuthMatrix, RIGHTS, Right
from ..errors import ApiError, AuthFailed, BadRequest, NotFound, TransferTimeout
from ..hub import Hub
from ..search import SearchMode
from ..tree import Article, Directory

logger = logging.getLogger(__name__)

MAX_BODY_BYTES = 96 * 1024 * 1024  # bounded request bodies (base64 attachments)


@dataclass
class Route:
    name: str
    method: str
    pattern: re.Pattern
    handler: Callable
    public: bool = False


@dataclass
class Context:
    hub: Hub
    user: str | None
    params: dict[str, str]
    query: dict[str, list[str]]
    body: dict
    headers: dict

    def body_str(self, key: str, default=None, required: bool = False) -> str | None:
        value = self.body.get(key, default)
        if required and (not isinstance(value, str) or value == ""):
            raise BadRequest(f"field {key!r} is required")
        if value is not None and not isinstance(value, str):
            raise BadRequest(f"field {key!r} must be a string")
        return value

    def query_str(self, key: str, default: str = "") -> str:
        values = self.query.get(key)
        return values[0] if values else default


@dataclass
class StreamResponse:
    chunks: Iterator[bytes]
    content_type: str = "application/octet-stream"
    filename: str | None = None


@dataclass
class BytesResponse:
    body: bytes
    content_type: str = "application/octet-stream"
    filename: str | None = None


# -- payload shapes ---------------------------------------------------------------


def bar_payload(bar) -> dict:
    return {
        "segments": [{"id": i, "name": name} for i, name in bar.segments],
        "text": bar.text,
    }


def dir_payload(hub: Hub, d: Directory, viewer: str | None) -> dict:
    roles = hub.authz.roles_of(viewer, d.id)
    group = hub.store.groups[d.id]
    return {
        "id": d.id,
        "name": d.name,
        "parent": d.parent,
        "owner": hub.accounts.username(d.owner),
        "state": d.state.value,
        "visibility": d.visibility.value,
        "created_at": d.created_at,
        "member_count": len(group.members),
        "viewer": {
            "roles": sorted(r.value for r in roles),
            "rights": {right.value: d.matrix.allows(roles, right) for right in RIGHTS},
            "is_owner": d.owner == viewer,
            "is_member": viewer in group.members,
            "has_pending_application": group.is_pending(viewer) if viewer else False,
            "is_blacklisted": viewer in group.blacklist,
        },
    }


def article_meta_payload(hub: Hub, article: Article) -> dict:
    return {
        "id": article.id,
        "directory": article.directory,
        "title": article.title,
        "abstract": article.abstract,
        "author": hub.accounts.username(article.author),
        "url": article.url,
        "published_at": article.published_at,
        "attachments": [{"filename": a.filename, "size": a.size}
                        for a in article.attachments],
    }


def article_payload(hub: Hub, article: Article) -> dict:
    payload = article_meta_payload(hub, article)
    payload["body"] = article.body
    return payload


def binding_payload(hub: Hub, binding) -> dict:
    return {
        "id": binding.id,
        "directory": binding.directory,
        "account": hub.accounts.username(binding.account),
        "agent_id": binding.agent_id,
        "share_path": binding.share_path,
        "label": hub.mounts.label_for(binding),
        "live": hub.mounts.is_live(binding),
        "created_at": binding.created_at,
    }


def hit_payload(hit) -> dict:
    payload = {"bar": bar_payload(hit.bar), "directory_id": hit.directory_id}
    if hit.article_id is not None:
        payload.update(article_id=hit.article_id, article_url=hit.article_url,
                       title=hit.title)
    return payload


# -- handlers ------------------------------------------------------------------------


def h_register(ctx: Context):
    account = ctx.hub.accounts.register(
        ctx.body_str("username", required=True),
        ctx.body_str("password", required=True),
    )
    return 201, {"id": account.id, "username": account.username,
                 "created_at": account.created_at}


def h_login(ctx: Context):
    session = ctx.hub.accounts.login(
        ctx.body_str("username", required=True),
        ctx.body_str("password", required=True),
    )
    account = ctx.hub.accounts.get(session.user)
    return 200, {"token": session.token, "expires_at": session.expires_at,
                 "user": {"id": account.id, "username": account.username}}


def h_whoami(ctx: Context):
    account = ctx.hub.accounts.get(ctx.user)
    return 200, {"id": account.id, "username": account.username}


def h_root_dir(ctx: Context):
    root = ctx.hub.tree.get(ctx.hub.root_id)
    return 200, dir_payload(ctx.hub, root, ctx.user)


def h_dir_create(ctx: Context):
    d = ctx.hub.tree.create_directory(
        ctx.body_str("parent", required=True),
        ctx.body_str("name", required=True),
        ctx.user,
    )
    return 201, dir_payload(ctx.hub, d, ctx.user)


def h_dir_get(ctx: Context):
    # same gating as the directory view: hidden-by-trash reads as missing,
    # and resolving by direct id still needs ShowDir
    d = ctx.hub.tree.require_visible(ctx.params["dir_id"], ctx.user)
    ctx.hub.authz.require_right(ctx.user, d.id, Right.SHOW_DIR)
    return 200, dir_payload(ctx.hub, d, ctx.user)


def h_dir_children(ctx: Context):
    _, children = ctx.hub.tree.domain_tool_view(ctx.params["dir_id"], ctx.user)
    return 200, {"children": [dir_payload(ctx.hub, c, ctx.user) for c in children]}


def h_dir_bar(ctx: Context):
    ctx.hub.tree.require_visible(ctx.params["dir_id"], ctx.user)
    return 200, bar_payload(ctx.hub.tree.navigator_path(ctx.params["dir_id"]))


def h_dir_delete(ctx: Context):
    ctx.hub.tree.delete_directory(ctx.params["dir_id"], ctx.user)
    return 200, {"deleted": True}


def h_dir_trash(ctx: Context):
    ctx.hub.tree.trash_directory(ctx.params["dir_id"], ctx.user)
    return 200, {"state": "Trashed"}


def h_dir_restore(ctx: Context):
    ctx.hub.tree.restore_directory(ctx.params["dir_id"], ctx.user)
    return 200, {"state": "Active"}


def h_matrix_get(ctx: Context):
    with ctx.hub.store.lock:
        d = ctx.hub.authz.require_owner(ctx.params["dir_id"], ctx.user)
        return 200, {"matrix": d.matrix.to_wire()}


def h_matrix_set(ctx: Context):
    raw = ctx.body.get("matrix")
    try:
        matrix = AuthMatrix.from_wire(raw)
    except ValueError as exc:
        raise BadRequest(f"bad matrix: {exc}") from exc
    ctx.hub.authz.set_matrix(ctx.params["dir_id"], ctx.user, matrix)
    return 200, {"matrix": matrix.to_wire()}


def h_grants_get(ctx: Context):
    hub = ctx.hub
    grants = hub.authz.grants_of(ctx.params["dir_id"], ctx.user)
    groups = []
    for gid in sorted(grants.groups):
        d = hub.store.dirs.get(gid)
        groups.append({"id": gid, "name": d.name if d else None})
    return 200, {
        "users": sorted(hub.accounts.username(u) for u in grants.users),
        "groups": groups,
    }


def _grant_action(ctx: Context) -> str:
    action = ctx.body_str("action", default="grant")
    if action not in ("grant", "revoke"):
        raise BadRequest("action must be 'grant' or 'revoke'")
    return action


def h_grant_user(ctx: Context):
    target = ctx.hub.accounts.by_name(ctx.body_str("username", required=True))
    if _grant_action(ctx) == "grant":
        ctx.hub.authz.grant_user(ctx.params["dir_id"], ctx.user, target.id)
    else:
        ctx.hub.authz.revoke_user(ctx.params["dir_id"], ctx.user, target.id)
    return 200, {"ok": True}


def h_grant_group(ctx: Context):
    group_id = ctx.body_str("group_id", required=True)
    if _grant_action(ctx) == "grant":
        ctx.hub.authz.grant_group(ctx.params["dir_id"], ctx.user, group_id)
    else:
        ctx.hub.authz.revoke_group(ctx.params["dir_id"], ctx.user, group_id)
    return 200, {"ok": True}


def h_visibility_set(ctx: Context):
    ctx.hub.groups.set_visibility(ctx.params["dir_id"], ctx.user,
                                  ctx.body_str("visibility", required=True))
    return 200, {"visibility": ctx.hub.tree.get(ctx.params["dir_id"]).visibility.value}


def h_group_join(ctx: Context):
    outcome = ctx.hub.groups.join(ctx.params["dir_id"], ctx.user)
    return 200, {"outcome": outcome.value}


def h_applications_get(ctx: Context):
    pending = ctx.hub.groups.pending_applications(ctx.params["dir_id"], ctx.user)
    return 200, {"applications": [
        {"username": ctx.hub.accounts.username(p.user), "applied_at": p.applied_at}
        for p in pending
    ]}


def h_application_review(ctx: Context):
    applicant = ctx.hub.accounts.by_name(ctx.params["username"])
    ctx.hub.groups.review_application(ctx.params["dir_id"], ctx.user, applicant.id,
                                      ctx.body_str("decision", required=True))
    return 200, {"ok": True}


def h_blacklist_set(ctx: Context):
    target = ctx.hub.accounts.by_name(ctx.params["username"])
    action = ctx.body_str("action", default="add")
    if action == "add":
        ctx.hub.groups.blacklist_user(ctx.params["dir_id"], ctx.user, target.id)
    elif action == "remove":
        ctx.hub.groups.unblacklist_user(ctx.params["dir_id"], ctx.user, target.id)
    else:
        raise BadRequest("action must be 'add' or 'remove'")
    return 200, {"ok": True}


def h_member_kick(ctx: Context):
    target = ctx.hub.accounts.by_name(ctx.params["username"])
    ctx.hub.groups.remove_member(ctx.params["dir_id"], ctx.user, target.id)
    return 200, {"ok": True}


def h_articles_list(ctx: Context):
    articles = ctx.hub.tree.list_articles(ctx.params["dir_id"], ctx.user)
    return 200, {"articles": [article_meta_payload(ctx.hub, a) for a in articles]}


def h_article_publish(ctx: Context):
    attachments = []
    raw_attachments = ctx.body.get("attachments", [])
    if not isinstance(raw_attachments, list):
        raise BadRequest("attachments must be a list")
    for item in raw_attachments:
        if not isinstance(item, dict):
            raise BadRequest("each attachment must be an object")
        filename = item.get("filename")
        data = item.get("content_b64", "")
        if not isinstance(filename, str) or not isinstance(data, str):
            raise BadRequest("attachment needs filename and content_b64")
        try:
            content = base64.b64decode(data, validate=True)
        except (ValueError, TypeError) as exc:
            raise BadRequest(f"attachment {filename!r}: bad base64") from exc
        attachments.append((filename, content))
    article = ctx.hub.tree.publish_article(
        ctx.params["dir_id"], ctx.user,
        ctx.body_str("title", required=True),
        ctx.body_str("abstract", default="") or "",
        ctx.body_str("body", default="") or "",
        attachments,
    )
    return 201, article_payload(ctx.hub, article)


def h_article_get(ctx: Context):
    article = ctx.hub.tree.get_article(ctx.params["article_id"], ctx.user)
    return 200, article_payload(ctx.hub, article)


def h_attachment_get(ctx: Context):
    filename = unquote(ctx.params["filename"])
    content = ctx.hub.tree.get_attachment(ctx.params["article_id"], filename, ctx.user)
    content_type = mimetypes.guess_type(filename)[0] or "application/octet-stream"
    return BytesResponse(body=content, content_type=content_type, filename=filename)


def h_search(ctx: Context):
    mode = SearchMode.from_wire(ctx.query_str("mode", "DIR"))
    hits = ctx.hub.search.search(ctx.query_str("q", ""), mode, ctx.user)
    return 200, {"hits": [hit_payload(h) for h in hits]}


def h_mount_bind(ctx: Context):
    binding = ctx.hub.mounts.bind_mount(
        ctx.params["dir_id"], ctx.user,
        ctx.body_str("agent_id", required=True),
        ctx.body_str("share_path", required=True),
    )
    return 201, binding_payload(ctx.hub, binding)


def h_mounts_list(ctx: Context):
    bindings = ctx.hub.mounts.bindings_for(ctx.params["dir_id"], ctx.user)
    return 200, {"mounts": [binding_payload(ctx.hub, b) for b in bindings]}


def h_mount_entries(ctx: Context):
    views = ctx.hub.mounts.list_mount_entries(ctx.params["dir_id"], ctx.user,
                                              ctx.query_str("path", ""))
    return 200, {"entries": [
        {
            "binding_id": v.binding_id,
            "label": v.label,
            "name": v.entry.name,
            "kind": v.entry.kind.value,
            "size": v.entry.size,
            "modified": v.entry.modified,
            "availability": v.entry.availability.value,
        }
        for v in views
    ]}


def h_mount_unbind(ctx: Context):
    ctx.hub.mounts.unbind_mount(ctx.params["binding_id"], ctx.user)
    return 200, {"deleted": True}


def h_mount_fetch(ctx: Context):
    path = ctx.query_str("path", "")
    stream = ctx.hub.mounts.fetch_mounted_file(None, ctx.user,
                                               ctx.params["binding_id"], path)
    name = path.rsplit("/", 1)[-1] or "download"
    content_type = mimetypes.guess_type(name)[0] or "application/octet-stream"
    return StreamResponse(chunks=stream, content_type=content_type, filename=name)


def _route(name, method, pattern, handler, public=False) -> Route:
    return Route(name=name, method=method, pattern=re.compile(pattern),
                 handler=handler, public=public)


ROUTES: list[Route] = [
    _route("register", "POST", r"^/api/register$", h_register, public=True),
    _route("login", "POST", r"^/api/login$", h_login, public=True),
    _route("whoami", "GET", r"^/api/me$", h_whoami),
    _route("root_dir", "GET", r"^/api/dirs$", h_root_dir),
    _route("dir_create", "POST", r"^/api/dirs$", h_dir_create),
    _route("dir_get", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)$", h_dir_get),
    _route("dir_delete", "DELETE", r"^/api/dirs/(?P<dir_id>[^/]+)$", h_dir_delete),
    _route("dir_children", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/children$", h_dir_children),
    _route("dir_bar", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/bar$", h_dir_bar),
    _route("dir_trash", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/trash$", h_dir_trash),
    _route("dir_restore", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/restore$", h_dir_restore),
    _route("matrix_get", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/matrix$", h_matrix_get),
    _route("matrix_set", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/matrix$", h_matrix_set),
    _route("grants_get", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/grants$", h_grants_get),
    _route("grant_user", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/grants/users$", h_grant_user),
    _route("grant_group", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/grants/groups$", h_grant_group),
    _route("visibility_set", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/visibility$", h_visibility_set),
    _route("group_join", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/join$", h_group_join),
    _route("applications_get", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/applications$", h_applications_get),
    _route("application_review", "POST",
           r"^/api/dirs/(?P<dir_id>[^/]+)/applications/(?P<username>[^/]+)$", h_application_review),
    _route("blacklist_set", "POST",
           r"^/api/dirs/(?P<dir_id>[^/]+)/blacklist/(?P<username>[^/]+)$", h_blacklist_set),
    _route("member_kick", "DELETE",
           r"^/api/dirs/(?P<dir_id>[^/]+)/members/(?P<username>[^/]+)$", h_member_kick),
    _route("articles_list", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/articles$", h_articles_list),
    _route("article_publish", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/articles$", h_article_publish),
    _route("article_get", "GET", r"^/(?:api/)?a/(?P<article_id>[^/]+)$", h_article_get),
    _route("attachment_get", "GET",
           r"^/(?:api/)?a/(?P<article_id>[^/]+)/attachments/(?P<filename>.+)$", h_attachment_get),
    _route("search", "GET", r"^/api/search$", h_search),
    _route("mount_bind", "POST", r"^/api/dirs/(?P<dir_id>[^/]+)/mounts$", h_mount_bind),
    _route("mounts_list", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/mounts$", h_mounts_list),
    _route("mount_entries", "GET", r"^/api/dirs/(?P<dir_id>[^/]+)/mounts/entries$", h_mount_entries),
    _route("mount_unbind", "DELETE", r"^/api/mounts/(?P<binding_id>[^/]+)$", h_mount_unbind),
    _route("mount_fetch", "GET", r"^/api/mounts/(?P<binding_id>[^/]+)/file$", h_mount_fetch),
]

ROUTES_BY_NAME = {route.name: route for route in ROUTES}


class DirhubHTTPServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, handler, hub: Hub, ui_dir: str | None):
        super().__init__(address, handler)
        self.hub = hub
        self.ui_dir = os.path.realpath(ui_dir) if ui_dir else None


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "dirhub/0.1"
    protocol_version = "HTTP/1.1"

    # -- plumbing -------------------------------------------------------------

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)

    @property
    def hub(self) -> Hub:
        return self.server.hub  # type: ignore[attr-defined]

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, response: BytesResponse) -> None:
        self.send_response(200)
        self.send_header("Content-Type", response.content_type)
        self.send_header("Content-Length", str(len(response.body)))
        if response.filename:
            self.send_header("Content-Disposition",
                             f'attachment; filename="{response.filename}"')
        self.end_headers()
        self.wfile.write(response.body)

    def _send_stream(self, response: StreamResponse) -> None:
        self.send_response(200)
        self.send_header("Content-Type", response.content_type)
        self.send_header("Transfer-Encoding", "chunked")
        if response.filename:
            self.send_header("Content-Disposition",
                             f'attachment; filename="{response.filename}"')
        self.end_headers()
        try:
            for chunk in response.chunks:
                if not chunk:
                    continue
                self.wfile.write(f"{len(chunk):x}\r\n".encode("ascii"))
                self.wfile.write(chunk)
                self.wfile.write(b"\r\n")
            self.wfile.write(b"0\r\n\r\n")
        except ApiError as exc:
            # mid-stream failure: abort the connection so the client sees a
            # truncated chunked body instead of a silently short file
            logger.warning("stream aborted: %s", exc)
            self.close_connection = True
        except OSError:
            self.close_connection = True

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        if length > MAX_BODY_BYTES:
            raise BadRequest("request body too large")
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise BadRequest(f"malformed JSON body: {exc}") from exc
        if not isinstance(body, dict):
            raise BadRequest("JSON body must be an object")
        return body

    def _match(self, method: str, path: str):
        seen_path = False
        for route in ROUTES:
            m = route.pattern.match(path)
            if m is None:
                continue
            seen_path = True
            if route.method == method:
                return route, m.groupdict()
        if seen_path:
            raise _MethodNotAllowed()
        return None, None

    def _wants_html(self) -> bool:
        return "text/html" in (self.headers.get("Accept") or "")

    def _dispatch(self, method: str) -> None:
        parts = urlsplit(self.path)
        path = unquote(parts.path)
        try:
            route, params = self._match(method, path)
        except _MethodNotAllowed:
            self._send_json(405, {"error": "method_not_allowed",
                                  "message": f"{method} not allowed on {path}"})
            return
        if route is None:
            if method == "GET" and not path.startswith("/api/"):
                self._serve_static(path)
                return
            self._send_json(404, {"error": "not_found", "message": f"no route for {path}"})
            return

        # browsers landing on a bare article URL get the web client instead
        if (route.name in ("article_get",) and not path.startswith("/api/")
                and self._wants_html() and self._ui_index() is not None):
            self._serve_static("/")
            return

        try:
            body = self._read_body() if method in ("POST",) else {}
            user = None
            if not route.public:
                user = self._authenticate()
            ctx = Context(hub=self.hub, user=user, params=params,
                          query=parse_qs(parts.query), body=body,
                          headers=dict(self.headers))
            result = route.handler(ctx)
            if isinstance(result, StreamResponse):
                self._send_stream(result)
            elif isinstance(result, BytesResponse):
                self._send_bytes(result)
            else:
                status, payload = result
                self._send_json(status, payload)
        except ApiError as exc:
            payload = {"error": exc.code, "message": exc.message}
            if exc.details:
                payload["details"] = {k: v for k, v in exc.details.items()
                                      if isinstance(v, (str, int, float, bool))}
            self._send_json(exc.http_status, payload)
        except Exception:
            logger.exception("handler crashed for %s %s", method, path)
            self._send_json(500, {"error": "internal", "message": "internal server error"})

    def _authenticate(self) -> str:
        header = self.headers.get("Authorization") or ""
        if not header.startswith("Bearer "):
            raise AuthFailed("missing bearer token")
        return self.hub.accounts.authenticate(header[len("Bearer "):].strip())

    # -- static web client ------------------------------------------------------

    def _ui_index(self) -> str | None:
        ui_dir = self.server.ui_dir  # type: ignore[attr-defined]
        if ui_dir is None:
            return None
        index = os.path.join(ui_dir, "index.html")
        return index if os.path.isfile(index) else None

    def _serve_static(self, path: str) -> None:
        ui_dir = self.server.ui_dir  # type: ignore[attr-defined]
        if ui_dir is None:
            if path == "/":
                self._send_json(200, {"service": "dirhub", "api": "/api"})
            else:
                self._send_json(404, {"error": "not_found", "message": path})
            return
        rel = path.lstrip("/") or "index.html"
        target = os.path.realpath(os.path.join(ui_dir, rel))
        if not (target == ui_dir or target.startswith(ui_dir + os.sep)) or \
                not os.path.isfile(target):
            target = self._ui_index()  # single-page app fallback
            if target is None:
                self._send_json(404, {"error": "not_found", "message": path})
                return
        with open(target, "rb") as fh:
            body = fh.read()
        content_type = mimetypes.guess_type(target)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class _MethodNotAllowed(Exception):
    pass


class DirhubServer:
    """Wraps the threading HTTP server for programmatic start/stop."""

    def __init__(self, hub: Hub, host: str = "127.0.0.1", port: int = 0,
                 ui_dir: str | None = None):
        self.hub = hub
        self._httpd = DirhubHTTPServer((host, port), ApiHandler, hub, ui_dir)
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> int:
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        name="dirhub-http", daemon=True)
        self._thread.start()
        return self.port

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
