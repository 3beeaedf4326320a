"""Command-line client (and server/agent launcher).

Every API capability is reachable through exactly one verb; machine mode
(--json) emits one JSON record per line. Exit codes: 0 success, 1 API
error, 2 usage error, 3 connection error.
"""

from __future__ import annotations

import base64
import json
import os
import signal
import socket
import sys
import threading
import time
from urllib.parse import urlsplit

import click
import requests

EXIT_API_ERROR = 1
EXIT_CONNECTION_ERROR = 3

DEFAULT_SERVER = "http://127.0.0.1:8080"


def default_config_path() -> str:
    base = os.environ.get("XDG_CONFIG_HOME", os.path.expanduser("~/.config"))
    return os.path.join(base, "dirhub", "config.json")


class ApiClientError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.status = status
        self.code = code


class Client:
    def __init__(self, server: str, token: str | None):
        self.server = server.rstrip("/")
        self.token = token
        self._session = requests.Session()

    def _headers(self) -> dict:
        return {"Authorization": f"Bearer {self.token}"} if self.token else {}

    def request(self, method: str, path: str, json_body=None, params=None) -> dict:
        try:
            response = self._session.request(
                method, self.server + path, json=json_body, params=params,
                headers=self._headers(), timeout=60,
            )
        except requests.RequestException as exc:
            click.echo(f"connection error: {exc}", err=True)
            sys.exit(EXIT_CONNECTION_ERROR)
        if response.status_code >= 400:
            try:
                payload = response.json()
                raise ApiClientError(response.status_code,
                                     payload.get("error", "error"),
                                     payload.get("message", response.text))
            except ValueError:
                raise ApiClientError(response.status_code, "error",
                                     response.text) from None
        try:
            return response.json()
        except ValueError:
            return {}

    def stream(self, path: str, params=None):
        try:
            response = self._session.get(self.server + path, params=params,
                                         headers=self._headers(), stream=True, timeout=60)
        except requests.RequestException as exc:
            click.echo(f"connection error: {exc}", err=True)
            sys.exit(EXIT_CONNECTION_ERROR)
        if response.status_code >= 400:
            try:
                payload = response.json()
            except ValueError:
                payload = {}
            raise ApiClientError(response.status_code,
                                 payload.get("error", "error"),
                                 payload.get("message", response.text))
        return response.iter_content(chunk_size=65536)


class CliState:
    def __init__(self, server, token, as_json, config_path):
        self.config_path = config_path or default_config_path()
        self.config = self._load_config()
        self.server = server or os.environ.get("DIRHUB_SERVER") \
            or self.config.get("server") or DEFAULT_SERVER
        self.token = token or os.environ.get("DIRHUB_TOKEN") or self.config.get("token")
        self.as_json = as_json

    def _load_config(self) -> dict:
        try:
            with open(self.config_path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except (OSError, ValueError):
            return {}

    def save_config(self, **updates) -> None:
        self.config.update(updates)
        os.makedirs(os.path.dirname(self.config_path), exist_ok=True)
        fd = os.open(self.config_path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(self.config, fh, indent=2)

    def client(self) -> Client:
        return Client(self.server, self.token)

    def emit(self, record: dict, line: str | None = None) -> None:
        if self.as_json:
            click.echo(json.dumps(record, ensure_ascii=False))
        elif line is not None:
            click.echo(line)

    def emit_rows(self, records: list[dict], columns: list[str]) -> None:
        if self.as_json:
            for record in records:
                click.echo(json.dumps(record, ensure_ascii=False))
            return
        if not records:
            click.echo("(none)")
            return
        rows = [[str(r.get(c, "")) for c in columns] for r in records]
        widths = [max(len(c), *(len(row[i]) for row in rows))
                  for i, c in enumerate(columns)]
        click.echo("  ".join(c.upper().ljust(w) for c, w in zip(columns, widths)))
        for row in rows:
            click.echo("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


pass_state = click.make_pass_decorator(CliState)


def api_errors(fn):
    """Map API failures onto exit code 1 with a one-line message."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ApiClientError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_API_ERROR)

    return wrapper


@click.group()
@click.option("--server", envvar="DIRHUB_SERVER", default=None,
              help="Server URL (default from config).")
@click.option("--token", envvar="DIRHUB_TOKEN", default=None,
              help="Session token override.")
@click.option("--json", "as_json", is_flag=True, default=False,
              help="Machine output: one JSON record per line.")
@click.option("--config", "config_path", envvar="DIRHUB_CONFIG", default=None,
              help="Config file path.")
@click.pass_context
def main(ctx, server, token, as_json, config_path):
    """Client for a dirhub directory service."""
    ctx.obj = CliState(server, token, as_json, config_path)


# -- accounts ---------------------------------------------------------------------

@main.command()
@click.argument("username")
@click.option("--password", prompt=True, hide_input=True, confirmation_prompt=True)
@pass_state
@api_errors
def register(state, username, password):
    """Create an account."""
    record = state.client().request("POST", "/api/register",
                                    {"username": username, "password": password})
    state.emit(record, f"registered {record['username']}")


@main.command()
@click.argument("username")
@click.option("--password", prompt=True, hide_input=True)
@pass_state
@api_errors
def login(state, username, password):
    """Log in and store the session token."""
    record = state.client().request("POST", "/api/login",
                                    {"username": username, "password": password})
    state.save_config(server=state.server, token=record["token"],
                      username=record["user"]["username"])
    state.emit({"username": record["user"]["username"]},
               f"logged in as {record['user']['username']}")


@main.command()
@pass_state
@api_errors
def whoami(state):
    """Show the logged-in account."""
    record = state.client().request("GET", "/api/me")
    state.emit(record, record["username"])


# -- directories -----------------------------------------------------------------------

@main.group("dir")
def dir_group():
    """Directory tree operations."""


def _dir_line(d: dict) -> str:
    flags = []
    if d["state"] != "Active":
        flags.append(d["state"].lower())
    if d["visibility"] != "Public":
        flags.append(d["visibility"].lower())
    suffix = f" [{', '.join(flags)}]" if flags else ""
    return f"{d['id']}  {d['name']}{suffix}"


@dir_group.command("root")
@pass_state
@api_errors
def dir_root(state):
    """Show the root directory."""
    record = state.client().request("GET", "/api/dirs")
    state.emit(record, _dir_line(record))


@dir_group.command("info")
@click.argument("dir_id")
@pass_state
@api_errors
def dir_info(state, dir_id):
    """Show one directory."""
    d = state.client().request("GET", f"/api/dirs/{dir_id}")
    lines = [
        f"id:         {d['id']}",
        f"name:       {d['name']}",
        f"owner:      {d['owner']}",
        f"state:      {d['state']}",
        f"visibility: {d['visibility']}",
        f"members:    {d['member_count']}",
        f"your roles: {', '.join(d['viewer']['roles']) or '(none)'}",
        f"your rights: {', '.join(r for r, ok in d['viewer']['rights'].items() if ok) or '(none)'}",
    ]
    state.emit(d, "\n".join(lines))


@dir_group.command("create")
@click.argument("parent_id")
@click.argument("name")
@pass_state
@api_errors
def dir_create(state, parent_id, name):
    """Create a subdirectory."""
    d = state.client().request("POST", "/api/dirs", {"parent": parent_id, "name": name})
    state.emit(d, _dir_line(d))


@dir_group.command("ls")
@click.argument("dir_id")
@pass_state
@api_errors
def dir_ls(state, dir_id):
    """List visible children (header line shows where you are)."""
    client = state.client()
    record = client.request("GET", f"/api/dirs/{dir_id}/children")
    if not state.as_json:
        bar = client.request("GET", f"/api/dirs/{dir_id}/bar")
        click.echo(bar["text"])
    rows = [{"id": c["id"], "name": c["name"], "state": c["state"],
             "visibility": c["visibility"], "owner": c["owner"]}
            for c in record["children"]]
    state.emit_rows(rows, ["id", "name", "state", "visibility", "owner"])


@dir_group.command("bar")
@click.argument("dir_id")
@pass_state
@api_errors
def dir_bar(state, dir_id):
    """Print the navigator bar (root to directory)."""
    record = state.client().request("GET", f"/api/dirs/{dir_id}/bar")
    state.emit(record, record["text"])


@dir_group.command("rm")
@click.argument("dir_id")
@pass_state
@api_errors
def dir_rm(state, dir_id):
    """Delete an empty directory permanently."""
    record = state.client().request("DELETE", f"/api/dirs/{dir_id}")
    state.emit(record, "deleted")


@dir_group.command("trash")
@click.argument("dir_id")
@pass_state
@api_errors
def dir_trash(state, dir_id):
    """Move a directory (and subtree) to the trash."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/trash")
    state.emit(record, "trashed")


@dir_group.command("restore")
@click.argument("dir_id")
@pass_state
@api_errors
def dir_restore(state, dir_id):
    """Restore a trashed directory."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/restore")
    state.emit(record, "restored")


ROLES_ORDER = ["DirCreator", "thisGroup", "grantGroup", "grantUser", "AnyUser"]
RIGHTS_ORDER = ["Publish", "Read", "CreateSubDir", "ShowDir"]


def _render_matrix(matrix: dict) -> str:
    width = max(len(r) for r in ROLES_ORDER)
    lines = [" " * width + "  " + "  ".join(f"{r:>12}" for r in RIGHTS_ORDER)]
    for role in ROLES_ORDER:
        cells = "  ".join(f"{'x' if matrix[role][right] else '-':>12}"
                          for right in RIGHTS_ORDER)
        lines.append(f"{role:<{width}}  {cells}")
    return "\n".join(lines)


def _parse_cell(cell_ref: str) -> tuple[str, str]:
    try:
        role, right = cell_ref.split(":", 1)
    except ValueError:
        raise click.UsageError(f"cell must be role:right, got {cell_ref!r}") from None
    if role not in ROLES_ORDER or right not in RIGHTS_ORDER:
        raise click.UsageError(f"unknown cell {cell_ref!r}")
    return role, right


@dir_group.command("matrix")
@click.argument("dir_id")
@click.option("--set", "set_json", default=None,
              help="Replace the whole grid (JSON, or @file).")
@click.option("--allow", "allows", multiple=True, metavar="ROLE:RIGHT",
              help="Turn one cell on (repeatable).")
@click.option("--deny", "denies", multiple=True, metavar="ROLE:RIGHT",
              help="Turn one cell off (repeatable).")
@pass_state
@api_errors
def dir_matrix(state, dir_id, set_json, allows, denies):
    """Show or change the 5x4 authorization grid (owner only)."""
    client = state.client()
    if set_json is None and not allows and not denies:
        record = client.request("GET", f"/api/dirs/{dir_id}/matrix")
        state.emit(record, _render_matrix(record["matrix"]))
        return
    if set_json is not None:
        if set_json.startswith("@"):
            with open(set_json[1:], "r", encoding="utf-8") as fh:
                matrix = json.load(fh)
        else:
            matrix = json.loads(set_json)
    else:
        matrix = client.request("GET", f"/api/dirs/{dir_id}/matrix")["matrix"]
    for cell_ref in allows:
        role, right = _parse_cell(cell_ref)
        matrix[role][right] = True
    for cell_ref in denies:
        role, right = _parse_cell(cell_ref)
        matrix[role][right] = False
    record = client.request("POST", f"/api/dirs/{dir_id}/matrix", {"matrix": matrix})
    state.emit(record, _render_matrix(record["matrix"]))


@dir_group.command("grants")
@click.argument("dir_id")
@pass_state
@api_errors
def dir_grants(state, dir_id):
    """List granted users and groups (owner only)."""
    record = state.client().request("GET", f"/api/dirs/{dir_id}/grants")
    lines = ["users:  " + (", ".join(record["users"]) or "(none)"),
             "groups: " + (", ".join(g["name"] or g["id"] for g in record["groups"])
                           or "(none)")]
    state.emit(record, "\n".join(lines))


@dir_group.command("grant")
@click.argument("dir_id")
@click.option("--user", "username", default=None, help="Grant/revoke a user.")
@click.option("--group", "group_id", default=None, help="Grant/revoke a group (directory id).")
@click.option("--revoke", is_flag=True, default=False)
@pass_state
@api_errors
def dir_grant(state, dir_id, username, group_id, revoke):
    """Grant the grantUser/grantGroup role (owner only)."""
    if (username is None) == (group_id is None):
        raise click.UsageError("provide exactly one of --user or --group")
    action = "revoke" if revoke else "grant"
    if username is not None:
        record = state.client().request("POST", f"/api/dirs/{dir_id}/grants/users",
                                        {"username": username, "action": action})
    else:
        record = state.client().request("POST", f"/api/dirs/{dir_id}/grants/groups",
                                        {"group_id": group_id, "action": action})
    state.emit(record, "ok")


@dir_group.command("visibility")
@click.argument("dir_id")
@click.argument("visibility", type=click.Choice(["Public", "Private"], case_sensitive=False))
@pass_state
@api_errors
def dir_visibility(state, dir_id, visibility):
    """Set the directory group Public or Private (owner only)."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/visibility",
                                    {"visibility": visibility.capitalize()})
    state.emit(record, record["visibility"])


# -- groups -------------------------------------------------------------------------------

@main.group("group")
def group_group():
    """Group membership operations."""


@group_group.command("join")
@click.argument("dir_id")
@pass_state
@api_errors
def group_join(state, dir_id):
    """Join a directory group (or apply, when private)."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/join")
    state.emit(record, record["outcome"])


@group_group.command("pending")
@click.argument("dir_id")
@pass_state
@api_errors
def group_pending(state, dir_id):
    """List pending applications, oldest first (owner only)."""
    record = state.client().request("GET", f"/api/dirs/{dir_id}/applications")
    state.emit_rows(record["applications"], ["username", "applied_at"])


@group_group.command("permit")
@click.argument("dir_id")
@click.argument("username")
@pass_state
@api_errors
def group_permit(state, dir_id, username):
    """Approve an application (owner only)."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/applications/{username}",
                                    {"decision": "Permit"})
    state.emit(record, "permitted")


@group_group.command("refuse")
@click.argument("dir_id")
@click.argument("username")
@pass_state
@api_errors
def group_refuse(state, dir_id, username):
    """Refuse an application (owner only)."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/applications/{username}",
                                    {"decision": "Refuse"})
    state.emit(record, "refused")


@group_group.command("kick")
@click.argument("dir_id")
@click.argument("username")
@pass_state
@api_errors
def group_kick(state, dir_id, username):
    """Remove a member (owner only)."""
    record = state.client().request("DELETE", f"/api/dirs/{dir_id}/members/{username}")
    state.emit(record, "removed")


@group_group.command("blacklist")
@click.argument("dir_id")
@click.argument("username")
@click.option("--remove", is_flag=True, default=False, help="Lift the blacklisting.")
@pass_state
@api_errors
def group_blacklist(state, dir_id, username, remove):
    """Blacklist (or un-blacklist, with --remove) a user (owner only)."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/blacklist/{username}",
                                    {"action": "remove" if remove else "add"})
    state.emit(record, "unblacklisted" if remove else "blacklisted")


# -- articles --------------------------------------------------------------------------------

@main.group("article")
def article_group():
    """Publishing and reading articles."""


@article_group.command("publish")
@click.argument("dir_id")
@click.option("--title", required=True)
@click.option("--abstract", default="")
@click.option("--body", default="")
@click.option("--attach", "attach_paths", multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Attach a file (repeatable).")
@pass_state
@api_errors
def article_publish(state, dir_id, title, abstract, body, attach_paths):
    """Publish an article into a directory."""
    attachments = []
    for path in attach_paths:
        with open(path, "rb") as fh:
            attachments.append({
                "filename": os.path.basename(path),
                "content_b64": base64.b64encode(fh.read()).decode("ascii"),
            })
    record = state.client().request("POST", f"/api/dirs/{dir_id}/articles", {
        "title": title, "abstract": abstract, "body": body,
        "attachments": attachments,
    })
    state.emit(record, f"{record['id']}  {record['url']}")


@article_group.command("ls")
@click.argument("dir_id")
@pass_state
@api_errors
def article_ls(state, dir_id):
    """List a directory's articles, newest first."""
    record = state.client().request("GET", f"/api/dirs/{dir_id}/articles")
    rows = [{"id": a["id"], "title": a["title"], "author": a["author"], "url": a["url"]}
            for a in record["articles"]]
    state.emit_rows(rows, ["id", "title", "author", "url"])


@article_group.command("get")
@click.argument("article_id")
@pass_state
@api_errors
def article_get(state, article_id):
    """Show one article."""
    a = state.client().request("GET", f"/api/a/{article_id}")
    lines = [f"title:    {a['title']}", f"author:   {a['author']}",
             f"url:      {a['url']}"]
    if a["abstract"]:
        lines.append(f"abstract: {a['abstract']}")
    if a["attachments"]:
        names = ", ".join(f"{x['filename']} ({x['size']}B)" for x in a["attachments"])
        lines.append(f"attached: {names}")
    if a["body"]:
        lines.extend(["", a["body"]])
    state.emit(a, "\n".join(lines))


@article_group.command("attachment")
@click.argument("article_id")
@click.argument("filename")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write to a file instead of stdout.")
@pass_state
@api_errors
def article_attachment(state, article_id, filename, output):
    """Download one attachment."""
    chunks = state.client().stream(f"/api/a/{article_id}/attachments/{filename}")
    _write_stream(chunks, output)


def _write_stream(chunks, output):
    if output:
        with open(output, "wb") as fh:
            for chunk in chunks:
                fh.write(chunk)
    else:
        for chunk in chunks:
            sys.stdout.buffer.write(chunk)
        sys.stdout.buffer.flush()


# -- search -------------------------------------------------------------------------------------

@main.command()
@click.argument("query", default="")
@click.option("--mode", type=click.Choice(["DIR", "KEY", "MY_DIR", "MY_KEY", "MY_ALL_DIR"]),
              default="DIR", show_default=True)
@pass_state
@api_errors
def search(state, query, mode):
    """Search directories (DIR modes) or articles (KEY modes).

    Multiple required words are joined with " and ": every word must match.
    """
    record = state.client().request("GET", "/api/search", params={"q": query, "mode": mode})
    if state.as_json:
        for hit in record["hits"]:
            click.echo(json.dumps(hit, ensure_ascii=False))
        return
    if not record["hits"]:
        click.echo("(no hits)")
        return
    for hit in record["hits"]:
        if hit.get("article_url"):
            click.echo(f"{hit['bar']['text']}  ->  {hit['title']}  {hit['article_url']}")
        else:
            click.echo(f"{hit['bar']['text']}  [{hit['directory_id']}]")


# -- mounts ----------------------------------------------------------------------------------------

@main.group("mount")
def mount_group():
    """Remote share mounts."""


@mount_group.command("bind")
@click.argument("dir_id")
@click.option("--agent", "agent_id", required=True, help="Agent id the share lives on.")
@click.option("--share", "share_path", required=True, help="Share label on that agent.")
@pass_state
@api_errors
def mount_bind(state, dir_id, agent_id, share_path):
    """Bind one of your agent's shares into a directory."""
    record = state.client().request("POST", f"/api/dirs/{dir_id}/mounts",
                                    {"agent_id": agent_id, "share_path": share_path})
    state.emit(record, f"{record['id']}  {record['label']}")


@mount_group.command("ls")
@click.argument("dir_id")
@pass_state
@api_errors
def mount_ls(state, dir_id):
    """List a directory's mount bindings."""
    record = state.client().request("GET", f"/api/dirs/{dir_id}/mounts")
    rows = [{"id": m["id"], "label": m["label"], "agent": m["agent_id"],
             "live": m["live"]} for m in record["mounts"]]
    state.emit_rows(rows, ["id", "label", "agent", "live"])


@mount_group.command("entries")
@click.argument("dir_id")
@click.option("--path", default="", help="Sub path inside the shares.")
@pass_state
@api_errors
def mount_entries(state, dir_id, path):
    """List remote entries contributed by the directory's mounts."""
    record = state.client().request("GET", f"/api/dirs/{dir_id}/mounts/entries",
                                    params={"path": path})
    rows = [{"label": e["label"], "name": e["name"], "kind": e["kind"],
             "size": e["size"], "availability": e["availability"],
             "binding_id": e["binding_id"]}
            for e in record["entries"]]
    state.emit_rows(rows, ["label", "name", "kind", "size", "availability", "binding_id"])


@mount_group.command("fetch")
@click.argument("binding_id")
@click.argument("path")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@pass_state
@api_errors
def mount_fetch(state, binding_id, path, output):
    """Download one file through the relay."""
    chunks = state.client().stream(f"/api/mounts/{binding_id}/file", params={"path": path})
    _write_stream(chunks, output)


@mount_group.command("unbind")
@click.argument("binding_id")
@pass_state
@api_errors
def mount_unbind(state, binding_id):
    """Remove a mount binding."""
    record = state.client().request("DELETE", f"/api/mounts/{binding_id}")
    state.emit(record, "unbound")


# -- agent ------------------------------------------------------------------------------------------

@main.group("agent")
def agent_group():
    """Share agent."""


@agent_group.command("run")
@click.option("--host", default=None, help="Service host (default: from server URL).")
@click.option("--port", type=int, default=8765, show_default=True,
              help="Service agent port.")
@click.option("--agent-id", default=None, help="Agent id (default: hostname).")
@click.option("--share", "share_paths", multiple=True, required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Local directory to serve (repeatable).")
@click.option("--label", "labels", multiple=True,
              help="Label for each --share (default: directory name).")
@click.option("--username", default=None)
@click.option("--password", default=None)
@pass_state
def agent_run(state, host, port, agent_id, share_paths, labels, username, password):
    """Keep an outbound connection open and serve the given shares."""
    from .relay.agent import AgentError, ShareAgent

    if labels and len(labels) != len(share_paths):
        raise click.UsageError("--label count must match --share count")
    shares = {}
    for i, path in enumerate(share_paths):
        label = labels[i] if labels else os.path.basename(os.path.abspath(path))
        shares[label] = path
    if host is None:
        host = urlsplit(state.server).hostname or "127.0.0.1"
    agent = ShareAgent(
        host, port,
        agent_id=agent_id or socket.gethostname(),
        shares=shares,
        token=None if username else state.token,
        username=username, password=password,
    )
    click.echo(f"serving {', '.join(shares)} to {host}:{port} (ctrl-c to stop)")
    try:
        agent.run_forever()
    except AgentError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_API_ERROR)
    except KeyboardInterrupt:
        agent.stop()


# -- server -------------------------------------------------------------------------------------------

def _parse_listen(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    try:
        return host or "127.0.0.1", int(port)
    except ValueError:
        raise click.UsageError(f"bad listen address {value!r}") from None


@main.command()
@click.option("--listen", envvar="DIRHUB_LISTEN", default="127.0.0.1:8080",
              show_default=True, help="HTTP listen address.")
@click.option("--agent-listen", envvar="DIRHUB_AGENT_LISTEN", default="127.0.0.1:8765",
              show_default=True, help="Agent relay listen address.")
@click.option("--data-dir", envvar="DIRHUB_DATA_DIR", default="./dirhub-data",
              show_default=True, help="Snapshot and attachment directory.")
@click.option("--snapshot-interval", envvar="DIRHUB_SNAPSHOT_INTERVAL", default=300,
              show_default=True, help="Seconds between automatic snapshots (0 disables).")
@click.option("--ui-dir", envvar="DIRHUB_UI_DIR", default=None,
              help="Static web client directory (default: ./frontend/dist if present).")
def serve(listen, agent_listen, data_dir, snapshot_interval, ui_dir):
    """Run the directory service."""
    from .hub import Hub
    from .relay.gateway import AgentGateway
    from .service.http import DirhubServer

    if ui_dir is None and os.path.isdir("frontend/dist"):
        ui_dir = "frontend/dist"

    snapshot = os.path.join(data_dir, "snapshot.json")
    if os.path.exists(snapshot):
        hub = Hub.load(data_dir)
        click.echo(f"loaded state from {snapshot}")
    else:
        hub = Hub()
        click.echo("starting with a fresh tree")

    gateway = AgentGateway(hub.accounts)
    agent_host, agent_port = _parse_listen(agent_listen)
    agent_port = gateway.start(agent_host, agent_port)
    hub.mounts.gateway = gateway

    host, port = _parse_listen(listen)
    server = DirhubServer(hub, host=host, port=port, ui_dir=ui_dir)
    server.start()
    click.echo(f"http on {server.url}  agents on {agent_host}:{agent_port}"
               + (f"  ui from {ui_dir}" if ui_dir else ""))

    stop = threading.Event()

    def shutdown(signum, frame):
        stop.set()

    signal.signal(signal.SIGINT, shutdown)
    signal.signal(signal.SIGTERM, shutdown)

    last_save = time.monotonic()
    while not stop.is_set():
        stop.wait(1.0)
        if snapshot_interval and time.monotonic() - last_save >= snapshot_interval:
            hub.save(data_dir)
            last_save = time.monotonic()
    click.echo("saving state before exit")
    hub.save(data_dir)
    server.stop()
    gateway.close()


# Which route each verb form drives; checked against the server's route
# table so no endpoint is left without a CLI verb.
VERB_TABLE = {
    "register": "register",
    "login": "login",
    "whoami": "whoami",
    "dir root": "root_dir",
    "dir info": "dir_get",
    "dir create": "dir_create",
    "dir ls": "dir_children",
    "dir bar": "dir_bar",
    "dir rm": "dir_delete",
    "dir trash": "dir_trash",
    "dir restore": "dir_restore",
    "dir matrix": "matrix_get",
    "dir matrix --set": "matrix_set",
    "dir grants": "grants_get",
    "dir grant --user": "grant_user",
    "dir grant --group": "grant_group",
    "dir visibility": "visibility_set",
    "group join": "group_join",
    "group pending": "applications_get",
    "group permit": "application_review",
    "group refuse": "application_review",
    "group kick": "member_kick",
    "group blacklist": "blacklist_set",
    "article publish": "article_publish",
    "article ls": "articles_list",
    "article get": "article_get",
    "article attachment": "attachment_get",
    "search": "search",
    "mount bind": "mount_bind",
    "mount ls": "mounts_list",
    "mount entries": "mount_entries",
    "mount fetch": "mount_fetch",
    "mount unbind": "mount_unbind",
}


if __name__ == "__main__":
    main()
