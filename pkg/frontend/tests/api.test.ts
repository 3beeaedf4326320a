// API client tests against a recorded/stateful fetch stub: request shapes,
// auth header, error surfacing, and the matrix save/reload round trip.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { renderDirectoryView, renderMatrixEditor } from "../src/render.js";
import type { DirInfo, Matrix } from "../src/types.js";
import { RIGHT_NAMES, ROLE_NAMES } from "../src/types.js";
import { cellsFromEditorHtml } from "./render.test.js";

type Recorded = { url: string; method: string; headers: any; body: any };

function stubFetch(handler: (url: string, init: RequestInit) => { status: number; json: any }) {
  const calls: Recorded[] = [];
  vi.stubGlobal("fetch", async (url: string, init: RequestInit = {}) => {
    calls.push({
      url,
      method: init.method ?? "GET",
      headers: init.headers ?? {},
      body: init.body ? JSON.parse(init.body as string) : undefined,
    });
    const result = handler(url, init);
    return {
      ok: result.status < 400,
      status: result.status,
      json: async () => result.json,
    } as Response;
  });
  return calls;
}

afterEach(() => vi.unstubAllGlobals());

describe("request shapes", () => {
  it("sends the bearer token on every call", async () => {
    const calls = stubFetch(() => ({ status: 200, json: { children: [] } }));
    const api = new ApiClient("");
    api.token = "tok123";
    await api.children("d1");
    expect(calls[0].url).toBe("/api/dirs/d1/children");
    expect(calls[0].headers["Authorization"]).toBe("Bearer tok123");
  });

  it("login stores the token for later calls", async () => {
    const calls = stubFetch((url) =>
      url === "/api/login"
        ? { status: 200, json: { token: "fresh", user: { id: "u", username: "alice" } } }
        : { status: 200, json: { id: "u", username: "alice" } });
    const api = new ApiClient("");
    await api.login("alice", "pw");
    await api.me();
    expect(calls[1].headers["Authorization"]).toBe("Bearer fresh");
  });

  it("search passes q and mode as query parameters", async () => {
    const calls = stubFetch(() => ({ status: 200, json: { hits: [] } }));
    const api = new ApiClient("");
    await api.search("protocol and course", "MY_DIR");
    expect(calls[0].url).toBe("/api/search?q=protocol+and+course&mode=MY_DIR");
  });

  it("review posts the decision in the body", async () => {
    const calls = stubFetch(() => ({ status: 200, json: { ok: true } }));
    const api = new ApiClient("");
    await api.review("d1", "student", "Permit");
    expect(calls[0].url).toBe("/api/dirs/d1/applications/student");
    expect(calls[0].body).toEqual({ decision: "Permit" });
  });
});

describe("error mapping", () => {
  it("surfaces the server's code, message and status", async () => {
    stubFetch(() => ({
      status: 403,
      json: { error: "permission_denied", message: "missing right ShowDir" },
    }));
    const api = new ApiClient("");
    const err = await api.getDir("d1").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(403);
    expect(err.code).toBe("permission_denied");
    expect(err.message).toContain("ShowDir");
  });
});

// a minimal stateful fixture server: stores one matrix per directory
function matrixFixtureServer(initial: Matrix) {
  let stored = structuredClone(initial);
  return (url: string, init: RequestInit = {}) => {
    if (url.endsWith("/matrix") && (init.method ?? "GET") === "GET") {
      return { status: 200, json: { matrix: structuredClone(stored) } };
    }
    if (url.endsWith("/matrix") && init.method === "POST") {
      stored = structuredClone(JSON.parse(init.body as string).matrix);
      return { status: 200, json: { matrix: structuredClone(stored) } };
    }
    return { status: 404, json: { error: "not_found", message: url } };
  };
}

describe("matrix editor round trip", () => {
  it("toggle + save + reload reproduces the exact 20-cell grid", async () => {
    const initial = {} as Matrix;
    for (const role of ROLE_NAMES) {
      initial[role] = {} as Matrix[typeof role];
      for (const right of RIGHT_NAMES) initial[role][right] = role === "DirCreator";
    }
    stubFetch(matrixFixtureServer(initial));
    const api = new ApiClient("");
    api.token = "t";

    // load, flip three cells the way the editor would, save
    const loaded = await api.getMatrix("d1");
    const edited = structuredClone(loaded);
    edited.AnyUser.Read = true;
    edited.thisGroup.CreateSubDir = true;
    edited.DirCreator.Publish = false;
    await api.setMatrix("d1", edited);

    // reload and re-render: every one of the 20 checkboxes matches
    const reloaded = await api.getMatrix("d1");
    expect(reloaded).toEqual(edited);
    const cells = cellsFromEditorHtml(renderMatrixEditor(reloaded));
    expect(Object.keys(cells)).toHaveLength(20);
    for (const role of ROLE_NAMES) {
      for (const right of RIGHT_NAMES) {
        expect(cells[`${role}/${right}`]).toBe(edited[role][right]);
      }
    }
  });
});

describe("domain tool page against a recorded fixture", () => {
  it("renders exactly the API-visible children and the owner panel only for owners", async () => {
    const children: DirInfo[] = ["help", "homework", "materials"].map((name, i) => ({
      id: `c${i}`, name, parent: "d1", owner: "teacher", state: "Active",
      visibility: "Public", created_at: 0, member_count: 0,
      viewer: {
        roles: ["AnyUser"],
        rights: { Publish: false, Read: true, CreateSubDir: false, ShowDir: true },
        is_owner: false, is_member: false,
        has_pending_application: false, is_blacklisted: false,
      },
    }));
    const dir: DirInfo = { ...children[0], id: "d1", name: "course", parent: "root" };
    const bar = { segments: [{ id: "root", name: "ALL" }, { id: "d1", name: "course" }],
                  text: "ALL / course" };

    const nonOwnerHtml = renderDirectoryView(dir, bar, children, "");
    const ids = [...nonOwnerHtml.matchAll(/data-id="(c\d)"/g)].map((m) => m[1]);
    expect(ids).toEqual(["c0", "c1", "c2"]);
    expect(nonOwnerHtml).not.toContain("owner-panel");
    expect(nonOwnerHtml).not.toContain("matrix-editor");

    const ownerDir = structuredClone(dir);
    ownerDir.viewer.is_owner = true;
    const grid = {} as Matrix;
    for (const role of ROLE_NAMES) {
      grid[role] = {} as Matrix[typeof role];
      for (const right of RIGHT_NAMES) grid[role][right] = true;
    }
    const { renderOwnerPanel } = await import("../src/render.js");
    const panel = renderOwnerPanel(ownerDir, grid, { users: [], groups: [] }, []);
    const ownerHtml = renderDirectoryView(ownerDir, bar, children, panel);
    expect(ownerHtml).toContain("owner-panel");
    expect(ownerHtml).toContain("matrix-editor");
    expect(ownerHtml).toContain("visibility-toggle");
  });
});
