// Thin typed client over the HTTP API. Every call carries the bearer token;
// errors surface as ApiError with the server's code and message.

import type {
  Application,
  Article,
  ArticleMeta,
  Bar,
  DirInfo,
  Grants,
  Matrix,
  MountBinding,
  MountEntry,
  SearchHit,
  SearchModeName,
  SessionUser,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  token: string | null = null;

  constructor(private base: string = "") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const response = await fetch(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: any = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      throw new ApiError(
        response.status,
        payload?.error ?? "error",
        payload?.message ?? `HTTP ${response.status}`,
      );
    }
    return payload as T;
  }

  // accounts
  register(username: string, password: string) {
    return this.call<SessionUser>("POST", "/api/register", { username, password });
  }

  async login(username: string, password: string) {
    const r = await this.call<{ token: string; user: SessionUser }>(
      "POST", "/api/login", { username, password });
    this.token = r.token;
    return r;
  }

  me() {
    return this.call<SessionUser>("GET", "/api/me");
  }

  // directories
  rootDir() {
    return this.call<DirInfo>("GET", "/api/dirs");
  }

  getDir(id: string) {
    return this.call<DirInfo>("GET", `/api/dirs/${id}`);
  }

  async children(id: string) {
    const r = await this.call<{ children: DirInfo[] }>("GET", `/api/dirs/${id}/children`);
    return r.children;
  }

  bar(id: string) {
    return this.call<Bar>("GET", `/api/dirs/${id}/bar`);
  }

  createDir(parent: string, name: string) {
    return this.call<DirInfo>("POST", "/api/dirs", { parent, name });
  }

  deleteDir(id: string) {
    return this.call<{ deleted: boolean }>("DELETE", `/api/dirs/${id}`);
  }

  trashDir(id: string) {
    return this.call<{ state: string }>("POST", `/api/dirs/${id}/trash`);
  }

  restoreDir(id: string) {
    return this.call<{ state: string }>("POST", `/api/dirs/${id}/restore`);
  }

  async getMatrix(id: string): Promise<Matrix> {
    const r = await this.call<{ matrix: Matrix }>("GET", `/api/dirs/${id}/matrix`);
    return r.matrix;
  }

  async setMatrix(id: string, matrix: Matrix): Promise<Matrix> {
    const r = await this.call<{ matrix: Matrix }>("POST", `/api/dirs/${id}/matrix`, { matrix });
    return r.matrix;
  }

  grants(id: string) {
    return this.call<Grants>("GET", `/api/dirs/${id}/grants`);
  }

  grantUser(id: string, username: string, action: "grant" | "revoke") {
    return this.call("POST", `/api/dirs/${id}/grants/users`, { username, action });
  }

  grantGroup(id: string, groupId: string, action: "grant" | "revoke") {
    return this.call("POST", `/api/dirs/${id}/grants/groups`, { group_id: groupId, action });
  }

  setVisibility(id: string, visibility: "Public" | "Private") {
    return this.call("POST", `/api/dirs/${id}/visibility`, { visibility });
  }

  // groups
  join(id: string) {
    return this.call<{ outcome: "Joined" | "ApplicationPending" }>(
      "POST", `/api/dirs/${id}/join`);
  }

  async applications(id: string) {
    const r = await this.call<{ applications: Application[] }>(
      "GET", `/api/dirs/${id}/applications`);
    return r.applications;
  }

  review(id: string, username: string, decision: "Permit" | "Refuse") {
    return this.call("POST", `/api/dirs/${id}/applications/${encodeURIComponent(username)}`,
      { decision });
  }

  kick(id: string, username: string) {
    return this.call("DELETE", `/api/dirs/${id}/members/${encodeURIComponent(username)}`);
  }

  blacklist(id: string, username: string, action: "add" | "remove") {
    return this.call("POST", `/api/dirs/${id}/blacklist/${encodeURIComponent(username)}`,
      { action });
  }

  // articles
  async articles(id: string) {
    const r = await this.call<{ articles: ArticleMeta[] }>("GET", `/api/dirs/${id}/articles`);
    return r.articles;
  }

  publish(id: string, title: string, abstract: string, body: string,
          attachments: { filename: string; content_b64: string }[] = []) {
    return this.call<Article>("POST", `/api/dirs/${id}/articles`,
      { title, abstract, body, attachments });
  }

  article(id: string) {
    return this.call<Article>("GET", `/api/a/${id}`);
  }

  attachmentUrl(articleId: string, filename: string): string {
    return `${this.base}/a/${articleId}/attachments/${encodeURIComponent(filename)}`;
  }

  // search
  async search(q: string, mode: SearchModeName) {
    const params = new URLSearchParams({ q, mode });
    const r = await this.call<{ hits: SearchHit[] }>("GET", `/api/search?${params}`);
    return r.hits;
  }

  // mounts
  async mounts(id: string) {
    const r = await this.call<{ mounts: MountBinding[] }>("GET", `/api/dirs/${id}/mounts`);
    return r.mounts;
  }

  bindMount(id: string, agentId: string, sharePath: string) {
    return this.call<MountBinding>("POST", `/api/dirs/${id}/mounts`,
      { agent_id: agentId, share_path: sharePath });
  }

  unbindMount(bindingId: string) {
    return this.call("DELETE", `/api/mounts/${bindingId}`);
  }

  async mountEntries(id: string, path = "") {
    const params = new URLSearchParams({ path });
    const r = await this.call<{ entries: MountEntry[] }>(
      "GET", `/api/dirs/${id}/mounts/entries?${params}`);
    return r.entries;
  }

  mountFileUrl(bindingId: string, path: string): string {
    const params = new URLSearchParams({ path });
    return `${this.base}/api/mounts/${bindingId}/file?${params}`;
  }
}
