// SPA wiring: hash routing, event delegation, and re-fetch-after-mutation.
// No optimistic updates: every change round-trips and the page re-renders
// from the authoritative response.

import { ApiClient, ApiError } from "./api.js";
import {
  renderArticle,
  renderArticleList,
  renderAuthForms,
  renderDirectoryView,
  renderError,
  renderOwnerPanel,
  renderSearchBox,
  renderSearchResults,
} from "./render.js";
import type { Matrix, RightName, SearchModeName } from "./types.js";
import { RIGHT_NAMES, ROLE_NAMES } from "./types.js";

const api = new ApiClient("");
let currentDir: string | null = null;

function app(): HTMLElement {
  return document.getElementById("app")!;
}

function headerBox(): HTMLElement {
  return document.getElementById("session")!;
}

function setSession(token: string | null, username: string | null): void {
  api.token = token;
  if (token && username) {
    localStorage.setItem("dirhub-token", token);
    localStorage.setItem("dirhub-username", username);
    headerBox().innerHTML = `signed in as <b>${username}</b> ` +
      `<button id="logout">log out</button>`;
  } else {
    localStorage.removeItem("dirhub-token");
    localStorage.removeItem("dirhub-username");
    headerBox().innerHTML = "";
  }
}

function route(): string {
  // direct article URLs (/a/<id>) land here when the browser asked for HTML
  const path = location.pathname.match(/^\/a\/([^/]+)$/);
  if (path) return `#/article/${path[1]}`;
  return location.hash || "#/";
}

async function render(): Promise<void> {
  if (!api.token) {
    app().innerHTML = renderAuthForms();
    return;
  }
  const hash = route();
  try {
    const dirMatch = hash.match(/^#\/dir\/(.+)$/);
    const articlesMatch = hash.match(/^#\/articles\/(.+)$/);
    const articleMatch = hash.match(/^#\/article\/(.+)$/);
    const searchMatch = hash.match(/^#\/search\/([A-Z_]+)\/(.*)$/);
    if (hash === "#/" || hash === "") {
      const root = await api.rootDir();
      location.hash = `#/dir/${root.id}`;
      return;
    }
    if (dirMatch) return await showDirectoryView(dirMatch[1]);
    if (articlesMatch) return await showArticleList(articlesMatch[1]);
    if (articleMatch) return await showArticle(articleMatch[1]);
    if (searchMatch) {
      return await showSearch(searchMatch[1] as SearchModeName,
        decodeURIComponent(searchMatch[2]));
    }
    app().innerHTML = renderError(404, `unknown page ${hash}`);
  } catch (err) {
    if (err instanceof ApiError) {
      if (err.status === 401) {
        setSession(null, null);
        app().innerHTML = renderAuthForms("session expired, sign in again");
        return;
      }
      app().innerHTML = renderError(err.status, err.message);
      return;
    }
    throw err;
  }
}

async function showDirectoryView(id: string): Promise<void> {
  currentDir = id;
  const dir = await api.getDir(id);
  const [bar, children] = await Promise.all([api.bar(id), api.children(id)]);
  let ownerPanel = "";
  if (dir.viewer.is_owner) {
    const [matrix, grants, applications] = await Promise.all([
      api.getMatrix(id), api.grants(id), api.applications(id),
    ]);
    ownerPanel = renderOwnerPanel(dir, matrix, grants, applications);
  }
  app().innerHTML = renderSearchBox("DIR") + renderDirectoryView(dir, bar, children, ownerPanel);
}

async function showArticleList(id: string): Promise<void> {
  currentDir = id;
  const dir = await api.getDir(id);
  const [bar, articles, entries] = await Promise.all([
    api.bar(id), api.articles(id), api.mountEntries(id),
  ]);
  app().innerHTML = renderSearchBox("KEY") +
    renderArticleList(dir, bar, articles, entries, dir.viewer.rights.Publish);
}

async function showArticle(id: string): Promise<void> {
  const article = await api.article(id);
  const bar = await api.bar(article.directory);
  app().innerHTML = renderSearchBox("KEY") +
    renderArticle(article, bar, (f) => api.attachmentUrl(article.id, f));
}

async function showSearch(mode: SearchModeName, query: string): Promise<void> {
  const hits = await api.search(query, mode);
  app().innerHTML = renderSearchBox(mode, query) +
    `<h2>search results</h2>` + renderSearchResults(hits, mode);
}

function collectMatrix(root: ParentNode): Matrix {
  const matrix = {} as Matrix;
  for (const role of ROLE_NAMES) {
    matrix[role] = {} as Record<RightName, boolean>;
    for (const right of RIGHT_NAMES) {
      const box = root.querySelector<HTMLInputElement>(
        `.matrix-cell[data-role="${role}"][data-right="${right}"]`);
      matrix[role][right] = box?.checked ?? false;
    }
  }
  return matrix;
}

function fileToB64(file: File): Promise<string> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => {
      const url = reader.result as string;
      resolve(url.slice(url.indexOf(",") + 1));
    };
    reader.onerror = () => reject(reader.error);
    reader.readAsDataURL(file);
  });
}

function flash(message: string): void {
  const box = document.getElementById("flash")!;
  box.textContent = message;
  box.hidden = false;
  setTimeout(() => { box.hidden = true; }, 4000);
}

async function guarded(action: () => Promise<void>): Promise<void> {
  try {
    await action();
  } catch (err) {
    if (err instanceof ApiError) flash(`${err.code}: ${err.message}`);
    else throw err;
  }
}

function wireEvents(): void {
  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "logout") {
      setSession(null, null);
      void render();
      return;
    }
    const dir = currentDir;
    if (target.classList.contains("join") && dir) {
      event.preventDefault();
      void guarded(async () => {
        const r = await api.join(target.dataset.id!);
        flash(r.outcome === "Joined" ? "joined the group" : "application sent");
        await render();
      });
    } else if (target.classList.contains("matrix-save") && dir) {
      void guarded(async () => {
        await api.setMatrix(dir, collectMatrix(document));
        flash("authorization saved");
        await render();
      });
    } else if (target.classList.contains("visibility-toggle") && dir) {
      void guarded(async () => {
        await api.setVisibility(dir, target.dataset.to as "Public" | "Private");
        await render();
      });
    } else if (target.classList.contains("dir-trash") && dir) {
      void guarded(async () => {
        await api.trashDir(dir);
        flash("trashed");
        await render();
      });
    } else if (target.classList.contains("dir-delete") && dir) {
      void guarded(async () => {
        const parent = (await api.getDir(dir)).parent;
        await api.deleteDir(dir);
        flash("deleted");
        location.hash = parent ? `#/dir/${parent}` : "#/";
      });
    } else if (target.classList.contains("permit") && dir) {
      void guarded(async () => {
        await api.review(dir, target.dataset.username!, "Permit");
        await render();
      });
    } else if (target.classList.contains("refuse") && dir) {
      void guarded(async () => {
        await api.review(dir, target.dataset.username!, "Refuse");
        await render();
      });
    } else if (target.classList.contains("revoke-user") && dir) {
      void guarded(async () => {
        await api.grantUser(dir, target.dataset.username!, "revoke");
        await render();
      });
    } else if (target.classList.contains("revoke-group") && dir) {
      void guarded(async () => {
        await api.grantGroup(dir, target.dataset.group!, "revoke");
        await render();
      });
    }
  });

  document.body.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    const data = new FormData(form);
    if (form.classList.contains("login-form") || form.classList.contains("register-form")) {
      event.preventDefault();
      const username = String(data.get("username") ?? "");
      const password = String(data.get("password") ?? "");
      void guarded(async () => {
        if (form.classList.contains("register-form")) {
          await api.register(username, password);
        }
        const r = await api.login(username, password);
        setSession(r.token, r.user.username);
        await render();
      });
    } else if (form.classList.contains("search-box")) {
      event.preventDefault();
      const q = String(data.get("q") ?? "").trim();
      const mode = String(data.get("mode")) as SearchModeName;
      if (!q && mode !== "MY_ALL_DIR") {
        const error = form.querySelector<HTMLElement>(".search-error")!;
        error.textContent = "enter at least one word";
        error.hidden = false;
        return;
      }
      location.hash = `#/search/${mode}/${encodeURIComponent(q)}`;
    } else if (form.classList.contains("create-dir-form") && currentDir) {
      event.preventDefault();
      void guarded(async () => {
        await api.createDir(currentDir!, String(data.get("name") ?? ""));
        form.reset();
        await render();
      });
    } else if (form.classList.contains("grant-user-form") && currentDir) {
      event.preventDefault();
      void guarded(async () => {
        await api.grantUser(currentDir!, String(data.get("username") ?? ""), "grant");
        await render();
      });
    } else if (form.classList.contains("grant-group-form") && currentDir) {
      event.preventDefault();
      void guarded(async () => {
        await api.grantGroup(currentDir!, String(data.get("group_id") ?? ""), "grant");
        await render();
      });
    } else if (form.classList.contains("publish-form") && currentDir) {
      event.preventDefault();
      void guarded(async () => {
        const files = (form.querySelector<HTMLInputElement>("input[name=files]")?.files
          ?? []) as FileList | File[];
        const attachments = [];
        for (const file of Array.from(files as FileList)) {
          attachments.push({ filename: file.name, content_b64: await fileToB64(file) });
        }
        await api.publish(
          currentDir!,
          String(data.get("title") ?? ""),
          String(data.get("abstract") ?? ""),
          String(data.get("body") ?? ""),
          attachments,
        );
        form.reset();
        flash("published");
        await render();
      });
    }
  });

  window.addEventListener("hashchange", () => void render());
}

export function boot(): void {
  const token = localStorage.getItem("dirhub-token");
  const username = localStorage.getItem("dirhub-username");
  setSession(token, username);
  wireEvents();
  void render();
}

boot();
