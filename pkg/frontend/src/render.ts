// Pure HTML renderers: data in, markup out. No fetching, no state, no
// permission logic; everything shown comes verbatim from API payloads, so
// the client can never display more than the server allowed.

import type {
  Application,
  ArticleMeta,
  Article,
  Bar,
  DirInfo,
  Grants,
  Matrix,
  MountEntry,
  RightName,
  RoleName,
  SearchHit,
  SearchModeName,
} from "./types.js";
import { RIGHT_NAMES, ROLE_NAMES, SEARCH_MODES } from "./types.js";

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function dirHref(id: string): string {
  return `#/dir/${id}`;
}

export function articleListHref(id: string): string {
  return `#/articles/${id}`;
}

// Navigator bar: clicking a name opens that directory's view, clicking the
// icon beside it opens that directory's article list.
export function renderNavigatorBar(bar: Bar): string {
  const parts = bar.segments.map((segment) => {
    const name = `<a class="bar-name" href="${dirHref(segment.id)}">${esc(segment.name)}</a>`;
    const icon = `<a class="bar-articles" title="article list of ${esc(segment.name)}" ` +
      `href="${articleListHref(segment.id)}">&#128196;</a>`;
    return `<span class="bar-segment">${name}${icon}</span>`;
  });
  return `<nav class="navigator-bar">${parts.join('<span class="bar-sep"> / </span>')}</nav>`;
}

export function renderChildList(children: DirInfo[]): string {
  if (children.length === 0) {
    return `<p class="empty">no sub directories</p>`;
  }
  const items = children.map((child) => {
    const badges: string[] = [];
    if (child.state === "Trashed") badges.push(`<span class="badge trashed">trashed</span>`);
    if (child.visibility === "Private") badges.push(`<span class="badge private">private</span>`);
    return `<li class="child" data-id="${child.id}">` +
      `<a href="${dirHref(child.id)}">${esc(child.name)}</a>` +
      `${badges.join("")}<span class="owner">${esc(child.owner)}</span></li>`;
  });
  return `<ul class="children">${items.join("")}</ul>`;
}

// the membership affordance for a signed-in non-member
export function renderJoinBox(dir: DirInfo): string {
  const v = dir.viewer;
  if (v.is_owner) return "";
  if (v.is_member) return `<p class="joined">group member</p>`;
  if (v.has_pending_application) return `<p class="pending">application pending</p>`;
  if (v.is_blacklisted) return "";
  return `<p class="join-box">no joined, want join? ` +
    `<button class="join" data-id="${dir.id}">join</button></p>`;
}

export function renderMatrixEditor(matrix: Matrix): string {
  const head = RIGHT_NAMES.map((right) => `<th>${right}</th>`).join("");
  const rows = ROLE_NAMES.map((role) => {
    const cells = RIGHT_NAMES.map((right) => {
      const checked = matrix[role][right] ? " checked" : "";
      return `<td><input type="checkbox" class="matrix-cell" ` +
        `data-role="${role}" data-right="${right}"${checked}></td>`;
    }).join("");
    return `<tr><th>${role}</th>${cells}</tr>`;
  }).join("");
  return `<table class="matrix-editor"><thead><tr><th></th>${head}</tr></thead>` +
    `<tbody>${rows}</tbody></table>` +
    `<button class="matrix-save">save authorization</button>`;
}

// one pure step of the editor: flip a cell, return a fresh grid
export function applyToggle(matrix: Matrix, role: RoleName, right: RightName,
                            value: boolean): Matrix {
  const next = structuredClone(matrix);
  next[role][right] = value;
  return next;
}

export function renderPendingQueue(applications: Application[]): string {
  if (applications.length === 0) return `<p class="empty">no pending applications</p>`;
  const rows = applications.map((app) =>
    `<li class="application" data-username="${esc(app.username)}">` +
    `<span>${esc(app.username)}</span>` +
    `<button class="permit" data-username="${esc(app.username)}">permit</button>` +
    `<button class="refuse" data-username="${esc(app.username)}">refuse</button></li>`);
  return `<ul class="applications">${rows.join("")}</ul>`;
}

export function renderGrantPanels(grants: Grants): string {
  const users = grants.users.map((name) =>
    `<li>${esc(name)} <button class="revoke-user" data-username="${esc(name)}">revoke</button></li>`)
    .join("") || "<li class='empty'>none</li>";
  const groups = grants.groups.map((group) =>
    `<li>${esc(group.name ?? group.id)} ` +
    `<button class="revoke-group" data-group="${group.id}">revoke</button></li>`)
    .join("") || "<li class='empty'>none</li>";
  return `<div class="grants">
    <h4>grantUser</h4><ul class="granted-users">${users}</ul>
    <form class="grant-user-form"><input name="username" placeholder="username">
      <button type="submit">grant user</button></form>
    <h4>grantGroup</h4><ul class="granted-groups">${groups}</ul>
    <form class="grant-group-form"><input name="group_id" placeholder="directory id">
      <button type="submit">grant group</button></form>
  </div>`;
}

export function renderOwnerPanel(dir: DirInfo, matrix: Matrix, grants: Grants,
                                 applications: Application[]): string {
  const flip = dir.visibility === "Public" ? "Private" : "Public";
  return `<section class="owner-panel">
    <h3>administration</h3>
    <p>group is <b>${dir.visibility}</b>
      <button class="visibility-toggle" data-to="${flip}">make ${flip}</button>
      <button class="dir-trash">trash</button>
      <button class="dir-delete">delete</button></p>
    <h4>authorization</h4>
    ${renderMatrixEditor(matrix)}
    ${renderGrantPanels(grants)}
    <h4>applications</h4>
    ${renderPendingQueue(applications)}
  </section>`;
}

export function renderDirectoryView(dir: DirInfo, bar: Bar, children: DirInfo[],
                                 ownerPanel: string): string {
  const badges: string[] = [];
  if (dir.state === "Trashed") badges.push(`<span class="badge trashed">trashed</span>`);
  badges.push(`<span class="badge">${dir.visibility}</span>`);
  const canCreate = dir.viewer.rights.CreateSubDir
    ? `<form class="create-dir-form"><input name="name" placeholder="new sub directory">
        <button type="submit">create</button></form>`
    : "";
  return `<section class="directory-view" data-id="${dir.id}">
    ${renderNavigatorBar(bar)}
    <h2>${esc(dir.name)} ${badges.join(" ")}</h2>
    <p class="meta">owner ${esc(dir.owner)} &middot; ${dir.member_count} members &middot;
      <a class="to-articles" href="${articleListHref(dir.id)}">article list</a></p>
    ${renderJoinBox(dir)}
    <h3>sub directories</h3>
    ${renderChildList(children)}
    ${canCreate}
    ${ownerPanel}
  </section>`;
}

export function renderSearchBox(selected: SearchModeName, query = ""): string {
  const options = SEARCH_MODES.map(({ value, label }) =>
    `<option value="${value}"${value === selected ? " selected" : ""}>${label}</option>`)
    .join("");
  return `<form class="search-box">
    <input name="q" placeholder="words, joined with “ and ”" value="${esc(query)}">
    <select name="mode">${options}</select>
    <button type="submit">search</button>
    <span class="search-error" hidden></span>
  </form>`;
}

export function renderSearchResults(hits: SearchHit[], mode: SearchModeName): string {
  if (hits.length === 0) return `<p class="empty">nothing found</p>`;
  const articleMode = mode === "KEY" || mode === "MY_KEY";
  const rows = hits.map((hit) => {
    if (articleMode && hit.article_url) {
      return `<li class="hit article-hit">` +
        `<a class="article-link" href="${hit.article_url}">${esc(hit.title ?? hit.article_url)}</a>` +
        ` ${renderNavigatorBar(hit.bar)}</li>`;
    }
    return `<li class="hit dir-hit">${renderNavigatorBar(hit.bar)}</li>`;
  });
  return `<ul class="search-results">${rows.join("")}</ul>`;
}

export function renderArticleList(dir: DirInfo, bar: Bar, articles: ArticleMeta[],
                                  mountEntries: MountEntry[], canPublish: boolean): string {
  const items = articles.map((article) =>
    `<li class="article-row">` +
    `<a class="article-link" href="${article.url}">${esc(article.title)}</a>` +
    `<span class="author">${esc(article.author)}</span>` +
    (article.abstract ? `<p class="abstract">${esc(article.abstract)}</p>` : "") +
    `</li>`).join("");
  const publishForm = canPublish
    ? `<form class="publish-form">
        <input name="title" placeholder="title" required>
        <input name="abstract" placeholder="abstract">
        <textarea name="body" placeholder="text"></textarea>
        <input name="files" type="file" multiple>
        <button type="submit">publish</button></form>`
    : "";
  return `<section class="article-list" data-id="${dir.id}">
    ${renderNavigatorBar(bar)}
    <h2>articles in ${esc(dir.name)}</h2>
    ${articles.length ? `<ul class="articles">${items}</ul>` : `<p class="empty">no articles</p>`}
    ${renderMountEntries(mountEntries)}
    ${publishForm}
  </section>`;
}

export function renderMountEntries(entries: MountEntry[]): string {
  if (entries.length === 0) return "";
  const rows = entries.map((entry) => {
    if (entry.availability === "Unavailable") {
      return `<li class="mount-entry unavailable">${esc(entry.name)} ` +
        `<span class="badge unavailable">Unavailable</span></li>`;
    }
    const size = entry.kind === "File" ? `<span class="size">${entry.size} B</span>` : "";
    const name = entry.kind === "File"
      ? `<a class="mount-file" data-binding="${entry.binding_id}" ` +
        `data-path="${esc(entry.name)}" href="/api/mounts/${entry.binding_id}/file?path=${encodeURIComponent(entry.name)}">${esc(entry.name)}</a>`
      : `<span class="mount-dir">${esc(entry.name)}/</span>`;
    return `<li class="mount-entry live">` +
      `<span class="label">${esc(entry.label)}</span>${name}${size}</li>`;
  });
  return `<div class="mounts"><h3>mounted shares</h3><ul class="mount-entries">${rows.join("")}</ul></div>`;
}

export function renderArticle(article: Article, bar: Bar, attachmentUrl: (f: string) => string): string {
  const attachments = article.attachments.length
    ? `<ul class="attachments">` + article.attachments.map((a) =>
        `<li><a href="${attachmentUrl(a.filename)}">${esc(a.filename)}</a> (${a.size} B)</li>`)
        .join("") + `</ul>`
    : "";
  return `<article class="article-page">
    ${renderNavigatorBar(bar)}
    <h2>${esc(article.title)}</h2>
    <p class="meta">by ${esc(article.author)}</p>
    ${article.abstract ? `<p class="abstract">${esc(article.abstract)}</p>` : ""}
    ${attachments}
    <div class="body">${esc(article.body)}</div>
  </article>`;
}

export function renderAuthForms(error = ""): string {
  return `<section class="auth">
    <h2>sign in</h2>
    ${error ? `<p class="error">${esc(error)}</p>` : ""}
    <form class="login-form">
      <input name="username" placeholder="username" required>
      <input name="password" type="password" placeholder="password" required>
      <button type="submit">log in</button>
    </form>
    <h2>register</h2>
    <form class="register-form">
      <input name="username" placeholder="username" required>
      <input name="password" type="password" placeholder="password (8+ chars)" required>
      <button type="submit">create account</button>
    </form>
  </section>`;
}

export function renderError(status: number, message: string): string {
  const hint = status === 403
    ? "you do not hold the right this page needs"
    : status === 404
      ? "nothing lives at this address (or it is hidden from you)"
      : "";
  return `<section class="error-state">
    <h2>${status}</h2><p>${esc(message)}</p>${hint ? `<p class="hint">${hint}</p>` : ""}
  </section>`;
}
