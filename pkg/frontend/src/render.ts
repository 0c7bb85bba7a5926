// HTML templates as pure string functions, so every view is testable
// without a DOM.  main.ts owns all event wiring via data-action hooks.

import {
  DocTypeJson,
  DocumentRow,
  Role,
  SessionView,
  ShareJson,
  StudentJson,
  UserJson,
  VerificationJson,
  menusFor,
} from "./model.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const esc = escapeHtml;

export function errorBanner(message: string, retryable = false): string {
  const retry = retryable
    ? ' <button data-action="retry">Retry</button>'
    : "";
  return `<div class="banner error" role="alert">${esc(message)}${retry}</div>`;
}

export function infoBanner(message: string): string {
  return `<div class="banner info">${esc(message)}</div>`;
}

export function navBar(session: SessionView | null): string {
  if (!session) {
    return '<nav class="top"><strong>credchain</strong></nav>';
  }
  const items = menusFor(session.role)
    .map((m) => `<li><a href="#" data-menu="${esc(m)}">${esc(m)}</a></li>`)
    .join("");
  return (
    '<nav class="top"><strong>credchain</strong>' +
    `<ul class="menus">${items}</ul>` +
    `<span class="who">${esc(session.displayName)} (${esc(session.role)})` +
    ' <button data-action="logout">Log out</button></span></nav>'
  );
}

export function loginForm(error?: string, retryable = false): string {
  return `
<section class="card login">
  <h2>Sign in</h2>
  ${error ? errorBanner(error, retryable) : ""}
  <form data-form="login">
    <label>Role
      <select name="role">
        <option value="admin">Administrator</option>
        <option value="university">University</option>
        <option value="student">Student</option>
      </select>
    </label>
    <label>Email <input name="email" type="email" required></label>
    <label>Password <input name="password" type="password" required></label>
    <button type="submit">Log in</button>
  </form>
</section>`;
}

export function verifyBox(): string {
  return `
<section class="card verify-box">
  <h2>Verify a document</h2>
  <p>Paste a SHA-256 digest or pick a file to check it against the ledger.</p>
  <form data-form="verify">
    <input name="digest" placeholder="64-character hex digest">
    <button type="submit">Check digest</button>
  </form>
</section>`;
}

export function landingPage(loginError?: string, retryable = false): string {
  return `
<main class="landing">
  <h1>Achievement records, anchored</h1>
  ${loginForm(loginError, retryable)}
  ${verifyBox()}
</main>`;
}

export function verifyPanel(
  state:
    | { kind: "invalid"; hint: string }
    | { kind: "verified"; result: VerificationJson }
    | { kind: "unverified"; digest: string }
    | { kind: "error"; message: string },
): string {
  switch (state.kind) {
    case "invalid":
      return `<div class="panel hint">${esc(state.hint)}</div>`;
    case "error":
      return errorBanner(state.message, true);
    case "unverified":
      return `
<div class="panel unverified">
  <h3>Not verified</h3>
  <p>No record of this digest on the ledger.</p>
  <code class="digest">${esc(state.digest)}</code>
</div>`;
    case "verified": {
      const r = state.result;
      return `
<div class="panel verified">
  <h3>Verified</h3>
  <dl>
    <dt>Issued by</dt><dd>${esc(r.issuer_name ?? r.issuer ?? "")}</dd>
    <dt>Document type</dt><dd>${esc(r.doc_type ?? "")}</dd>
    <dt>Block</dt><dd>${esc(r.block_number ?? "")}</dd>
    <dt>Confirmed at</dt><dd>${esc(r.confirmed_at_s ?? "")} s</dd>
    <dt>Digest</dt><dd><code class="digest">${esc(r.digest)}</code></dd>
  </dl>
</div>`;
    }
  }
}

export function documentRow(row: DocumentRow): string {
  const status =
    row.status === "confirmed"
      ? `confirmed${row.blockNumber !== undefined ? ` (block ${row.blockNumber})` : ""}`
      : row.status;
  const share = row.shareEnabled
    ? `<button data-action="share" data-doc="${row.docId}">Share</button>`
    : `<button disabled title="available once confirmed">Share</button>`;
  return `
<tr data-row="${row.docId}">
  <td>${row.docId}</td>
  <td>${esc(row.docType)}</td>
  <td>${esc(row.filename)}</td>
  <td><code class="digest">${esc(row.digest)}</code></td>
  <td class="status ${esc(row.status)}">${esc(status)}</td>
  <td>${share}</td>
</tr>`;
}

export function documentTable(rows: DocumentRow[]): string {
  if (rows.length === 0) {
    return '<p class="empty">No documents yet.</p>';
  }
  return `
<table class="docs">
  <thead><tr>
    <th>#</th><th>Type</th><th>File</th><th>Digest</th><th>Status</th><th></th>
  </tr></thead>
  <tbody>${rows.map(documentRow).join("")}</tbody>
</table>`;
}

export function uploadForm(
  students: StudentJson[],
  docTypes: DocTypeJson[],
): string {
  const studentOpts = students
    .map(
      (s) =>
        `<option value="${s.student_id}">${esc(s.display_name)} (${esc(s.email)})</option>`,
    )
    .join("");
  const typeOpts = docTypes
    .map((t) => `<option value="${t.doc_type_id}">${esc(t.name)}</option>`)
    .join("");
  return `
<section class="card" data-section="Upload Document">
  <h2>Upload Document</h2>
  <form data-form="upload">
    <label>Student <select name="student_id" required>${studentOpts}</select></label>
    <label>Type <select name="doc_type_id" required>${typeOpts}</select></label>
    <label>File <input name="file" type="file" required></label>
    <button type="submit">Upload and anchor</button>
  </form>
  <div data-slot="upload-result"></div>
</section>`;
}

export function needTypeDialog(): string {
  return `
<div class="dialog" data-dialog="need-type">
  <p>That document type is not in the catalog yet. Add the document type
  first, then retry the upload.</p>
  <button data-action="dismiss">Close</button>
</div>`;
}

export function studentTable(students: StudentJson[], manage: boolean): string {
  if (students.length === 0) return '<p class="empty">No students yet.</p>';
  const rows = students
    .map((s) => {
      const toggle = manage
        ? `<td><button data-action="toggle-student" data-student="${s.student_id}" data-active="${s.active}">
            ${s.active ? "Deactivate" : "Reactivate"}</button></td>`
        : "";
      return `<tr>
        <td>${s.student_id}</td>
        <td>${esc(s.display_name)}</td>
        <td>${esc(s.email)}</td>
        <td>${esc(s.enroll_no)}</td>
        <td>${s.documents}</td>
        <td>${s.active ? "active" : "inactive"}</td>
        ${toggle}
      </tr>`;
    })
    .join("");
  return `
<table class="students">
  <thead><tr>
    <th>#</th><th>Name</th><th>Email</th><th>Enroll no</th>
    <th>Docs</th><th>State</th>${manage ? "<th></th>" : ""}
  </tr></thead>
  <tbody>${rows}</tbody>
</table>`;
}

export function addStudentForm(): string {
  return `
<section class="card" data-section="Add Students">
  <h2>Add Students</h2>
  <form data-form="add-student">
    <label>Name <input name="display_name" required></label>
    <label>Email <input name="email" type="email" required></label>
    <label>Password <input name="password" type="password" minlength="8" required></label>
    <label>Enroll no <input name="enroll_no"></label>
    <button type="submit">Add student</button>
  </form>
</section>`;
}

export function universityTable(universities: UserJson[]): string {
  if (universities.length === 0) {
    return '<p class="empty">No universities yet.</p>';
  }
  const rows = universities
    .map(
      (u) => `<tr>
      <td>${u.user_id}</td>
      <td>${esc(u.display_name)}</td>
      <td>${esc(u.email)}</td>
      <td>${esc(u.country)}</td>
      <td>${u.confirmed ? "confirmed" : "pending"}</td>
      <td>${u.active ? "active" : "inactive"}</td>
      <td><button data-action="toggle-university" data-user="${u.user_id}" data-active="${u.active}">
        ${u.active ? "Deactivate" : "Reactivate"}</button></td>
    </tr>`,
    )
    .join("");
  return `
<table class="universities">
  <thead><tr>
    <th>#</th><th>Name</th><th>Email</th><th>Country</th>
    <th>Chain</th><th>State</th><th></th>
  </tr></thead>
  <tbody>${rows}</tbody>
</table>`;
}

export function addUniversityForm(): string {
  return `
<section class="card" data-section="Add University">
  <h2>Add University</h2>
  <form data-form="add-university">
    <label>Name <input name="display_name" required></label>
    <label>Country <input name="country"></label>
    <label>Email <input name="email" type="email" required></label>
    <label>Password <input name="password" type="password" minlength="8" required></label>
    <button type="submit">Register on chain</button>
  </form>
  <div data-slot="university-result"></div>
</section>`;
}

export function adminPage(
  session: SessionView,
  universities: UserJson[],
  students: StudentJson[],
): string {
  return `
${navBar(session)}
<main class="dashboard admin">
  ${addUniversityForm()}
  <section class="card" data-section="University Manage">
    <h2>University Manage</h2>
    ${universityTable(universities)}
  </section>
  <section class="card" data-section="Student Manage">
    <h2>Student Manage</h2>
    ${studentTable(students, false)}
  </section>
</main>`;
}

export function universityPage(
  session: SessionView,
  rows: DocumentRow[],
  students: StudentJson[],
  docTypes: DocTypeJson[],
): string {
  const pending = session.confirmed
    ? ""
    : infoBanner(
        "Registration not yet mined; uploads unlock once it is confirmed.",
      );
  return `
${navBar(session)}
<main class="dashboard university">
  ${pending}
  <section class="card" data-section="Document List">
    <h2>Document List</h2>
    ${documentTable(rows)}
  </section>
  ${uploadForm(students.filter((s) => s.active), docTypes)}
  ${addStudentForm()}
  <section class="card" data-section="Manage Students">
    <h2>Manage Students</h2>
    ${studentTable(students, true)}
  </section>
</main>`;
}

export function studentPage(session: SessionView, rows: DocumentRow[]): string {
  return `
${navBar(session)}
<main class="dashboard student">
  <section class="card" data-section="My Certificates">
    <h2>My Certificates</h2>
    ${documentTable(rows)}
    <div data-slot="share-result"></div>
  </section>
</main>`;
}

export function sharePanel(
  state:
    | { kind: "ok"; share: ShareJson }
    | { kind: "expired" }
    | { kind: "unknown" }
    | { kind: "error"; message: string },
): string {
  switch (state.kind) {
    case "expired":
      return `
<div class="panel expired">
  <h3>Link expired</h3>
  <p>Ask the document holder for a fresh share link.</p>
</div>`;
    case "unknown":
      return `
<div class="panel unverified">
  <h3>Unknown link</h3>
  <p>This share link does not exist.</p>
</div>`;
    case "error":
      return errorBanner(state.message, true);
    case "ok": {
      const { document: doc, verification } = state.share;
      const panel = verification.found
        ? verifyPanel({ kind: "verified", result: verification })
        : verifyPanel({ kind: "unverified", digest: doc.digest });
      return `
<div class="share-view">
  <h2>Shared document: ${esc(doc.filename)}</h2>
  ${panel}
  <p><a href="/share/${esc(state.share.token)}/file" data-action="download">Download file</a>
  <small>link valid until ${esc(state.share.expires_at_s)} s</small></p>
</div>`;
    }
  }
}

export function sharePage(
  state: Parameters<typeof sharePanel>[0],
): string {
  return `${navBar(null)}<main class="share">${sharePanel(state)}</main>`;
}

export function verifyPage(
  state: Parameters<typeof verifyPanel>[0] | null,
): string {
  return `
${navBar(null)}
<main class="verify">
  ${verifyBox()}
  <div data-slot="verify-result">${state ? verifyPanel(state) : ""}</div>
</main>`;
}
