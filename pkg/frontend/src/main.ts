// Browser entry point: hash routing, form wiring, confirmation polling.
// All state transitions live in flows.ts; this file only moves strings
// into the DOM and DOM events back into flows.

import { ApiClient } from "./api.js";
import {
  InFlight,
  loginFlow,
  shareFlow,
  submitUpload,
  verifyFlow,
  watchTx,
} from "./flows.js";
import {
  DocumentRow,
  Role,
  SessionView,
  parseRoute,
  routeForRole,
  toRow,
} from "./model.js";
import * as ui from "./render.js";

const POLL_INTERVAL_MS = 2000;

const api = new ApiClient("");
const inflight = new InFlight();
const app = document.getElementById("app") as HTMLElement;

let session: SessionView | null = null;
let loginError: string | undefined;
let loginRetryable = false;

function setHtml(html: string): void {
  app.innerHTML = html;
}

function slot(name: string): HTMLElement | null {
  return app.querySelector(`[data-slot="${name}"]`);
}

async function renderRoute(): Promise<void> {
  const route = parseRoute(location.hash);
  if (route.page === "share") {
    const state = await inflight.run(`share:${route.token}`, () =>
      shareFlow(api, route.token),
    );
    setHtml(ui.sharePage(state));
    return;
  }
  if (route.page === "verify") {
    let state = null;
    if (route.digest) {
      state = await verifyFlow(api, route.digest);
    }
    setHtml(ui.verifyPage(state));
    return;
  }
  if (route.page === "dashboard" && session && session.role === route.role) {
    await renderDashboard(session);
    return;
  }
  setHtml(ui.landingPage(loginError, loginRetryable));
}

async function renderDashboard(active: SessionView): Promise<void> {
  if (active.role === "admin") {
    const [universities, students] = await Promise.all([
      inflight.run("universities", () => api.listUniversities()),
      inflight.run("students", () => api.listStudents()),
    ]);
    setHtml(ui.adminPage(active, universities, students));
  } else if (active.role === "university") {
    const [docs, students, types, me] = await Promise.all([
      inflight.run("documents", () => api.listDocuments()),
      inflight.run("students", () => api.listStudents()),
      inflight.run("doc-types", () => api.docTypes()),
      inflight.run("me", () => api.me()),
    ]);
    active.confirmed = me.confirmed;
    setHtml(ui.universityPage(active, docs.map((d) => toRow(d)), students, types));
    watchPendingRows(docs.filter((d) => d.tx_state === "pending").map((d) => d.tx_hash));
  } else {
    const docs = await inflight.run("documents", () => api.listDocuments());
    setHtml(ui.studentPage(active, docs.map((d) => toRow(d))));
    watchPendingRows(docs.filter((d) => d.tx_state === "pending").map((d) => d.tx_hash));
  }
}

function watchPendingRows(txHashes: string[]): void {
  for (const txHash of txHashes) {
    void inflight
      .run(`tx:${txHash}`, () =>
        watchTx(api, txHash, { intervalMs: POLL_INTERVAL_MS }),
      )
      .then((tx) => {
        if (tx.state === "confirmed") void renderRoute();
      });
  }
}

async function handleLogin(form: HTMLFormElement): Promise<void> {
  const data = new FormData(form);
  const outcome = await loginFlow(
    api,
    data.get("role") as Role,
    String(data.get("email") ?? ""),
    String(data.get("password") ?? ""),
  );
  if (outcome.kind === "ok") {
    session = outcome.session;
    loginError = undefined;
    loginRetryable = false;
    location.hash = outcome.route;
  } else {
    // stay on the login page; only the banner changes
    session = null;
    loginError = outcome.message;
    loginRetryable = outcome.kind === "network";
    await renderRoute();
  }
}

async function handleUpload(form: HTMLFormElement): Promise<void> {
  const data = new FormData(form);
  const fileInput = form.querySelector<HTMLInputElement>('input[name="file"]');
  const file = fileInput?.files?.[0];
  const out = slot("upload-result");
  if (!file) return;
  const outcome = await submitUpload(
    api,
    Number(data.get("student_id")),
    Number(data.get("doc_type_id")),
    file,
    file.name,
  );
  if (!out) return;
  if (outcome.kind === "accepted") {
    out.innerHTML = ui.infoBanner(
      `Anchoring ${file.name}; transaction ${outcome.txHash} pending.`,
    );
    const tx = await watchTx(api, outcome.txHash, {
      intervalMs: POLL_INTERVAL_MS,
    });
    if (tx.state === "confirmed") await renderRoute();
  } else if (outcome.kind === "duplicate") {
    out.innerHTML = ui.errorBanner(
      "That exact file is already anchored; nothing was added.",
    );
  } else if (outcome.kind === "needType") {
    out.innerHTML = ui.needTypeDialog();
  } else {
    out.innerHTML = ui.errorBanner(outcome.message, true);
  }
}

async function handleShareClick(docId: number): Promise<void> {
  const out = slot("share-result");
  try {
    const share = await api.createShare(docId);
    const link = `${location.origin}${location.pathname}#/share/${share.token}`;
    if (out) {
      out.innerHTML = ui.infoBanner(
        `Share link (valid until ${share.expires_at_s} s): ${link}`,
      );
    }
  } catch (err) {
    if (out) {
      out.innerHTML = ui.errorBanner(
        err instanceof Error ? err.message : String(err),
      );
    }
  }
}

function wireEvents(): void {
  app.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    const kind = form.dataset.form;
    if (!kind) return;
    event.preventDefault();
    if (kind === "login") void handleLogin(form);
    if (kind === "upload") void handleUpload(form);
    if (kind === "verify") {
      const digest = String(new FormData(form).get("digest") ?? "");
      location.hash = `#/verify/${digest.trim()}`;
    }
    if (kind === "add-student") {
      const data = new FormData(form);
      void api
        .createStudent({
          email: String(data.get("email") ?? ""),
          password: String(data.get("password") ?? ""),
          display_name: String(data.get("display_name") ?? ""),
          enroll_no: String(data.get("enroll_no") ?? ""),
        })
        .then(() => renderRoute())
        .catch((err) => {
          setHtml(app.innerHTML + ui.errorBanner(String(err)));
        });
    }
    if (kind === "add-university") {
      const data = new FormData(form);
      void api
        .createUniversity({
          email: String(data.get("email") ?? ""),
          password: String(data.get("password") ?? ""),
          display_name: String(data.get("display_name") ?? ""),
          country: String(data.get("country") ?? ""),
        })
        .then((res) => {
          const out = slot("university-result");
          if (out) {
            out.innerHTML = ui.infoBanner(
              `Registration submitted; transaction ${res.tx_hash} pending.`,
            );
          }
          return watchTx(api, res.tx_hash, { intervalMs: POLL_INTERVAL_MS });
        })
        .then(() => renderRoute())
        .catch((err) => {
          const out = slot("university-result");
          if (out) out.innerHTML = ui.errorBanner(String(err), true);
        });
    }
  });

  app.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      "[data-action],[data-menu]",
    );
    if (!target) return;
    const menu = target.dataset.menu;
    if (menu) {
      event.preventDefault();
      app
        .querySelector(`[data-section="${menu}"]`)
        ?.scrollIntoView({ behavior: "smooth" });
      return;
    }
    const action = target.dataset.action;
    if (action === "logout") {
      session = null;
      api.token = null;
      location.hash = "#/";
      return;
    }
    if (action === "retry") {
      void renderRoute();
      return;
    }
    if (action === "dismiss") {
      target.closest(".dialog")?.remove();
      return;
    }
    if (action === "share") {
      void handleShareClick(Number(target.dataset.doc));
      return;
    }
    if (action === "toggle-student") {
      const id = Number(target.dataset.student);
      const active = target.dataset.active === "true";
      void api.setStudentActive(id, !active).then(() => renderRoute());
      return;
    }
    if (action === "toggle-university") {
      const id = Number(target.dataset.user);
      const active = target.dataset.active === "true";
      void api.setUniversityActive(id, !active).then(() => renderRoute());
    }
  });

  window.addEventListener("hashchange", () => {
    if (!session) {
      const route = parseRoute(location.hash);
      if (route.page === "dashboard") {
        // deep link into a dashboard without a session: back to login
        location.hash = "#/";
        return;
      }
    }
    void renderRoute();
  });
}

wireEvents();
void renderRoute();
