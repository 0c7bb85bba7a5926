// View-level state machines.  Each flow takes the API client plus plain
// inputs and returns a tagged outcome the renderer switches on; the
// browser glue in main.ts stays thin and untested.

import { ApiClient, ApiError } from "./api.js";
import {
  DocumentRow,
  SessionView,
  ShareJson,
  TxJson,
  VerificationJson,
  isHexDigest,
  routeForRole,
  toRow,
} from "./model.js";

export type LoginOutcome =
  | { kind: "ok"; session: SessionView; route: string }
  | { kind: "rejected"; message: string }
  | { kind: "network"; message: string };

// A failed login must leave the user exactly where they are, so the
// outcome carries no route in the rejected and network cases.
export async function loginFlow(
  api: ApiClient,
  role: SessionView["role"],
  email: string,
  password: string,
): Promise<LoginOutcome> {
  try {
    const res = await api.login(role, email, password);
    api.token = res.token;
    const session: SessionView = {
      token: res.token,
      role: res.user.role,
      displayName: res.user.display_name,
      userId: res.user.user_id,
      confirmed: res.user.confirmed,
    };
    return { kind: "ok", session, route: routeForRole(session.role) };
  } catch (err) {
    if (err instanceof ApiError && err.status === 401) {
      return { kind: "rejected", message: "Invalid email or password." };
    }
    const message = err instanceof Error ? err.message : String(err);
    return { kind: "network", message: `Service unreachable (${message}). Retry?` };
  }
}

export type UploadOutcome =
  | { kind: "accepted"; row: DocumentRow; txHash: string }
  | { kind: "duplicate" }
  | { kind: "needType" }
  | { kind: "rejected"; message: string };

export async function submitUpload(
  api: ApiClient,
  studentId: number,
  docTypeId: number,
  file: Blob,
  filename: string,
): Promise<UploadOutcome> {
  try {
    const res = await api.uploadDocument(studentId, docTypeId, file, filename);
    return { kind: "accepted", row: toRow(res.document), txHash: res.tx_hash };
  } catch (err) {
    if (err instanceof ApiError) {
      if (err.status === 409) return { kind: "duplicate" };
      if (err.status === 422) return { kind: "needType" };
      return { kind: "rejected", message: err.code };
    }
    const message = err instanceof Error ? err.message : String(err);
    return { kind: "rejected", message };
  }
}

export interface PollOptions {
  intervalMs?: number;
  maxAttempts?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

// Poll until the transaction is mined.  Resolves with the last answer
// even if that is still "pending" so the caller can show a stuck row
// instead of spinning forever.
export async function watchTx(
  api: ApiClient,
  txHash: string,
  opts: PollOptions = {},
): Promise<TxJson> {
  const interval = opts.intervalMs ?? 2000;
  const max = opts.maxAttempts ?? 60;
  const sleep = opts.sleep ?? defaultSleep;
  let last: TxJson = { state: "pending" };
  for (let attempt = 0; attempt < max; attempt++) {
    last = await api.txStatus(txHash);
    if (last.state === "confirmed") return last;
    await sleep(interval);
  }
  return last;
}

export type VerifyOutcome =
  | { kind: "invalid"; hint: string }
  | { kind: "verified"; result: VerificationJson }
  | { kind: "unverified"; digest: string }
  | { kind: "error"; message: string };

// Malformed input never reaches the network; the format hint is local.
export async function verifyFlow(
  api: ApiClient,
  input: string,
): Promise<VerifyOutcome> {
  const digest = input.trim().replace(/^0x/i, "").toLowerCase();
  if (!isHexDigest(digest)) {
    return {
      kind: "invalid",
      hint: "A document digest is 64 hexadecimal characters (SHA-256).",
    };
  }
  try {
    const result = await api.verify(digest);
    return result.found
      ? { kind: "verified", result }
      : { kind: "unverified", digest };
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    return { kind: "error", message };
  }
}

export type ShareOutcome =
  | { kind: "ok"; share: ShareJson }
  | { kind: "expired" }
  | { kind: "unknown" }
  | { kind: "error"; message: string };

export async function shareFlow(
  api: ApiClient,
  token: string,
): Promise<ShareOutcome> {
  try {
    const share = await api.share(token);
    return { kind: "ok", share };
  } catch (err) {
    if (err instanceof ApiError) {
      if (err.status === 410) return { kind: "expired" };
      if (err.status === 404) return { kind: "unknown" };
    }
    const message = err instanceof Error ? err.message : String(err);
    return { kind: "error", message };
  }
}

// One outstanding request per key; concurrent callers share the promise.
export class InFlight {
  private readonly pending = new Map<string, Promise<unknown>>();

  run<T>(key: string, fn: () => Promise<T>): Promise<T> {
    const existing = this.pending.get(key);
    if (existing) return existing as Promise<T>;
    const p = fn().finally(() => {
      this.pending.delete(key);
    });
    this.pending.set(key, p);
    return p;
  }
}
