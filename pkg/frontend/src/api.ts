// Typed client for the ledger service.  The fetch function is injected
// so tests can fake the network; the default talks to the page origin.

import type {
  DocTypeJson,
  DocumentJson,
  Role,
  ShareJson,
  StudentJson,
  TxJson,
  UserJson,
  VerificationJson,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
  ) {
    super(`${status} ${code}`);
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

interface LoginResponse {
  token: string;
  user: UserJson;
}

export class ApiClient {
  token: string | null = null;

  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    let payload: BodyInit | undefined;
    if (body instanceof FormData) {
      payload = body;
    } else if (body !== undefined) {
      headers["content-type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: payload,
    });
    if (!res.ok) {
      let code = res.statusText || "RequestFailed";
      try {
        const data = await res.json();
        if (data && typeof data.error === "string") code = data.error;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, code);
    }
    return (await res.json()) as T;
  }

  login(role: Role, email: string, password: string): Promise<LoginResponse> {
    return this.request("POST", "/auth/login", { role, email, password });
  }

  me(): Promise<UserJson> {
    return this.request("GET", "/me");
  }

  listUniversities(): Promise<UserJson[]> {
    return this.request("GET", "/universities");
  }

  createUniversity(body: {
    email: string;
    password: string;
    display_name: string;
    country?: string;
  }): Promise<{ tx_hash: string; university: UserJson }> {
    return this.request("POST", "/universities", body);
  }

  setUniversityActive(userId: number, active: boolean): Promise<UserJson> {
    return this.request("PATCH", `/universities/${userId}`, { active });
  }

  listStudents(): Promise<StudentJson[]> {
    return this.request("GET", "/students");
  }

  createStudent(body: {
    email: string;
    password: string;
    display_name: string;
    enroll_no?: string;
    country?: string;
  }): Promise<StudentJson> {
    return this.request("POST", "/students", body);
  }

  setStudentActive(studentId: number, active: boolean): Promise<StudentJson> {
    return this.request("PATCH", `/students/${studentId}`, { active });
  }

  docTypes(): Promise<DocTypeJson[]> {
    return this.request("GET", "/doc-types");
  }

  listDocuments(): Promise<DocumentJson[]> {
    return this.request("GET", "/documents");
  }

  uploadDocument(
    studentId: number,
    docTypeId: number,
    file: Blob,
    filename: string,
  ): Promise<{ tx_hash: string; document: DocumentJson }> {
    const form = new FormData();
    form.append("student_id", String(studentId));
    form.append("doc_type_id", String(docTypeId));
    form.append("file", file, filename);
    return this.request("POST", "/documents", form);
  }

  txStatus(txHash: string): Promise<TxJson> {
    return this.request("GET", `/tx/${txHash}`);
  }

  verify(digest: string): Promise<VerificationJson> {
    return this.request("GET", `/verify/${digest}`);
  }

  createShare(
    docId: number,
    ttlDays?: number,
  ): Promise<{ token: string; url: string; expires_at_s: string }> {
    return this.request("POST", "/shares", {
      doc_id: docId,
      ttl_days: ttlDays ?? null,
    });
  }

  share(token: string): Promise<ShareJson> {
    return this.request("GET", `/share/${token}`);
  }

  mine(blocks = 1): Promise<{ mined: unknown[] }> {
    return this.request("POST", "/admin/mine", { blocks });
  }

  stats(): Promise<Record<string, unknown>> {
    return this.request("GET", "/stats");
  }
}
