// Shared view-model types and the routing table.  Everything the UI
// knows it learned from the HTTP API; nothing here touches the chain.

export type Role = "admin" | "university" | "student";

export interface SessionView {
  token: string;
  role: Role;
  displayName: string;
  userId: number;
  confirmed?: boolean;
}

export interface UserJson {
  user_id: number;
  role: Role;
  email: string;
  display_name: string;
  country: string;
  address: string;
  active: boolean;
  created_at_s: string;
  confirmed?: boolean;
}

export interface StudentJson {
  student_id: number;
  user_id: number;
  university_id: number;
  email: string;
  display_name: string;
  enroll_no: string;
  active: boolean;
  created_at_s: string;
  documents: number;
}

export interface DocTypeJson {
  doc_type_id: number;
  name: string;
}

export interface DocumentJson {
  doc_id: number;
  student_id: number;
  university_id: number;
  doc_type_id: number;
  doc_type: string;
  filename: string;
  digest: string;
  tx_hash: string;
  size_bytes: number;
  created_at_s: string;
  tx_state: "pending" | "confirmed" | "unknown";
}

export interface VerificationJson {
  found: boolean;
  digest: string;
  issuer?: string;
  issuer_name?: string;
  block_number?: number;
  confirmed_at_s?: string;
  doc_type_id?: number;
  doc_type?: string;
}

export interface ShareJson {
  token: string;
  expires_at_s: string;
  document: DocumentJson;
  verification: VerificationJson;
}

export interface TxJson {
  state: "pending" | "confirmed";
  block_number?: number;
  status?: string;
  gas_used?: number;
  fee_wei?: string;
}

// A document as the dashboard shows it: chain status plus whether the
// share button is live.  Shares only make sense once the digest is
// actually on chain.
export interface DocumentRow {
  docId: number;
  docType: string;
  filename: string;
  digest: string;
  txHash: string;
  status: "pending" | "confirmed" | "unknown";
  blockNumber?: number;
  shareEnabled: boolean;
}

export function toRow(doc: DocumentJson, blockNumber?: number): DocumentRow {
  return {
    docId: doc.doc_id,
    docType: doc.doc_type,
    filename: doc.filename,
    digest: doc.digest,
    txHash: doc.tx_hash,
    status: doc.tx_state,
    blockNumber,
    shareEnabled: doc.tx_state === "confirmed",
  };
}

export const MENUS: Record<Role, readonly string[]> = {
  admin: ["Add University", "University Manage", "Student Manage"],
  university: [
    "Document List",
    "Upload Document",
    "Add Students",
    "Manage Students",
  ],
  student: ["My Certificates"],
};

export function menusFor(role: Role): readonly string[] {
  return MENUS[role];
}

export type Route =
  | { page: "landing" }
  | { page: "dashboard"; role: Role }
  | { page: "verify"; digest?: string }
  | { page: "share"; token: string };

export function routeForRole(role: Role): string {
  return `#/${role}`;
}

export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/");
  switch (parts[0]) {
    case "admin":
      return { page: "dashboard", role: "admin" };
    case "university":
      return { page: "dashboard", role: "university" };
    case "student":
      return { page: "dashboard", role: "student" };
    case "verify":
      return { page: "verify", digest: parts[1] || undefined };
    case "share":
      return parts[1] ? { page: "share", token: parts[1] } : { page: "landing" };
    default:
      return { page: "landing" };
  }
}

export function isHexDigest(value: string): boolean {
  return /^[0-9a-fA-F]{64}$/.test(value);
}
