// Thin typed client for the platform API. Every call resolves to the parsed
// response body or rejects with ApiError carrying the server's machine code,
// so views can branch on codes like "us-mismatch" or "unknown-session".
//
// The bearer token travels only in the Authorization header, never in a URL.

export type Role = "administrator" | "supervisor" | "controller";

export interface SessionInfo {
  token: string;
  role: Role;
  username: string;
  display_name: string;
  eo: string | null;
}

export interface AccountInfo {
  username: string;
  display_name: string;
  email: string;
  role: Role;
  eo: string | null;
  controller_code: string | null;
}

export interface RosterEntry {
  code: string;
  name: string;
  surname: string;
  eo: string;
  assigned_us: string[];
}

export interface Finding {
  file: string;
  line: number;
  subject: string;
  severity: "error" | "warning";
  message: string;
}

export interface Listing {
  produced_at: string;
  inputs: string[];
  findings: Finding[];
  summary: { errors: number; warnings: number; by_subject: Record<string, number> };
}

export interface FileHistory {
  filename: string;
  first_received: string;
  last_received: string;
}

export interface ControlResult {
  listing_id: string;
  listing: Listing;
  files: FileHistory[];
}

export interface VersionInfo {
  us_id: string;
  ordinal: number;
  date: string;
  version_type: "provisional" | "final";
  files: string[];
}

export interface UploadResult extends ControlResult {
  version: VersionInfo;
}

export interface ReportRow {
  eo: string;
  us_id: string;
  files: string[];
  version_type: string | null; // display label, null before the first upload
  version_dates: string[]; // always six entries, "-----" when unused
  extra_versions: number;
}

export interface Report {
  generated_at: string;
  role: Role;
  username: string;
  rows: ReportRow[];
}

export interface ReportQuery {
  eo?: string;
  us_id?: string;
  version_type?: string;
  date_from?: string;
  date_to?: string;
}

export interface ProfileEdit {
  display_name?: string;
  email?: string;
  password?: string;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

let baseUrl = "";

/** Point the client at a non-default origin (tests, reverse proxies). */
export function setBaseUrl(url: string) {
  baseUrl = url.replace(/\/$/, "");
}

async function toError(res: Response): Promise<ApiError> {
  const detail = (await res.json().catch(() => ({}))) as {
    code?: string;
    message?: string;
  };
  return new ApiError(detail.code ?? "internal", detail.message ?? res.statusText, res.status);
}

async function call<T>(method: string, path: string, token?: string, body?: unknown): Promise<T> {
  const headers: Record<string, string> = {};
  if (token) headers["Authorization"] = `Bearer ${token}`;
  let payload: BodyInit | undefined;
  if (body instanceof FormData) {
    payload = body; // fetch sets the multipart boundary header itself
  } else if (body !== undefined) {
    headers["Content-Type"] = "application/json";
    payload = JSON.stringify(body);
  }
  const res = await fetch(baseUrl + path, { method, headers, body: payload });
  if (!res.ok) throw await toError(res);
  return res.json() as Promise<T>;
}

export function login(username: string, password: string, role: Role): Promise<SessionInfo> {
  return call("POST", "/api/session", undefined, { username, password, role });
}

export function logout(token: string): Promise<{ ok: boolean }> {
  return call("DELETE", "/api/session", token);
}

/** The server answers the same way whether or not the pair matches an account. */
export function resetPassword(username: string, email: string): Promise<{ ok: boolean }> {
  return call("POST", "/api/password-reset", undefined, { username, email });
}

export function editProfile(token: string, edit: ProfileEdit): Promise<AccountInfo> {
  return call("PATCH", "/api/profile", token, edit);
}

export function createSupervisor(
  token: string,
  displayName: string,
  email: string,
  eo: string,
): Promise<AccountInfo> {
  return call("POST", "/api/accounts/supervisors", token, {
    display_name: displayName,
    email,
    eo,
  });
}

export function lookupRoster(token: string, code: string): Promise<RosterEntry> {
  return call("GET", `/api/roster/${encodeURIComponent(code)}`, token);
}

export function createController(token: string, code: string, email: string): Promise<AccountInfo> {
  return call("POST", "/api/accounts/controllers", token, { code, email });
}

export function uploadFiles(
  token: string,
  usId: string,
  versionType: string,
  files: File[],
): Promise<UploadResult> {
  const form = new FormData();
  form.append("us_id", usId);
  form.append("version_type", versionType);
  for (const file of files) form.append("files", file, file.name);
  return call("POST", "/api/uploads", token, form);
}

export function fetchReport(token: string, query: ReportQuery = {}): Promise<Report> {
  const params = new URLSearchParams();
  for (const [key, value] of Object.entries(query)) {
    if (value) params.set(key, value);
  }
  const qs = params.toString();
  return call("GET", qs ? `/api/report?${qs}` : "/api/report", token);
}

export function runControl(token: string, usId: string): Promise<ControlResult> {
  return call("POST", `/api/control/${encodeURIComponent(usId)}`, token);
}

export function fetchListing(
  token: string,
  listingId: string,
): Promise<{ listing_id: string; us_id: string; listing: Listing }> {
  return call("GET", `/api/listings/${encodeURIComponent(listingId)}`, token);
}

/** The exact text form of a saved listing, byte-identical to the CLI output. */
export async function fetchListingText(token: string, listingId: string): Promise<string> {
  const res = await fetch(`${baseUrl}/api/listings/${encodeURIComponent(listingId)}?format=text`, {
    headers: { Authorization: `Bearer ${token}` },
  });
  if (!res.ok) throw await toError(res);
  return res.text();
}
