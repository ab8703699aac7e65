// A canned in-memory stand-in for the platform service. Responses copy the
// real payload shapes; data mirrors the BADR/ESTE fixtures used server-side.

import type {
  Listing,
  ReportRow,
  Role,
  RosterEntry,
  SessionInfo,
} from "../src/api.js";
import type { Ctx } from "../src/ctx.js";
import type { Handler, RecordedCall, StubResult } from "./stub.js";

export const SESSIONS: Record<Role, SessionInfo> = {
  controller: {
    token: "tok-controller",
    role: "controller",
    username: "b.alaoui",
    display_name: "Karim Alaoui",
    eo: "BADR",
  },
  supervisor: {
    token: "tok-supervisor",
    role: "supervisor",
    username: "b.benani",
    display_name: "Brahim Benani",
    eo: "BADR",
  },
  administrator: {
    token: "tok-admin",
    role: "administrator",
    username: "admin",
    display_name: "admin",
    eo: null,
  },
};

const ROSTER: Record<string, RosterEntry> = {
  C001: { code: "C001", name: "Karim", surname: "Alaoui", eo: "BADR", assigned_us: ["0004", "0006"] },
  C003: { code: "C003", name: "Hassan", surname: "Berrada", eo: "BADR", assigned_us: ["0010"] },
};

export function cleanListing(inputs: string[]): Listing {
  return {
    produced_at: "2012-05-31T10:00:00",
    inputs,
    findings: [],
    summary: { errors: 0, warnings: 0, by_subject: {} },
  };
}

export const R001_LISTING: Listing = {
  produced_at: "2012-05-31T10:00:00",
  inputs: ["B0004s104D.dat"],
  findings: [
    {
      file: "B0004s104D.dat",
      line: 1,
      subject: "R001",
      severity: "error",
      message: "child reported as married",
    },
  ],
  summary: { errors: 1, warnings: 0, by_subject: { R001: 1 } },
};

export const LISTING_TEXT =
  "CONTROL LISTING 2012-05-31T10:00:00 files=1\n" +
  "B0004s104D.dat:1 error R001 child reported as married\n" +
  "SUMMARY errors=1 warnings=0\n";

export const REPORT_ROWS: ReportRow[] = [
  {
    eo: "BADR",
    us_id: "0004",
    files: ["B0004s104D.dat", "B0004s108D.dat", "B0004s110D.dat"],
    version_type: "Provisional",
    version_dates: ["31-05-2012", "-----", "-----", "-----", "-----", "-----"],
    extra_versions: 0,
  },
  {
    eo: "BADR",
    us_id: "0006",
    files: ["B0006s105D.dat", "B0006s107D.dat"],
    version_type: "Provisional",
    version_dates: ["26-05-2012", "31-05-2012", "-----", "-----", "-----", "-----"],
    extra_versions: 0,
  },
  {
    eo: "BADR",
    us_id: "0010",
    files: [],
    version_type: null,
    version_dates: ["-----", "-----", "-----", "-----", "-----", "-----"],
    extra_versions: 0,
  },
  {
    eo: "ESTE",
    us_id: "0129",
    files: ["E0129s216D.dat"],
    version_type: "Final",
    version_dates: ["31-05-2012", "01-06-2012", "-----", "-----", "-----", "-----"],
    extra_versions: 0,
  },
];

function fail(status: number, code: string, message: string): StubResult {
  return { status, body: { code, message } };
}

function accountFor(displayName: string, email: string, role: Role, eo: string | null): StubResult {
  const surname = displayName.split(" ").pop() ?? displayName;
  const username = eo ? `${eo[0].toLowerCase()}.${surname.toLowerCase()}` : surname.toLowerCase();
  return {
    status: 200,
    body: {
      username,
      display_name: displayName,
      email,
      role,
      eo,
      controller_code: role === "controller" ? "C001" : null,
    },
  };
}

/**
 * The happy-path server for flow tests. Knows the three fixture sessions,
 * the BADR roster, and the report rows above; rejects what the real service
 * would reject (bad filenames, foreign units, missing tokens).
 */
export function demoServer(): Handler {
  return (call: RecordedCall): StubResult => {
    const url = new URL(call.url, "http://test");
    const path = url.pathname;
    const { method } = call;

    if (method === "POST" && path === "/api/session") {
      const body = call.json as { username: string; password: string; role: Role };
      if (body.password === "wrong") {
        return fail(401, "bad-credentials", "wrong username, password, or role");
      }
      return { status: 200, body: SESSIONS[body.role] };
    }
    if (method === "POST" && path === "/api/password-reset") {
      return { status: 200, body: { ok: true } };
    }

    const token = call.headers["Authorization"] ?? "";
    if (!token.startsWith("Bearer tok-")) {
      return fail(401, "unknown-session", "missing bearer token");
    }

    if (method === "DELETE" && path === "/api/session") {
      return { status: 200, body: { ok: true } };
    }
    if (method === "PATCH" && path === "/api/profile") {
      const edit = call.json as { display_name?: string; email?: string };
      return accountFor(
        edit.display_name ?? "Karim Alaoui",
        edit.email ?? "karim@example.net",
        "controller",
        "BADR",
      );
    }
    if (method === "POST" && path === "/api/accounts/supervisors") {
      const body = call.json as { display_name: string; email: string; eo: string };
      if (!["BADR", "ESTE"].includes(body.eo)) return fail(404, "unknown-eo", `no EO ${body.eo}`);
      return accountFor(body.display_name, body.email, "supervisor", body.eo);
    }
    if (method === "GET" && path.startsWith("/api/roster/")) {
      const code = decodeURIComponent(path.slice("/api/roster/".length));
      const entry = ROSTER[code];
      if (!entry) return fail(404, "unknown-code", `no controller code ${code}`);
      return { status: 200, body: entry };
    }
    if (method === "POST" && path === "/api/accounts/controllers") {
      const body = call.json as { code: string; email: string };
      const entry = ROSTER[body.code];
      if (!entry) return fail(404, "unknown-code", `no controller code ${body.code}`);
      return accountFor(`${entry.name} ${entry.surname}`, body.email, "controller", entry.eo);
    }
    if (method === "POST" && path === "/api/uploads") {
      return handleUpload(call);
    }
    if (method === "GET" && path === "/api/report") {
      let rows = REPORT_ROWS;
      const eo = url.searchParams.get("eo");
      const usId = url.searchParams.get("us_id");
      if (eo) rows = rows.filter((row) => row.eo === eo);
      if (usId) rows = rows.filter((row) => row.us_id === usId);
      return {
        status: 200,
        body: { generated_at: "2012-05-31T10:00:00", role: "controller", username: "b.alaoui", rows },
      };
    }
    if (method === "POST" && path.startsWith("/api/control/")) {
      const usId = decodeURIComponent(path.slice("/api/control/".length));
      if (usId === "0129") {
        return {
          status: 200,
          body: {
            listing_id: "feedc0de",
            listing: cleanListing(["E0129s216D.dat"]),
            files: [
              {
                filename: "E0129s216D.dat",
                first_received: "2012-05-31",
                last_received: "2012-06-01",
              },
            ],
          },
        };
      }
      if (usId === "0004") {
        return {
          status: 200,
          body: {
            listing_id: "cafe0004",
            listing: R001_LISTING,
            files: [
              {
                filename: "B0004s104D.dat",
                first_received: "2012-05-31",
                last_received: "2012-05-31",
              },
            ],
          },
        };
      }
      if (usId === "0010") return fail(409, "no-versions", "no versions for U.S 0010");
      return fail(404, "unknown-us", `unknown U.S ${usId}`);
    }
    if (method === "GET" && path.startsWith("/api/listings/")) {
      const listingId = decodeURIComponent(path.slice("/api/listings/".length));
      if (!/^[0-9a-f]+$/.test(listingId)) return fail(404, "unknown-listing", "no such listing");
      if (url.searchParams.get("format") === "text") {
        return { status: 200, text: LISTING_TEXT };
      }
      return {
        status: 200,
        body: { listing_id: listingId, us_id: "0004", listing: R001_LISTING },
      };
    }

    return fail(404, "unknown-endpoint", `${method} ${path} is not part of the API`);
  };
}

function handleUpload(call: RecordedCall): StubResult {
  const usId = String(call.form?.get("us_id")?.[0] ?? "");
  const versionType = String(call.form?.get("version_type")?.[0] ?? "");
  const files = (call.form?.get("files") ?? []) as File[];
  if (files.length === 0) return fail(422, "empty-upload", "upload contains no files");
  if (!["provisional", "final"].includes(versionType)) {
    return fail(422, "invalid-request", `bad version_type ${versionType}`);
  }
  const names: string[] = [];
  for (const file of files) {
    const match = file.name.match(/^[A-Z](\d{4})s\d{3}D\.dat$/);
    if (!match) return fail(422, "malformed-filename", `cannot parse ${file.name}`);
    if (match[1] !== usId) {
      return fail(422, "us-mismatch", `${file.name} belongs to U.S ${match[1]}, not ${usId}`);
    }
    names.push(file.name);
  }
  names.sort();
  return {
    status: 200,
    body: {
      listing_id: "cafe0004",
      listing: usId === "0004" ? R001_LISTING : cleanListing(names),
      files: names.map((name) => ({
        filename: name,
        first_received: "2012-05-31",
        last_received: "2012-05-31",
      })),
      version: {
        us_id: usId,
        ordinal: 1,
        date: "2012-05-31",
        version_type: versionType,
        files: names,
      },
    },
  };
}

/** A view context wired to counters instead of the shell. */
export function makeCtx(role: Role = "controller") {
  let expired = 0;
  let profileEdits = 0;
  const ctx: Ctx = {
    session: { ...SESSIONS[role] },
    expired: () => {
      expired += 1;
    },
    profileChanged: () => {
      profileEdits += 1;
    },
  };
  return { ctx, wasExpired: () => expired > 0, profileEdits: () => profileEdits };
}
