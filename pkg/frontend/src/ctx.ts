import { ApiError } from "./api.js";
import type { UiSession } from "./session.js";

/** What every view gets from the shell hosting it. */
export interface Ctx {
  session: UiSession;
  /** Called when the server no longer knows our token; leads back to login. */
  expired(): void;
  /** Called after a profile edit so the shell can refresh the identity block. */
  profileChanged(): void;
}

export function errorText(err: unknown): string {
  return err instanceof ApiError ? err.message : String(err);
}

/**
 * Routes a request failure: an expired or revoked session leaves the
 * reserved space entirely, anything else is rendered inline in `box`.
 */
export function showError(err: unknown, ctx: Ctx, box: HTMLElement): void {
  if (err instanceof ApiError && err.code === "unknown-session") {
    ctx.expired();
    return;
  }
  box.hidden = false;
  box.textContent = errorText(err);
}
