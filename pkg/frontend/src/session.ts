// The session lives in module memory only. Nothing is written to
// localStorage or cookies, so closing the tab forgets the token and every
// fresh page load starts at the login form.

import type { SessionInfo } from "./api.js";

export type UiSession = SessionInfo;

let current: UiSession | null = null;

export function setSession(session: UiSession) {
  current = session;
}

export function getSession(): UiSession | null {
  return current;
}

export function clearSession() {
  current = null;
}
