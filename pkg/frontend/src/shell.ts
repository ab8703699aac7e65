// The reserved space everyone lands in after login: a left menu, an identity
// block with profile and logout actions, and a content block the views render
// into. Navigation swaps the content block in place; there is no page reload.

import { logout } from "./api.js";
import { renderAccounts } from "./accounts.js";
import type { Ctx } from "./ctx.js";
import { menuFor, type ViewName } from "./menu.js";
import { renderProfile } from "./profile.js";
import { renderReport } from "./report.js";
import { clearSession, type UiSession } from "./session.js";
import { renderUpload } from "./upload.js";

const VIEWS: Record<ViewName, (mount: HTMLElement, ctx: Ctx) => void> = {
  accounts: renderAccounts,
  upload: renderUpload,
  report: renderReport,
  profile: renderProfile,
};

export function renderShell(mount: HTMLElement, session: UiSession, onLeave: () => void) {
  mount.innerHTML = `
    <div class="shell">
      <header class="identity">
        <span class="who"></span>
        <button class="edit-profile">Edit profile</button>
        <button class="logout">Log out</button>
      </header>
      <nav class="menu"></nav>
      <main class="content"></main>
    </div>`;

  const who = mount.querySelector(".who") as HTMLElement;
  const nav = mount.querySelector(".menu") as HTMLElement;
  const content = mount.querySelector(".content") as HTMLElement;

  const leave = () => {
    clearSession();
    onLeave();
  };
  const ctx: Ctx = {
    session,
    expired: leave,
    profileChanged: () => {
      who.textContent = `${session.display_name} (${session.role})`;
    },
  };
  ctx.profileChanged();

  function navigate(view: ViewName) {
    content.innerHTML = "";
    VIEWS[view](content, ctx);
  }

  const items = menuFor(session.role);
  for (const item of items) {
    const button = document.createElement("button");
    button.textContent = item.label;
    button.dataset.view = item.view;
    button.addEventListener("click", () => navigate(item.view));
    nav.appendChild(button);
  }

  (mount.querySelector(".edit-profile") as HTMLElement).addEventListener("click", () =>
    navigate("profile"),
  );
  (mount.querySelector(".logout") as HTMLElement).addEventListener("click", async () => {
    try {
      await logout(session.token);
    } catch {
      // the token may already be gone server-side; leave either way
    }
    leave();
  });

  navigate(items[0].view);
}
