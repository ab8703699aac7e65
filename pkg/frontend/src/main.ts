// Entry point: everything renders into #app, starting at the login form.

import { renderLogin } from "./login.js";
import { setSession } from "./session.js";
import { renderShell } from "./shell.js";

export function boot(mount: HTMLElement) {
  const showLogin = () =>
    renderLogin(mount, (session) => {
      setSession(session);
      renderShell(mount, session, showLogin);
    });
  showLogin();
}

const app = document.getElementById("app");
if (app) boot(app);
