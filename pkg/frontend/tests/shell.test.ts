import { afterEach, describe, expect, it, vi } from "vitest";
import { getSession, setSession } from "../src/session.js";
import { renderShell } from "../src/shell.js";
import { demoServer, SESSIONS } from "./server.js";
import { stubFetch, submit, tick, type Handler } from "./stub.js";

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

function mountShell(role: "administrator" | "supervisor" | "controller", handler: Handler) {
  const calls = stubFetch(handler);
  const mount = document.createElement("div");
  document.body.appendChild(mount);
  const session = { ...SESSIONS[role] };
  setSession(session);
  let left = 0;
  renderShell(mount, session, () => {
    left += 1;
    mount.innerHTML = "<div class='back-at-login'></div>";
  });
  return { mount, calls, leftCount: () => left };
}

describe("reserved space shell", () => {
  it("shows who is signed in and builds the menu from the role", () => {
    const { mount } = mountShell("controller", demoServer());
    expect((mount.querySelector(".who") as HTMLElement).textContent).toBe(
      "Karim Alaoui (controller)",
    );
    const labels = [...mount.querySelectorAll(".menu button")].map((b) => b.textContent);
    expect(labels).toEqual(["Upload", "Pursuit Report"]);
  });

  it("loads the first menu entry by default: accounts for an administrator", () => {
    const { mount } = mountShell("administrator", demoServer());
    expect(mount.querySelector(".content .supervisor-form")).not.toBeNull();
  });

  it("loads the upload form by default for a controller", () => {
    const { mount } = mountShell("controller", demoServer());
    expect(mount.querySelector(".content .upload-form")).not.toBeNull();
  });

  it("navigates between views in place", async () => {
    const { mount } = mountShell("controller", demoServer());
    (mount.querySelector(".menu button[data-view=report]") as HTMLButtonElement).click();
    await tick();
    expect(mount.querySelector(".content .pursuit")).not.toBeNull();
    expect(mount.querySelector(".content .upload-form")).toBeNull();
  });

  it("logs out over the API and returns to the login view", async () => {
    const { mount, calls, leftCount } = mountShell("controller", demoServer());
    (mount.querySelector(".logout") as HTMLButtonElement).click();
    await tick();
    expect(calls[0].method).toBe("DELETE");
    expect(calls[0].url).toBe("/api/session");
    expect(leftCount()).toBe(1);
    expect(getSession()).toBeNull();
    expect(mount.querySelector(".back-at-login")).not.toBeNull();
  });

  it("returns to login when any view hits an expired session", async () => {
    const demo = demoServer();
    let dead = false;
    const handler: Handler = (call) =>
      dead ? { status: 401, body: { code: "unknown-session", message: "expired" } } : demo(call);
    const { mount, leftCount } = mountShell("supervisor", handler);
    dead = true;
    (mount.querySelector(".menu button[data-view=report]") as HTMLButtonElement).click();
    await tick();
    expect(leftCount()).toBe(1);
    expect(getSession()).toBeNull();
    expect(mount.querySelector(".back-at-login")).not.toBeNull();
  });

  it("updates the identity block after a profile edit", async () => {
    const { mount } = mountShell("controller", demoServer());
    (mount.querySelector(".edit-profile") as HTMLButtonElement).click();
    const form = mount.querySelector(".profile-form") as HTMLFormElement;
    expect((form.querySelector("input[name=display_name]") as HTMLInputElement).value).toBe(
      "Karim Alaoui",
    );
    (form.querySelector("input[name=display_name]") as HTMLInputElement).value = "Karim A.";
    submit(form);
    await tick();
    expect((mount.querySelector(".who") as HTMLElement).textContent).toBe(
      "Karim A. (controller)",
    );
    expect((mount.querySelector(".profile .status") as HTMLElement).textContent).toBe(
      "Profile updated.",
    );
  });

  it("treats an empty profile edit as nothing to send", async () => {
    const { mount, calls } = mountShell("controller", demoServer());
    (mount.querySelector(".edit-profile") as HTMLButtonElement).click();
    const form = mount.querySelector(".profile-form") as HTMLFormElement;
    (form.querySelector("input[name=display_name]") as HTMLInputElement).value = "";
    submit(form);
    await tick();
    expect(calls).toHaveLength(0);
    expect((mount.querySelector(".profile .status") as HTMLElement).textContent).toBe(
      "Nothing to update.",
    );
  });
});
