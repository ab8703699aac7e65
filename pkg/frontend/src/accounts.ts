import { createController, createSupervisor, lookupRoster, type RosterEntry } from "./api.js";
import { showError, type Ctx } from "./ctx.js";

export function renderAccounts(mount: HTMLElement, ctx: Ctx) {
  if (ctx.session.role === "administrator") {
    renderSupervisorForm(mount, ctx);
  } else if (ctx.session.role === "supervisor") {
    renderControllerForm(mount, ctx);
  } else {
    mount.textContent = "No account actions for this role.";
  }
}

function renderSupervisorForm(mount: HTMLElement, ctx: Ctx) {
  mount.innerHTML = `
    <section class="accounts">
      <h2>Create supervisor</h2>
      <form class="supervisor-form">
        <label>Display name <input name="display_name" placeholder="Brahim Benani"></label>
        <label>Email <input name="email" type="email"></label>
        <label>EO code <input name="eo" placeholder="BADR"></label>
        <button type="submit">Create account</button>
      </form>
      <p class="status" hidden></p>
      <p class="error" hidden></p>
    </section>`;

  const form = mount.querySelector(".supervisor-form") as HTMLFormElement;
  const status = mount.querySelector(".status") as HTMLElement;
  const errorBox = mount.querySelector(".error") as HTMLElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    errorBox.hidden = true;
    const data = new FormData(form);
    try {
      const account = await createSupervisor(
        ctx.session.token,
        String(data.get("display_name") ?? ""),
        String(data.get("email") ?? ""),
        String(data.get("eo") ?? ""),
      );
      status.hidden = false;
      status.textContent = `Supervisor account ${account.username} created; credentials were sent by email.`;
      form.reset();
    } catch (err) {
      showError(err, ctx, errorBox);
    }
  });
}

// Two steps: the code lookup echoes the roster identity, and only the
// confirmation with an email address actually creates the account.
function renderControllerForm(mount: HTMLElement, ctx: Ctx) {
  mount.innerHTML = `
    <section class="accounts">
      <h2>Create controller</h2>
      <form class="lookup-form">
        <label>Controller code <input name="code" placeholder="C001"></label>
        <button type="submit">Look up</button>
      </form>
      <div class="echo" hidden>
        <p class="identity"></p>
        <form class="confirm-form">
          <label>Email <input name="email" type="email"></label>
          <button type="submit">Create account</button>
        </form>
      </div>
      <p class="status" hidden></p>
      <p class="error" hidden></p>
    </section>`;

  const lookupForm = mount.querySelector(".lookup-form") as HTMLFormElement;
  const echo = mount.querySelector(".echo") as HTMLElement;
  const identity = mount.querySelector(".identity") as HTMLElement;
  const confirmForm = mount.querySelector(".confirm-form") as HTMLFormElement;
  const status = mount.querySelector(".status") as HTMLElement;
  const errorBox = mount.querySelector(".error") as HTMLElement;
  let entry: RosterEntry | null = null;

  lookupForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    errorBox.hidden = true;
    status.hidden = true;
    const data = new FormData(lookupForm);
    try {
      entry = await lookupRoster(ctx.session.token, String(data.get("code") ?? "").trim());
      identity.textContent =
        `${entry.name} ${entry.surname} (code ${entry.code}), ` +
        `U.S ${entry.assigned_us.join(", ")}`;
      echo.hidden = false;
    } catch (err) {
      entry = null;
      echo.hidden = true;
      showError(err, ctx, errorBox);
    }
  });

  confirmForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (!entry) return;
    errorBox.hidden = true;
    const data = new FormData(confirmForm);
    try {
      const account = await createController(
        ctx.session.token,
        entry.code,
        String(data.get("email") ?? ""),
      );
      status.hidden = false;
      status.textContent = `Controller account ${account.username} created; credentials were sent by email.`;
      echo.hidden = true;
      lookupForm.reset();
      confirmForm.reset();
      entry = null;
    } catch (err) {
      showError(err, ctx, errorBox);
    }
  });
}
