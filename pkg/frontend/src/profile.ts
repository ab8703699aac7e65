import { editProfile, type ProfileEdit } from "./api.js";
import { showError, type Ctx } from "./ctx.js";

/** Edit own display name, email, or password; blank fields stay unchanged. */
export function renderProfile(mount: HTMLElement, ctx: Ctx) {
  mount.innerHTML = `
    <section class="profile">
      <h2>Edit profile</h2>
      <form class="profile-form">
        <label>Display name <input name="display_name"></label>
        <label>Email <input name="email" type="email"></label>
        <label>New password <input name="password" type="password" autocomplete="new-password"></label>
        <button type="submit">Save</button>
      </form>
      <p class="status" hidden></p>
      <p class="error" hidden></p>
    </section>`;

  const form = mount.querySelector(".profile-form") as HTMLFormElement;
  const nameInput = form.querySelector("input[name=display_name]") as HTMLInputElement;
  nameInput.value = ctx.session.display_name;
  const status = mount.querySelector(".status") as HTMLElement;
  const errorBox = mount.querySelector(".error") as HTMLElement;

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    errorBox.hidden = true;
    status.hidden = true;
    const data = new FormData(form);
    const edit: ProfileEdit = {};
    for (const key of ["display_name", "email", "password"] as const) {
      const value = String(data.get(key) ?? "").trim();
      if (value) edit[key] = value;
    }
    if (Object.keys(edit).length === 0) {
      status.hidden = false;
      status.textContent = "Nothing to update.";
      return;
    }
    try {
      const account = await editProfile(ctx.session.token, edit);
      ctx.session.display_name = account.display_name;
      ctx.profileChanged();
      status.hidden = false;
      status.textContent = "Profile updated.";
      (form.querySelector("input[name=password]") as HTMLInputElement).value = "";
    } catch (err) {
      showError(err, ctx, errorBox);
    }
  });
}
