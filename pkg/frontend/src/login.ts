import { login, resetPassword, type Role, type SessionInfo } from "./api.js";
import { errorText } from "./ctx.js";

// Anything typed into the reset form gets the same answer, matching the
// server's uniform response; the message never confirms that an account exists.
const RESET_SENT = "If the details match an account, a new password has been emailed.";

export function renderLogin(mount: HTMLElement, onLogin: (session: SessionInfo) => void) {
  mount.innerHTML = `
    <div class="login">
      <h1>panelvault</h1>
      <form class="login-form">
        <label>Username <input name="username" autocomplete="username"></label>
        <label>Password <input name="password" type="password" autocomplete="current-password"></label>
        <label>Role
          <select name="role">
            <option value="controller">Controller</option>
            <option value="supervisor">Supervisor</option>
            <option value="administrator">Administrator</option>
          </select>
        </label>
        <button type="submit">Sign in</button>
        <p class="error" hidden></p>
      </form>
      <div class="forgot">
        <h2>Forgot password</h2>
        <form class="reset-form">
          <label>Username <input name="username"></label>
          <label>Email <input name="email" type="email"></label>
          <button type="submit">Send new password</button>
          <p class="status" hidden></p>
        </form>
      </div>
    </div>`;

  const loginForm = mount.querySelector(".login-form") as HTMLFormElement;
  const loginError = loginForm.querySelector(".error") as HTMLElement;
  loginForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(loginForm);
    try {
      const session = await login(
        String(data.get("username") ?? ""),
        String(data.get("password") ?? ""),
        String(data.get("role") ?? "") as Role,
      );
      onLogin(session);
    } catch (err) {
      loginError.hidden = false;
      loginError.textContent = errorText(err);
    }
  });

  const resetForm = mount.querySelector(".reset-form") as HTMLFormElement;
  const resetStatus = resetForm.querySelector(".status") as HTMLElement;
  resetForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(resetForm);
    resetStatus.hidden = false;
    try {
      await resetPassword(String(data.get("username") ?? ""), String(data.get("email") ?? ""));
      resetStatus.textContent = RESET_SENT;
    } catch (err) {
      // only reachable for malformed requests; a well-formed pair is always "sent"
      resetStatus.textContent = errorText(err);
    }
  });
}
