import { ApiError, fetchListingText, uploadFiles, type UploadResult } from "./api.js";
import { showError, type Ctx } from "./ctx.js";
import { renderHistories, renderListing } from "./listing.js";

/** Upload form: U.S id, version type, data files; renders the control listing. */
export function renderUpload(mount: HTMLElement, ctx: Ctx) {
  mount.innerHTML = `
    <section class="upload">
      <h2>Upload</h2>
      <form class="upload-form">
        <label>U.S <input name="us_id" placeholder="0004"></label>
        <label>Version type
          <select name="version_type">
            <option value="provisional">Provisional</option>
            <option value="final">Final</option>
          </select>
        </label>
        <label>Data files <input name="files" type="file" multiple></label>
        <ul class="picked"></ul>
        <button type="submit">Upload</button>
        <p class="error" hidden></p>
      </form>
      <div class="result"></div>
    </section>`;

  const form = mount.querySelector(".upload-form") as HTMLFormElement;
  const fileInput = form.querySelector("input[type=file]") as HTMLInputElement;
  const picked = form.querySelector(".picked") as HTMLUListElement;
  const errorBox = form.querySelector(".error") as HTMLElement;
  const result = mount.querySelector(".result") as HTMLElement;

  fileInput.addEventListener("change", () => {
    picked.innerHTML = "";
    for (const file of Array.from(fileInput.files ?? [])) {
      const item = document.createElement("li");
      item.textContent = file.name;
      picked.appendChild(item);
    }
  });

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    errorBox.hidden = true;
    for (const item of picked.querySelectorAll("li")) item.classList.remove("mismatch");
    const files = Array.from(fileInput.files ?? []);
    if (files.length === 0) {
      // client-side check: no request leaves the browser for an empty selection
      errorBox.hidden = false;
      errorBox.textContent = "Select at least one data file.";
      return;
    }
    const data = new FormData(form);
    try {
      const outcome = await uploadFiles(
        ctx.session.token,
        String(data.get("us_id") ?? ""),
        String(data.get("version_type") ?? ""),
        files,
      );
      renderOutcome(outcome, result, ctx);
    } catch (err) {
      if (err instanceof ApiError && err.code === "us-mismatch") {
        // the server names the offending file in its message
        for (const item of picked.querySelectorAll("li")) {
          if (item.textContent && err.message.includes(item.textContent)) {
            item.classList.add("mismatch");
          }
        }
      }
      showError(err, ctx, errorBox);
    }
  });
}

function renderOutcome(outcome: UploadResult, result: HTMLElement, ctx: Ctx) {
  result.innerHTML = "";
  const version = outcome.version;
  const head = document.createElement("p");
  head.className = "stored";
  head.textContent =
    `Stored version ${version.ordinal} (${version.version_type}) of U.S ` +
    `${version.us_id} on ${version.date}: ${version.files.join(", ")}`;
  result.appendChild(head);
  result.appendChild(renderListing(outcome.listing));
  result.appendChild(renderHistories(outcome.files));

  const rawButton = document.createElement("button");
  rawButton.className = "show-raw";
  rawButton.textContent = "Show listing text";
  const rawError = document.createElement("p");
  rawError.className = "error";
  rawError.hidden = true;
  rawButton.addEventListener("click", async () => {
    try {
      const text = await fetchListingText(ctx.session.token, outcome.listing_id);
      const pre = document.createElement("pre");
      pre.className = "raw-listing";
      pre.textContent = text;
      result.appendChild(pre);
      rawButton.remove();
    } catch (err) {
      showError(err, ctx, rawError);
    }
  });
  result.appendChild(rawButton);
  result.appendChild(rawError);
}
