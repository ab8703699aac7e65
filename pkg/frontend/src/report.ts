import { fetchReport, runControl, type ReportQuery, type ReportRow } from "./api.js";
import { showError, type Ctx } from "./ctx.js";
import { renderHistories, renderListing } from "./listing.js";

// Six version-date slots per row, like the tracking sheets the field teams use.
const DATE_SLOTS = 6;
const COLUMNS = 4 + DATE_SLOTS + 1;

export function renderReport(mount: HTMLElement, ctx: Ctx) {
  mount.innerHTML = `
    <section class="report">
      <h2>Pursuit Report</h2>
      <form class="filters">
        <input name="eo" placeholder="EO">
        <input name="us_id" placeholder="U.S">
        <select name="version_type">
          <option value="">Any type</option>
          <option value="provisional">Provisional</option>
          <option value="final">Final</option>
        </select>
        <input name="date_from" placeholder="From YYYY-MM-DD">
        <input name="date_to" placeholder="To YYYY-MM-DD">
        <button type="submit">Search</button>
      </form>
      <p class="error" hidden></p>
      <div class="table-wrap"></div>
    </section>`;

  const filters = mount.querySelector(".filters") as HTMLFormElement;
  const errorBox = mount.querySelector(".error") as HTMLElement;
  const wrap = mount.querySelector(".table-wrap") as HTMLElement;

  async function refresh(query: ReportQuery) {
    errorBox.hidden = true;
    try {
      const report = await fetchReport(ctx.session.token, query);
      wrap.innerHTML = "";
      wrap.appendChild(buildTable(report.rows, ctx));
    } catch (err) {
      showError(err, ctx, errorBox);
    }
  }

  filters.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(filters);
    const query: ReportQuery = {};
    for (const key of ["eo", "us_id", "version_type", "date_from", "date_to"] as const) {
      const value = String(data.get(key) ?? "").trim();
      if (value) query[key] = value;
    }
    void refresh(query);
  });

  void refresh({});
}

function buildTable(rows: ReportRow[], ctx: Ctx): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "pursuit";
  const header = document.createElement("tr");
  const labels = ["EO", "U.S", "Files", "Type"];
  for (let slot = 1; slot <= DATE_SLOTS; slot++) labels.push(`Date ${slot}`);
  labels.push("Control");
  for (const label of labels) {
    const th = document.createElement("th");
    th.textContent = label;
    header.appendChild(th);
  }
  table.appendChild(header);
  for (const row of rows) table.appendChild(buildRow(row, table, ctx));
  return table;
}

function buildRow(row: ReportRow, table: HTMLTableElement, ctx: Ctx): HTMLTableRowElement {
  const tr = document.createElement("tr");
  tr.className = "us-row";
  tr.dataset.us = row.us_id;
  let type = row.version_type ?? "";
  if (row.extra_versions > 0) type += ` (+${row.extra_versions} earlier)`;
  const cells = [row.eo, row.us_id, row.files.join(", "), type];
  for (let slot = 0; slot < DATE_SLOTS; slot++) {
    cells.push(row.version_dates[slot] ?? "-----");
  }
  for (const value of cells) {
    const td = document.createElement("td");
    td.textContent = value;
    tr.appendChild(td);
  }

  const controlCell = document.createElement("td");
  const toggle = document.createElement("button");
  toggle.className = "control-toggle";
  toggle.textContent = "+";
  let detail: HTMLTableRowElement | null = null;
  toggle.addEventListener("click", async () => {
    if (detail) {
      detail.remove();
      detail = null;
      toggle.textContent = "+";
      return;
    }
    detail = document.createElement("tr");
    detail.className = "control-detail";
    const cell = document.createElement("td");
    cell.colSpan = COLUMNS;
    detail.appendChild(cell);
    tr.insertAdjacentElement("afterend", detail);
    toggle.textContent = "-";
    const errorBox = document.createElement("p");
    errorBox.className = "error";
    errorBox.hidden = true;
    cell.appendChild(errorBox);
    try {
      const outcome = await runControl(ctx.session.token, row.us_id);
      cell.appendChild(renderListing(outcome.listing));
      cell.appendChild(renderHistories(outcome.files));
    } catch (err) {
      // e.g. no-versions when nothing was uploaded yet for this U.S
      showError(err, ctx, errorBox);
    }
  });
  controlCell.appendChild(toggle);
  tr.appendChild(controlCell);
  return tr;
}
