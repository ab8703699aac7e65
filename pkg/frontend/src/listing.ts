// Shared rendering for control listings and file-history tables. Everything
// goes through textContent, so server strings can never inject markup.

import type { FileHistory, Listing } from "./api.js";

function elem(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function headerRow(labels: string[]): HTMLTableRowElement {
  const row = document.createElement("tr");
  for (const label of labels) {
    const th = document.createElement("th");
    th.textContent = label;
    row.appendChild(th);
  }
  return row;
}

export function renderListing(listing: Listing): HTMLElement {
  const box = elem("div", "listing");
  box.appendChild(
    elem("p", "produced", `Control run ${listing.produced_at} on ${listing.inputs.join(", ")}`),
  );
  if (listing.findings.length === 0) {
    box.appendChild(elem("p", "clean", "No findings."));
  } else {
    const table = document.createElement("table");
    table.className = "findings";
    table.appendChild(headerRow(["File", "Line", "Subject", "Severity", "Message"]));
    for (const finding of listing.findings) {
      const row = document.createElement("tr");
      row.className = `finding ${finding.severity}`;
      for (const value of [
        finding.file,
        String(finding.line),
        finding.subject,
        finding.severity,
        finding.message,
      ]) {
        const td = document.createElement("td");
        td.textContent = value;
        row.appendChild(td);
      }
      table.appendChild(row);
    }
    box.appendChild(table);
  }
  const { errors, warnings } = listing.summary;
  box.appendChild(elem("p", "summary", `${errors} errors, ${warnings} warnings`));
  return box;
}

export function renderHistories(files: FileHistory[]): HTMLElement {
  const table = document.createElement("table");
  table.className = "histories";
  table.appendChild(headerRow(["File", "First received", "Last received"]));
  for (const history of files) {
    const row = document.createElement("tr");
    row.className = "history";
    for (const value of [history.filename, history.first_received, history.last_received]) {
      const td = document.createElement("td");
      td.textContent = value;
      row.appendChild(td);
    }
    table.appendChild(row);
  }
  return table;
}
