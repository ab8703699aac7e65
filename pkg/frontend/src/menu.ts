import type { Role } from "./api.js";

export type ViewName = "accounts" | "upload" | "report" | "profile";

export interface MenuItem {
  label: string;
  view: ViewName;
}

/**
 * Left-menu entries for a role. A pure function of the role claim returned
 * at login; the first entry is the view loaded by default. The profile view
 * is reached from the top-right block instead of the menu.
 */
export function menuFor(role: Role): MenuItem[] {
  if (role === "controller") {
    return [
      { label: "Upload", view: "upload" },
      { label: "Pursuit Report", view: "report" },
    ];
  }
  // administrators create supervisor accounts, supervisors create controllers
  return [
    { label: "Accounts", view: "accounts" },
    { label: "Pursuit Report", view: "report" },
  ];
}
