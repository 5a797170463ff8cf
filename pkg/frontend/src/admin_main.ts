/** Admin page entry: token + base URL, then the dashboard. */

import { AdminClient } from "./api.js";
import { AdminApp } from "./admin.js";

document.addEventListener("DOMContentLoaded", () => {
  const form = document.getElementById("admin-form") as HTMLFormElement;
  const root = document.getElementById("app") as HTMLElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const base = (document.getElementById("base-url") as HTMLInputElement).value
      .replace(/\/$/, "");
    const token = (document.getElementById("admin-token") as HTMLInputElement).value;
    form.hidden = true;
    void new AdminApp(root, new AdminClient(base, token)).start();
  });
});
