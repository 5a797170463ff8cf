/** Annotator page entry: read the join form, hand off to AnnotatorApp. */

import { AnnotatorClient } from "./api.js";
import { AnnotatorApp } from "./annotator.js";

function field(id: string): HTMLInputElement {
  const node = document.getElementById(id);
  if (!(node instanceof HTMLInputElement)) throw new Error(`missing input #${id}`);
  return node;
}

document.addEventListener("DOMContentLoaded", () => {
  const form = document.getElementById("join-form") as HTMLFormElement;
  const root = document.getElementById("app") as HTMLElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const base = field("base-url").value.replace(/\/$/, "");
    const client = new AnnotatorClient(base);
    const app = new AnnotatorApp(root, client);
    form.hidden = true;
    app.start(field("project-id").value, field("worker-id").value).catch((err) => {
      form.hidden = false;
      root.textContent = `Could not join: ${err}`;
    });
  });
});
