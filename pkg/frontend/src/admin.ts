/**
 * Owner dashboard: project list, then per-project quality metrics. All
 * figures come straight from the metrics endpoint; refresh re-fetches.
 */

import { AdminClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import {
  renderDashboard,
  renderProjectList,
  renderUnauthorized,
} from "./views.js";

export class AdminApp {
  constructor(
    private readonly root: HTMLElement,
    private readonly client: AdminClient,
  ) {}

  private mount(node: HTMLElement): void {
    clear(this.root);
    this.root.append(node);
  }

  async start(): Promise<void> {
    let rows;
    try {
      rows = await this.client.listProjects();
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        this.mount(renderUnauthorized());
        return;
      }
      throw err;
    }
    this.mount(
      renderProjectList(rows, (projectId) => {
        void this.showProject(projectId);
      }),
    );
  }

  async showProject(projectId: string): Promise<void> {
    let metrics;
    try {
      metrics = await this.client.metrics(projectId);
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        this.mount(renderUnauthorized());
        return;
      }
      throw err;
    }
    const page = el("div", { class: "admin-page" });
    const back = el("button", { class: "back", text: "All projects", type: "button" });
    back.addEventListener("click", () => void this.start());
    const refresh = el("button", { class: "refresh", text: "Refresh", type: "button" });
    refresh.addEventListener("click", () => void this.showProject(projectId));
    page.append(el("div", { class: "toolbar" }, [back, refresh]));
    page.append(renderDashboard(metrics));
    this.mount(page);
  }
}
