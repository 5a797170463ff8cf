import { describe, expect, it, vi } from "vitest";

import type { ProjectMetrics } from "../src/api.js";
import {
  renderBanned,
  renderContext,
  renderDashboard,
  renderQualification,
  renderTask,
} from "../src/views.js";
import { anchorTask, q1Task } from "./helpers.js";

describe("renderContext", () => {
  it("marks exactly the highlighted tokens", () => {
    const task = q1Task("ei1", "ei2");
    const node = renderContext(task.context!);
    const marks = Array.from(node.querySelectorAll("mark"));
    expect(marks.map((m) => m.textContent)).toEqual(["attacked", "arrived"]);
    expect(marks[0]!.className).toContain("event-1");
    expect(marks[1]!.className).toContain("event-2");
    expect(node.textContent).toContain(
      "Rebels attacked villages before troops arrived .",
    );
  });

  it("keeps single-event highlights to one mark", () => {
    const node = renderContext(anchorTask("ei3").context!);
    const marks = node.querySelectorAll("mark");
    expect(marks.length).toBe(1);
    expect(marks[0]!.textContent).toBe("fled");
  });
});

describe("renderTask", () => {
  it("shows the question text, kind, and progress", () => {
    const view = renderTask(anchorTask("ei1"), 3, () => {});
    expect(view.root.querySelector(".prompt")!.textContent).toContain(
      'Can the event "attacked" be anchored',
    );
    expect(view.root.querySelector(".kind")!.textContent).toContain("anchorability");
    expect(view.root.querySelector(".progress")!.textContent).toBe(
      "3 answered this session",
    );
  });

  it("fires the callback once and disables both buttons", () => {
    const onAnswer = vi.fn();
    const view = renderTask(q1Task("ei1", "ei2"), 0, onAnswer);
    view.yesButton.click();
    view.yesButton.click();
    view.noButton.click();
    expect(onAnswer).toHaveBeenCalledTimes(1);
    expect(onAnswer).toHaveBeenCalledWith("YES");
    expect(view.yesButton.disabled).toBe(true);
    expect(view.noButton.disabled).toBe(true);
  });

  it("reports NO when the no button is used", () => {
    const onAnswer = vi.fn();
    const view = renderTask(q1Task("ei1", "ei2"), 0, onAnswer);
    view.noButton.click();
    expect(onAnswer).toHaveBeenCalledWith("NO");
  });
});

describe("renderQualification", () => {
  it("enables submit only once every question is answered", () => {
    const questions = [anchorTask("ei1"), anchorTask("ei2")].map(
      ({ question_id, text, payload }) => ({ question_id, text, payload }),
    );
    const onSubmit = vi.fn();
    const node = renderQualification(questions, onSubmit);
    const submit = node.querySelector<HTMLButtonElement>("button.submit")!;
    expect(submit.disabled).toBe(true);

    const pickRadio = (row: Element, value: string) => {
      const input = Array.from(row.querySelectorAll("input")).find(
        (i) => i.value === value,
      )!;
      input.checked = true;
      input.dispatchEvent(new Event("change"));
    };
    const rows = Array.from(node.querySelectorAll(".qual-question"));
    pickRadio(rows[0]!, "YES");
    expect(submit.disabled).toBe(true);
    pickRadio(rows[1]!, "NO");
    expect(submit.disabled).toBe(false);

    submit.click();
    expect(onSubmit).toHaveBeenCalledWith([
      ["docB:ei1", "YES"],
      ["docB:ei2", "NO"],
    ]);
    expect(submit.disabled).toBe(true);
  });
});

const METRICS: ProjectMetrics = {
  project_id: "p123",
  step: "anchorability",
  n_questions: 8,
  n_gold: 4,
  report: {
    accuracy_on_gold: null,
    wawa: 0.753,
    qualification_pass_rate: 0.5,
    survival_rate: 1,
    mean_response_time: 2.5,
    n_judgements: 100,
    n_discarded: 0,
    n_aggregated_questions: 7,
  },
  question_distributions: {
    "docA:ei5": { YES: 86, NO: 14 },
    "docA:ei7": { YES: 1, NO: 1 },
  },
  aggregates: { "docA:ei5": "YES" },
  aggregate_distribution: { YES: 1, NO: 0 },
};

describe("renderDashboard", () => {
  it("displays service statistics verbatim", () => {
    const node = renderDashboard(METRICS);
    const stat = (name: string) =>
      node.querySelector(`[data-stat="${name}"] .value`)!.textContent;
    expect(stat("wawa")).toBe("0.753");
    expect(stat("accuracy")).toBe("n/a");
    expect(stat("pass_rate")).toBe("0.500");
    expect(stat("response_time")).toBe("2.500");
    expect(node.textContent).toContain("100 judgements collected");
  });

  it("renders one answer-split bar per question", () => {
    const node = renderDashboard(METRICS);
    const row = node.querySelector('[data-question-id="docA:ei5"]')!;
    const yes = row.querySelector<HTMLElement>(".bar-yes")!;
    const no = row.querySelector<HTMLElement>(".bar-no")!;
    expect(yes.style.width).toBe("86%");
    expect(no.style.width).toBe("14%");
    expect(row.querySelector(".split")!.textContent).toBe("86% / 14%");
    expect(row.querySelector(".aggregate")!.textContent).toBe("YES");

    const even = node.querySelector('[data-question-id="docA:ei7"]')!;
    expect(even.querySelector(".split")!.textContent).toBe("50% / 50%");
    expect(even.querySelector(".aggregate")).toBeNull();
  });
});

describe("question screening status", () => {
  it("never appears in any rendered screen", () => {
    const screens = [
      renderTask(q1Task("ei1", "ei2"), 0, () => {}).root,
      renderTask(anchorTask("ei1"), 0, () => {}).root,
      renderQualification(
        [anchorTask("ei1")].map(({ question_id, text, payload }) => ({
          question_id,
          text,
          payload,
        })),
        () => {},
      ),
      renderDashboard(METRICS),
      renderBanned(),
    ];
    for (const screen of screens) {
      expect(screen.innerHTML).not.toMatch(/gold/i);
    }
  });
});
