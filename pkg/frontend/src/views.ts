/**
 * Render functions for every screen. Each returns a detached element the
 * caller mounts; none of them fetch, compute statistics, or know which
 * questions are screening items. Statistical values arrive pre-computed
 * from the service and are formatted verbatim.
 */

import { el } from "./dom.js";
import type {
  Answer,
  ProjectMetrics,
  ProjectRow,
  Question,
  Task,
  TaskContext,
} from "./api.js";

const KIND_LABEL: Record<string, string> = {
  ANCHORABILITY: "Step 1: timeline anchorability",
  Q1: "Step 2: start-point question (Q1)",
  Q2: "Step 2: start-point question (Q2)",
};

/**
 * Sentences with the question's events marked. The first highlight gets
 * class event-1, the second event-2, so the two sides of a pair question
 * are visually distinct.
 */
export function renderContext(context: TaskContext): HTMLElement {
  const marked = new Map<string, number>();
  context.highlights.forEach((h, i) => {
    marked.set(`${h.sentence_index}:${h.token_index}`, i);
  });
  const box = el("div", { class: "context" });
  context.sentences.forEach((tokens, si) => {
    const sentence = el("p", { class: "sentence" });
    tokens.forEach((token, ti) => {
      if (ti > 0) sentence.append(" ");
      const slot = marked.get(`${si}:${ti}`);
      if (slot === undefined) {
        sentence.append(token);
      } else {
        sentence.append(
          el("mark", { class: `event event-${slot + 1}`, text: token }),
        );
      }
    });
    box.append(sentence);
  });
  return box;
}

export interface TaskViewHandle {
  root: HTMLElement;
  /** Disabled after the first click; re-enabled only by a retry re-render. */
  yesButton: HTMLButtonElement;
  noButton: HTMLButtonElement;
}

export function renderTask(
  task: Task,
  answered: number,
  onAnswer: (answer: Answer) => void,
): TaskViewHandle {
  const root = el("div", { class: "task", data: { questionId: task.question_id } });
  root.append(
    el("div", { class: "kind", text: KIND_LABEL[task.question_kind] ?? task.question_kind }),
  );
  if (task.context) root.append(renderContext(task.context));
  root.append(el("p", { class: "prompt", text: task.text }));

  const yesButton = el("button", { class: "answer yes", text: "Yes", type: "button" });
  const noButton = el("button", { class: "answer no", text: "No", type: "button" });
  const pick = (answer: Answer) => () => {
    if (yesButton.disabled) return;
    yesButton.disabled = true;
    noButton.disabled = true;
    onAnswer(answer);
  };
  yesButton.addEventListener("click", pick("YES"));
  noButton.addEventListener("click", pick("NO"));
  root.append(el("div", { class: "choices" }, [yesButton, noButton]));
  root.append(
    el("div", {
      class: "progress",
      text: `${answered} answered this session`,
      data: { answered: String(answered) },
    }),
  );
  return { root, yesButton, noButton };
}

export function renderQualification(
  questions: Question[],
  onSubmit: (answers: Array<[string, Answer]>) => void,
): HTMLElement {
  const root = el("div", { class: "qualification" });
  root.append(
    el("p", {
      class: "intro",
      text: "Before annotating, answer this short qualifying test.",
    }),
  );
  const chosen = new Map<string, Answer>();
  const submit = el("button", {
    class: "submit",
    text: "Submit answers",
    type: "button",
    disabled: true,
  });
  questions.forEach((q, i) => {
    const row = el("div", { class: "qual-question", data: { questionId: q.question_id } });
    row.append(el("p", { class: "prompt", text: q.text }));
    for (const answer of ["YES", "NO"] as const) {
      const input = el("input", { type: "radio", name: `q${i}`, value: answer });
      input.addEventListener("change", () => {
        chosen.set(q.question_id, answer);
        submit.disabled = chosen.size < questions.length;
      });
      row.append(el("label", {}, [input, answer === "YES" ? " Yes" : " No"]));
    }
    root.append(row);
  });
  submit.addEventListener("click", () => {
    if (submit.disabled) return;
    submit.disabled = true;
    onSubmit(questions.map((q) => [q.question_id, chosen.get(q.question_id)!]));
  });
  root.append(submit);
  return root;
}

export function renderQualificationFailed(onRetry: () => void): HTMLElement {
  const root = el("div", { class: "qual-failed" });
  root.append(el("p", { text: "That attempt did not meet the required accuracy." }));
  const retry = el("button", { class: "retry", text: "Try again", type: "button" });
  retry.addEventListener("click", onRetry, { once: true });
  root.append(retry);
  return root;
}

/** Terminal screen: no further tasks are fetched once this is shown. */
export function renderBanned(): HTMLElement {
  return el("div", { class: "banned" }, [
    el("h2", { text: "Session ended" }),
    el("p", { text: "This session has been closed. Thank you for your time." }),
  ]);
}

export function renderDone(answered: number): HTMLElement {
  return el("div", { class: "done" }, [
    el("h2", { text: "All tasks complete" }),
    el("p", { text: `You answered ${answered} questions. Thank you!` }),
  ]);
}

export function renderError(message: string, onRetry: () => void): HTMLElement {
  const root = el("div", { class: "error" });
  root.append(el("p", { text: message }));
  const retry = el("button", { class: "retry", text: "Retry", type: "button" });
  retry.addEventListener("click", onRetry, { once: true });
  root.append(retry);
  return root;
}

function formatStat(value: number | null): string {
  return value === null ? "n/a" : value.toFixed(3);
}

function statRow(label: string, stat: string, value: number | null): HTMLElement {
  return el("div", { class: "stat", data: { stat } }, [
    el("span", { class: "label", text: label }),
    el("span", { class: "value", text: formatStat(value) }),
  ]);
}

/**
 * The owner's quality dashboard. Every figure is copied from the metrics
 * response; the only arithmetic here is turning counts into bar widths.
 */
export function renderDashboard(metrics: ProjectMetrics): HTMLElement {
  const root = el("div", { class: "dashboard", data: { projectId: metrics.project_id } });
  root.append(
    el("h2", { text: `Project ${metrics.project_id}` }),
    el("p", {
      class: "meta",
      text:
        `step ${metrics.step}, ${metrics.n_questions} questions, ` +
        `${metrics.n_gold} screening questions`,
    }),
  );

  const report = metrics.report;
  root.append(
    el("div", { class: "stats" }, [
      statRow("Accuracy on screening", "accuracy", report.accuracy_on_gold),
      statRow("Worker agreement (WAWA)", "wawa", report.wawa),
      statRow("Qualification pass rate", "pass_rate", report.qualification_pass_rate),
      statRow("Survival rate", "survival_rate", report.survival_rate),
      statRow("Mean response time (s)", "response_time", report.mean_response_time),
    ]),
    el("p", {
      class: "counts",
      text:
        `${report.n_judgements} judgements collected, ` +
        `${report.n_discarded} discarded, ` +
        `${report.n_aggregated_questions} questions aggregated`,
    }),
  );

  const distributions = el("div", { class: "distributions" });
  for (const qid of Object.keys(metrics.question_distributions).sort()) {
    const counts = metrics.question_distributions[qid]!;
    const total = counts.YES + counts.NO;
    const yesPct = total === 0 ? 0 : (counts.YES / total) * 100;
    const noPct = total === 0 ? 0 : 100 - yesPct;
    const row = el("div", { class: "question-row", data: { questionId: qid } });
    row.append(el("span", { class: "qid", text: qid }));
    row.append(
      el("div", { class: "bar" }, [
        el("span", {
          class: "bar-yes",
          style: { width: `${yesPct}%` },
          data: { count: String(counts.YES) },
        }),
        el("span", {
          class: "bar-no",
          style: { width: `${noPct}%` },
          data: { count: String(counts.NO) },
        }),
      ]),
      el("span", {
        class: "split",
        text:
          total === 0
            ? "no answers"
            : `${Math.round(yesPct)}% / ${100 - Math.round(yesPct)}%`,
      }),
    );
    if (qid in metrics.aggregates) {
      row.append(el("span", { class: "aggregate", text: metrics.aggregates[qid] }));
    }
    distributions.append(row);
  }
  root.append(el("h3", { text: "Answer distribution per question" }), distributions);

  const aggregate = el("p", { class: "aggregate-distribution" });
  aggregate.textContent = Object.entries(metrics.aggregate_distribution)
    .map(([label, count]) => `${label}: ${count}`)
    .join(", ");
  root.append(el("h3", { text: "Aggregated answers" }), aggregate);
  return root;
}

export function renderProjectList(
  rows: ProjectRow[],
  onOpen: (projectId: string) => void,
): HTMLElement {
  const root = el("div", { class: "project-list" });
  root.append(el("h2", { text: "Projects" }));
  for (const row of rows) {
    const button = el("button", {
      class: "open-project",
      text: `${row.project_id} (${row.step}, ${row.n_judgements} judgements)`,
      type: "button",
      data: { projectId: row.project_id },
    });
    button.addEventListener("click", () => onOpen(row.project_id));
    root.append(button);
  }
  if (rows.length === 0) root.append(el("p", { text: "No projects yet." }));
  return root;
}

export function renderUnauthorized(): HTMLElement {
  return el("div", { class: "unauthorized" }, [
    el("h2", { text: "Not authorized" }),
    el("p", { text: "The admin token was missing or wrong." }),
  ]);
}
