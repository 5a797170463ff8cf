/**
 * Annotator session flow: open a session, qualify if needed, then loop
 * one task at a time until the project is exhausted or the session is
 * closed by the server.
 *
 * Response time is measured from render-complete to the answer click and
 * submitted with the judgement. A failed submission is retried with the
 * identical body (same question, answer, and measured time), so the server
 * sees one idempotent judgement per question.
 */

import { AnnotatorClient, ApiError } from "./api.js";
import type { Answer, Task } from "./api.js";
import { clear } from "./dom.js";
import {
  renderBanned,
  renderDone,
  renderError,
  renderQualification,
  renderQualificationFailed,
  renderTask,
} from "./views.js";

export interface AnnotatorOptions {
  /** Clock in milliseconds; injectable for tests. */
  now?: () => number;
}

export class AnnotatorApp {
  private readonly now: () => number;
  private renderedAt = 0;
  private answered = 0;
  private ended = false;
  private inflight: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: AnnotatorClient,
    options: AnnotatorOptions = {},
  ) {
    this.now = options.now ?? (() => performance.now());
  }

  /** Resolves once the first screen is on the page. */
  async start(projectId: string, workerId: string): Promise<void> {
    const session = await this.client.openSession(projectId, workerId);
    if (session.qualified) {
      await this.showNextTask();
    } else {
      await this.showQualification();
    }
  }

  /** Settles when the chain started by the last user event is done. */
  whenIdle(): Promise<void> {
    return this.inflight;
  }

  private chain(step: () => Promise<void>): void {
    this.inflight = this.inflight.then(step).catch((err) => {
      this.mount(renderError(String(err), () => this.chain(step)));
    });
  }

  private mount(node: HTMLElement): void {
    clear(this.root);
    this.root.append(node);
  }

  private async showQualification(): Promise<void> {
    const set = await this.client.qualification();
    if (set.already_qualified) {
      await this.showNextTask();
      return;
    }
    this.mount(
      renderQualification(set.questions, (answers) => {
        this.chain(async () => {
          const result = await this.client.submitQualification(answers);
          if (result.passed) {
            await this.showNextTask();
          } else {
            this.mount(
              renderQualificationFailed(() => {
                this.chain(() => this.showQualification());
              }),
            );
          }
        });
      }),
    );
  }

  private async showNextTask(): Promise<void> {
    if (this.ended) return;
    let task: Task | null;
    try {
      task = await this.client.nextTask();
    } catch (err) {
      if (err instanceof ApiError && err.status === 403) {
        this.end();
        return;
      }
      throw err;
    }
    if (task === null) {
      this.mount(renderDone(this.answered));
      return;
    }
    const current = task;
    this.mount(
      renderTask(current, this.answered, (answer) => {
        const responseTime = (this.now() - this.renderedAt) / 1000;
        this.chain(() => this.submit(current, answer, responseTime));
      }).root,
    );
    this.renderedAt = this.now();
  }

  private async submit(task: Task, answer: Answer, responseTime: number): Promise<void> {
    let status: "ACCEPTED" | "BANNED";
    try {
      status = await this.client.submitJudgement(
        task.question_id,
        answer,
        responseTime,
      );
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.status === 403) {
          this.end();
          return;
        }
        if (err.status === 409) {
          // already recorded (e.g. a retried request that did land)
          this.answered += 1;
          await this.showNextTask();
          return;
        }
        throw err;
      }
      // network failure: offer a retry with the identical submission
      this.mount(
        renderError("Could not reach the server. Your answer was not lost.", () => {
          this.chain(() => this.submit(task, answer, responseTime));
        }),
      );
      return;
    }
    if (status === "BANNED") {
      this.end();
      return;
    }
    this.answered += 1;
    await this.showNextTask();
  }

  private end(): void {
    this.ended = true;
    this.mount(renderBanned());
  }
}
