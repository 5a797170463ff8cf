/** In-memory stand-in for the annotation service, driven through fetch. */

import type { Answer, FetchImpl, Question, Task, TaskContext } from "../src/api.js";

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface RecordedJudgement {
  question_id: string;
  answer: Answer;
  response_time: number;
}

export interface FakeOptions {
  tasks: Task[];
  qualificationQuestions?: Question[];
  /** Outcomes for successive qualification submissions; default all pass. */
  qualifyPassSequence?: boolean[];
  /** Submitting this question returns status BANNED. */
  banOnQuestion?: string;
  /** The first judgement POST fails with a network error. */
  failNetworkOnce?: boolean;
}

export class FakeService {
  judgements: RecordedJudgement[] = [];
  taskFetches = 0;
  qualificationSubmissions = 0;
  private cursor = 0;
  private outstanding: Task | null = null;
  private qualified: boolean;
  private banned = false;
  private networkFailuresLeft: number;

  constructor(private readonly options: FakeOptions) {
    // no configured qualifying test means the worker starts qualified
    this.qualified = options.qualificationQuestions === undefined;
    this.networkFailuresLeft = options.failNetworkOnce ? 1 : 0;
  }

  readonly fetch: FetchImpl = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = new URL(url).pathname;
    const body = init?.body ? JSON.parse(String(init.body)) : null;

    if (method === "POST" && /\/api\/projects\/[^/]+\/sessions$/.test(path)) {
      return json(201, {
        token: "fake-token",
        project_id: path.split("/")[3],
        worker_id: body.worker_id,
        qualified: this.qualified,
      });
    }
    if (path === "/api/qualification" && method === "GET") {
      return json(200, {
        already_qualified: this.qualified,
        questions: this.options.qualificationQuestions ?? [],
      });
    }
    if (path === "/api/qualification" && method === "POST") {
      const seq = this.options.qualifyPassSequence ?? [];
      const passed = seq[this.qualificationSubmissions] ?? true;
      this.qualificationSubmissions += 1;
      this.qualified = passed;
      return json(200, { passed });
    }
    if (path === "/api/tasks/next") {
      this.taskFetches += 1;
      if (this.banned) return json(403, { detail: "worker is banned" });
      if (!this.qualified) return json(409, { detail: "worker has not qualified" });
      if (this.outstanding === null) {
        if (this.cursor >= this.options.tasks.length) {
          return new Response(null, { status: 204 });
        }
        this.outstanding = this.options.tasks[this.cursor]!;
        this.cursor += 1;
      }
      return json(200, this.outstanding);
    }
    if (path === "/api/judgements" && method === "POST") {
      if (this.networkFailuresLeft > 0) {
        this.networkFailuresLeft -= 1;
        throw new TypeError("fetch failed");
      }
      if (this.banned) return json(403, { detail: "worker is banned" });
      if (this.outstanding?.question_id !== body.question_id) {
        return json(409, { detail: "question is not the worker's outstanding task" });
      }
      if (this.judgements.some((j) => j.question_id === body.question_id)) {
        return json(409, { detail: "question already answered by this worker" });
      }
      this.judgements.push({
        question_id: body.question_id,
        answer: body.answer,
        response_time: body.response_time,
      });
      this.outstanding = null;
      if (body.question_id === this.options.banOnQuestion) {
        this.banned = true;
        return json(200, { status: "BANNED" });
      }
      return json(200, { status: "ACCEPTED" });
    }
    return json(404, { detail: `no fake route for ${method} ${path}` });
  };
}

/** Two-sentence document used across the UI tests. */
export const REL_SENTENCES: string[][] = [
  ["Rebels", "attacked", "villages", "before", "troops", "arrived", "."],
  ["They", "fled", "and", "hid", "later", "."],
];

export const REL_EVENTS: Record<string, { sentence: number; token: number }> = {
  ei1: { sentence: 0, token: 1 }, // attacked
  ei2: { sentence: 0, token: 5 }, // arrived
  ei3: { sentence: 1, token: 1 }, // fled
  ei4: { sentence: 1, token: 3 }, // hid
};

export function relSurface(eiid: string): string {
  const spot = REL_EVENTS[eiid]!;
  return REL_SENTENCES[spot.sentence]![spot.token]!;
}

function relContext(eiids: string[]): TaskContext {
  return {
    sentences: REL_SENTENCES,
    highlights: eiids.map((eiid) => ({
      eiid,
      sentence_index: REL_EVENTS[eiid]!.sentence,
      token_index: REL_EVENTS[eiid]!.token,
    })),
  };
}

export function q1Wording(first: string, second: string): string {
  return `Is it possible that "${relSurface(first)}" starts before "${relSurface(second)}" starts?`;
}

export function q1Task(first: string, second: string): Task {
  return {
    question_id: `docB:${first}:${second}`,
    text: q1Wording(first, second),
    payload: { doc_id: "docB", eiid1: first, eiid2: second },
    question_kind: "Q1",
    context: relContext([first, second]),
  };
}

export function anchorTask(eiid: string): Task {
  return {
    question_id: `docB:${eiid}`,
    text: `Can the event "${relSurface(eiid)}" be anchored on the main story timeline?`,
    payload: { doc_id: "docB", eiid },
    question_kind: "ANCHORABILITY",
    context: relContext([eiid]),
  };
}
