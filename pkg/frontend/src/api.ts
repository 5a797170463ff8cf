/**
 * Typed client for the annotation service HTTP API.
 *
 * This module is the UI's only connection to the backend; every number the
 * interface displays originates in a response handled here. Answers travel
 * as uppercase "YES"/"NO" strings, matching the JSON convention of the
 * service (files use lowercase, but the UI never touches files).
 */

export type Answer = "YES" | "NO";
export type QuestionKind = "ANCHORABILITY" | "Q1" | "Q2";

export interface Question {
  question_id: string;
  text: string;
  payload: Record<string, string>;
}

export interface Highlight {
  eiid: string;
  sentence_index: number;
  token_index: number;
}

export interface TaskContext {
  sentences: string[][];
  highlights: Highlight[];
}

export interface Task extends Question {
  question_kind: QuestionKind;
  context: TaskContext | null;
}

export interface SessionInfo {
  token: string;
  project_id: string;
  worker_id: string;
  qualified: boolean;
}

export interface QualificationSet {
  already_qualified: boolean;
  questions: Question[];
}

export interface QualityReport {
  accuracy_on_gold: number | null;
  wawa: number | null;
  qualification_pass_rate: number | null;
  survival_rate: number | null;
  mean_response_time: number | null;
  n_judgements: number;
  n_discarded: number;
  n_aggregated_questions: number;
}

export interface AnswerCounts {
  YES: number;
  NO: number;
}

export interface ProjectMetrics {
  project_id: string;
  step: string;
  n_questions: number;
  n_gold: number;
  report: QualityReport;
  question_distributions: Record<string, AnswerCounts>;
  aggregates: Record<string, string>;
  aggregate_distribution: Record<string, number>;
}

export interface ProjectRow {
  project_id: string;
  step: string;
  n_questions: number;
  n_judgements: number;
}

export interface CreateProjectBody {
  idempotency_key: string;
  step: "anchorability" | "relation_q1" | "relation_q2";
  config?: Partial<{
    qualify_size: number;
    qualify_threshold: number;
    survive_threshold: number;
    judgements_per_question: number;
    gold_injection_rate: number;
    rng_seed: number;
  }>;
  questions: Question[];
  gold: Record<string, Answer>;
  documents?: Array<{
    doc_id: string;
    tokens: Array<[string, string, number]>;
    events: Array<{
      eid: string;
      eiid: string;
      token_offset: number;
      category?: string;
    }>;
  }>;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchImpl = (url: string, init?: RequestInit) => Promise<Response>;

async function detail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return res.statusText || `HTTP ${res.status}`;
  }
}

/** Session-scoped client used by the annotator screens. */
export class AnnotatorClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchImpl = (...args) => globalThis.fetch(...args),
  ) {}

  private async request(
    path: string,
    init: RequestInit = {},
  ): Promise<Response> {
    const headers: Record<string, string> = {
      ...(init.headers as Record<string, string> | undefined),
    };
    if (init.body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token !== null) headers["Authorization"] = `Bearer ${this.token}`;
    const res = await this.fetchImpl(this.baseUrl + path, { ...init, headers });
    if (!res.ok) throw new ApiError(res.status, await detail(res));
    return res;
  }

  async openSession(projectId: string, workerId: string): Promise<SessionInfo> {
    const res = await this.request(`/api/projects/${projectId}/sessions`, {
      method: "POST",
      body: JSON.stringify({ worker_id: workerId }),
    });
    const info: SessionInfo = await res.json();
    this.token = info.token;
    return info;
  }

  async qualification(): Promise<QualificationSet> {
    const res = await this.request("/api/qualification");
    return res.json();
  }

  async submitQualification(
    answers: Array<[string, Answer]>,
  ): Promise<{ passed: boolean }> {
    const res = await this.request("/api/qualification", {
      method: "POST",
      body: JSON.stringify({ answers }),
    });
    return res.json();
  }

  /** Null means the project has no more work for this session. */
  async nextTask(): Promise<Task | null> {
    const res = await this.request("/api/tasks/next");
    if (res.status === 204) return null;
    return res.json();
  }

  async submitJudgement(
    questionId: string,
    answer: Answer,
    responseTime: number,
  ): Promise<"ACCEPTED" | "BANNED"> {
    const res = await this.request("/api/judgements", {
      method: "POST",
      body: JSON.stringify({
        question_id: questionId,
        answer,
        response_time: responseTime,
      }),
    });
    const body = await res.json();
    return body.status;
  }
}

/** Token-authenticated client for the owner dashboard. */
export class AdminClient {
  constructor(
    private readonly baseUrl: string,
    private readonly adminToken: string,
    private readonly fetchImpl: FetchImpl = (...args) => globalThis.fetch(...args),
  ) {}

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const headers: Record<string, string> = {
      "X-Admin-Token": this.adminToken,
      ...(init.headers as Record<string, string> | undefined),
    };
    if (init.body !== undefined) headers["Content-Type"] = "application/json";
    const res = await this.fetchImpl(this.baseUrl + path, { ...init, headers });
    if (!res.ok) throw new ApiError(res.status, await detail(res));
    return res;
  }

  async listProjects(): Promise<ProjectRow[]> {
    const res = await this.request("/api/projects");
    const body = await res.json();
    return body.projects;
  }

  async metrics(projectId: string): Promise<ProjectMetrics> {
    const res = await this.request(`/api/projects/${projectId}/metrics`);
    return res.json();
  }

  async createProject(body: CreateProjectBody): Promise<string> {
    const res = await this.request("/api/projects", {
      method: "POST",
      body: JSON.stringify(body),
    });
    const out = await res.json();
    return out.project_id;
  }

  async exportRelations(q1: string, q2: string): Promise<string> {
    const res = await this.request(`/api/exports/relations?q1=${q1}&q2=${q2}`);
    return res.text();
  }
}
