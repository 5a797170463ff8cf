/**
 * End-to-end tests against the real annotation service: a child process
 * runs the Python backend, and the UI code talks to it over HTTP exactly
 * as a browser would.
 */

import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { connect } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AdminClient, AnnotatorClient } from "../src/api.js";
import type { Answer, CreateProjectBody } from "../src/api.js";
import { AnnotatorApp } from "../src/annotator.js";
import { renderDashboard } from "../src/views.js";
import { q1Wording, REL_EVENTS, REL_SENTENCES } from "./helpers.js";

const SERVER = `
import sys, uvicorn
from temprel.service import create_app
app = create_app(data_dir=sys.argv[1], admin_token="it-admin")
uvicorn.run(app, host="127.0.0.1", port=int(sys.argv[2]), log_level="error")
`;

let proc: ChildProcessWithoutNullStreams;
let dataDir: string;
let base: string;
let stderr = "";

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

function portOpen(port: number): Promise<boolean> {
  return new Promise((resolve) => {
    const socket = connect({ host: "127.0.0.1", port });
    socket.once("connect", () => {
      socket.destroy();
      resolve(true);
    });
    socket.once("error", () => resolve(false));
  });
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "temprel-ui-"));
  const port = 18000 + Math.floor(Math.random() * 20000);
  base = `http://127.0.0.1:${port}`;
  proc = spawn("python3", ["-c", SERVER, dataDir, String(port)]);
  proc.stderr.on("data", (chunk) => {
    stderr += String(chunk);
  });
  for (let attempt = 0; !(await portOpen(port)); attempt++) {
    if (attempt > 200) throw new Error(`service never came up:\n${stderr}`);
    await sleep(150);
  }
  const health = await fetch(`${base}/api/health`);
  if (!health.ok) throw new Error(`health check failed: ${health.status}`);
});

afterAll(() => {
  proc?.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

function tokens(sentences: string[][]): Array<[string, string, number]> {
  const out: Array<[string, string, number]> = [];
  sentences.forEach((sentence, si) => {
    for (const token of sentence) out.push([token, "VB", si]);
  });
  return out;
}

/** Qualify (answering from the gold map) and then answer every task. */
async function runWorker(
  projectId: string,
  workerId: string,
  gold: Record<string, Answer>,
  decide: (questionId: string) => Answer,
): Promise<void> {
  const client = new AnnotatorClient(base);
  const session = await client.openSession(projectId, workerId);
  if (!session.qualified) {
    const set = await client.qualification();
    const answers = set.questions.map(
      (q): [string, Answer] => [q.question_id, gold[q.question_id]!],
    );
    const result = await client.submitQualification(answers);
    expect(result.passed).toBe(true);
  }
  for (let guard = 0; guard < 50; guard++) {
    const task = await client.nextTask();
    if (task === null) return;
    await client.submitJudgement(task.question_id, decide(task.question_id), 2.5);
  }
  throw new Error("task loop did not finish");
}

describe("owner dashboard", () => {
  it("shows exactly the WAWA the service computed for a replayed judgement log", async () => {
    const sentences = [
      ["Police", "said", "they", "left", "early", "Friday", "."],
      ["They", "returned", "and", "celebrated", "wildly", "."],
    ];
    const offsets = [1, 2, 3, 4, 8, 9, 10, 11];
    const gold: Record<string, Answer> = {
      "docA:ei1": "YES",
      "docA:ei2": "YES",
      "docA:ei3": "NO",
      "docA:ei4": "NO",
    };
    const body: CreateProjectBody = {
      idempotency_key: "ui-anchor-round",
      step: "anchorability",
      config: {
        qualify_size: 4,
        judgements_per_question: 2,
        gold_injection_rate: 0,
        rng_seed: 0,
      },
      questions: offsets.map((offset, i) => ({
        question_id: `docA:ei${i + 1}`,
        text: `Can this event be anchored on the main story timeline?`,
        payload: { doc_id: "docA", eiid: `ei${i + 1}` },
      })),
      gold,
      documents: [
        {
          doc_id: "docA",
          tokens: tokens(sentences),
          events: offsets.map((offset, i) => ({
            eid: `e${i + 1}`,
            eiid: `ei${i + 1}`,
            token_offset: offset,
          })),
        },
      ],
    };
    const admin = new AdminClient(base, "it-admin");
    const projectId = await admin.createProject(body);

    // the fixture round: w1 says YES everywhere, w2 splits evenly
    await runWorker(projectId, "w1", gold, () => "YES");
    await runWorker(projectId, "w2", gold, (qid) =>
      qid === "docA:ei5" || qid === "docA:ei6" ? "YES" : "NO",
    );

    const metrics = await admin.metrics(projectId);
    expect(metrics.report.wawa).toBe(0.75);
    expect(metrics.report.mean_response_time).toBe(2.5);

    const dashboard = renderDashboard(metrics);
    document.body.append(dashboard);
    const shown = dashboard.querySelector('[data-stat="wawa"] .value')!.textContent;
    expect(shown).toBe(metrics.report.wawa!.toFixed(3));
    expect(shown).toBe("0.750");

    const split = dashboard.querySelector('[data-question-id="docA:ei7"] .split')!;
    expect(split.textContent).toBe("50% / 50%");
    dashboard.remove();
  });
});

describe("live first-question session", () => {
  it("serves screening and real tasks indistinguishably, without second-question wording", async () => {
    const pairs: Array<[string, string]> = [
      ["ei1", "ei3"],
      ["ei1", "ei4"],
      ["ei2", "ei3"],
      ["ei2", "ei4"],
      ["ei1", "ei2"],
      ["ei3", "ei4"],
    ];
    const gold: Record<string, Answer> = {
      "docB:ei1:ei3": "YES",
      "docB:ei1:ei4": "YES",
      "docB:ei2:ei3": "NO",
      "docB:ei2:ei4": "NO",
    };
    const body: CreateProjectBody = {
      idempotency_key: "ui-q1-session",
      step: "relation_q1",
      config: {
        qualify_size: 4,
        judgements_per_question: 1,
        gold_injection_rate: 1,
        rng_seed: 0,
      },
      questions: pairs.map(([first, second]) => ({
        question_id: `docB:${first}:${second}`,
        text: q1Wording(first, second),
        payload: { doc_id: "docB", eiid1: first, eiid2: second },
      })),
      gold,
      documents: [
        {
          doc_id: "docB",
          tokens: tokens(REL_SENTENCES),
          events: Object.entries(REL_EVENTS).map(([eiid, spot], i) => ({
            eid: `e${i + 1}`,
            eiid,
            token_offset:
              spot.sentence === 0 ? spot.token : REL_SENTENCES[0]!.length + spot.token,
          })),
        },
      ],
    };
    const admin = new AdminClient(base, "it-admin");
    const projectId = await admin.createProject(body);

    document.body.innerHTML = "";
    const root = document.createElement("div");
    document.body.append(root);
    const app = new AnnotatorApp(root, new AnnotatorClient(base));
    await app.start(projectId, "w9");

    // qualification first: answer from the gold map
    for (const row of Array.from(root.querySelectorAll(".qual-question"))) {
      const qid = (row as HTMLElement).dataset.questionId!;
      const input = Array.from(row.querySelectorAll("input")).find(
        (i) => i.value === gold[qid],
      )!;
      input.checked = true;
      input.dispatchEvent(new Event("change"));
    }
    root.querySelector<HTMLButtonElement>("button.submit")!.click();
    await app.whenIdle();

    const mirrored = pairs.map(([first, second]) => q1Wording(second, first));
    let answered = 0;
    while (root.querySelector("button.yes") && answered < 20) {
      const html = document.body.innerHTML;
      expect(html).not.toMatch(/gold/i);
      expect(html).toContain("(Q1)");
      expect(html).not.toContain("(Q2)");
      for (const wording of mirrored) {
        expect(html).not.toContain(wording);
      }
      const qid = root.querySelector<HTMLElement>(".task")!.dataset.questionId!;
      expect(html).toContain(
        q1Wording(qid.split(":")[1]!, qid.split(":")[2]!),
      );
      const answer = gold[qid] ?? "YES";
      root
        .querySelector<HTMLButtonElement>(answer === "YES" ? "button.yes" : "button.no")!
        .click();
      await app.whenIdle();
      answered += 1;
    }

    expect(answered).toBe(pairs.length);
    expect(root.textContent).toContain("All tasks complete");
    expect(document.body.innerHTML).not.toMatch(/gold/i);
  });
});
