"""HTTP annotation service over the crowd engine, with durable state.

Every state-changing request is appended to a per-project JSON-lines
write-ahead log and fsynced before the response is acknowledged; a
periodic snapshot bounds replay time.  Restart loads the project
definition, the latest snapshot, and replays the log tail through the
same engine code paths that served the original requests, so restored
state is bit-for-bit the state that was acknowledged.

Workers authenticate with per-(worker, project) bearer tokens; admin
endpoints require a static token supplied via environment or factory
argument.  Mutations are serialized per project; if a log write ever
fails the project is poisoned (503) until restart, which replays only
the durable prefix.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import __version__
from .algebra import Answer
from .corpus import (
    Document,
    Event,
    EventCategory,
    Polarity,
    Token,
    document_from_json,
    document_to_json,
)
from .engine import (
    AlreadyQualifiedError,
    AnnotationProject,
    BannedError,
    DuplicateJudgementError,
    ExhaustedError,
    InsufficientJudgementsError,
    Judgement,
    NotAssignedError,
    NotQualifiedError,
    QcConfig,
    Question,
    Step,
    SubmitResult,
    WorkerState,
    WrongQuestionSetError,
    aggregate_question,
    aggregate_relation,
    export_judgement_log,
    new_project,
    next_task,
    qualification_questions,
    qualify_worker,
    quality_report,
    submit_judgement,
)
from .formats import RelationSet, RelationSource, export_matres

__all__ = ["create_app", "ServiceStore", "CorruptLogError"]

_KIND_OF_STEP = {
    Step.ANCHORABILITY: "ANCHORABILITY",
    Step.RELATION_Q1: "Q1",
    Step.RELATION_Q2: "Q2",
}


class CorruptLogError(RuntimeError):
    """Replaying the write-ahead log diverged from the recorded events."""


# ---------------------------------------------------------------- storage


@dataclass
class ProjectRuntime:
    project: AnnotationProject
    documents: dict[str, Document]
    directory: Path
    idempotency_key: str
    body_sha256: str
    applied_events: int = 0
    sessions: dict[str, str] = field(default_factory=dict)  # token -> worker_id
    lock: threading.RLock = field(default_factory=threading.RLock)
    poisoned: bool = False

    @property
    def wal_path(self) -> Path:
        return self.directory / "events.log"

    @property
    def snapshot_path(self) -> Path:
        return self.directory / "snapshot.json"


_doc_to_json = document_to_json
_doc_from_json = document_from_json


def _state_to_json(s: WorkerState) -> dict:
    return {
        "worker_id": s.worker_id,
        "qualified": s.qualified,
        "attempted_qualification": s.attempted_qualification,
        "gold_seen": s.gold_seen,
        "gold_correct": s.gold_correct,
        "banned": s.banned,
        "answered": sorted(s.answered),
        "outstanding": s.outstanding,
        "n_assignments": s.n_assignments,
    }


def _state_from_json(payload: dict) -> WorkerState:
    return WorkerState(
        worker_id=payload["worker_id"],
        qualified=payload["qualified"],
        attempted_qualification=payload["attempted_qualification"],
        gold_seen=payload["gold_seen"],
        gold_correct=payload["gold_correct"],
        banned=payload["banned"],
        answered=set(payload["answered"]),
        outstanding=payload["outstanding"],
        n_assignments=payload["n_assignments"],
    )


def _atomic_write(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class ServiceStore:
    """All live projects plus their on-disk form under one data directory."""

    def __init__(self, data_dir: Path, admin_token: str, snapshot_every: int = 100):
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        self.data_dir = Path(data_dir)
        self.admin_token = admin_token
        self.snapshot_every = snapshot_every
        self.projects: dict[str, ProjectRuntime] = {}
        self.by_idempotency: dict[str, str] = {}
        self.token_index: dict[str, tuple[str, str]] = {}  # token -> (pid, worker)
        self._create_lock = threading.Lock()
        (self.data_dir / "projects").mkdir(parents=True, exist_ok=True)
        for directory in sorted((self.data_dir / "projects").iterdir()):
            if (directory / "project.json").exists():
                self._load_project(directory)

    # -- creation and recovery

    def create_project(
        self,
        idempotency_key: str,
        step: Step,
        config: QcConfig,
        questions: list[Question],
        gold: dict[str, Answer],
        documents: list[Document],
        body_sha256: str,
    ) -> tuple[ProjectRuntime, bool]:
        """Returns (runtime, created); created is False on an idempotent hit."""
        with self._create_lock:
            existing = self.by_idempotency.get(idempotency_key)
            if existing is not None:
                runtime = self.projects[existing]
                if runtime.body_sha256 != body_sha256:
                    raise HTTPException(
                        409, "idempotency key reused with a different payload"
                    )
                return runtime, False
            project_id = "p" + hashlib.sha256(idempotency_key.encode()).hexdigest()[:12]
            project = new_project(project_id, step, questions, gold, config)
            if len(gold) < config.qualify_size:
                raise ValueError("gold set smaller than the qualifying test")
            directory = self.data_dir / "projects" / project_id
            directory.mkdir(parents=True, exist_ok=True)
            definition = {
                "project_id": project_id,
                "step": step.value,
                "config": {
                    "qualify_size": config.qualify_size,
                    "qualify_threshold": config.qualify_threshold,
                    "survive_threshold": config.survive_threshold,
                    "judgements_per_question": config.judgements_per_question,
                    "gold_injection_rate": config.gold_injection_rate,
                    "rng_seed": config.rng_seed,
                },
                "questions": [
                    {"question_id": q.question_id, "text": q.text, "payload": dict(q.payload)}
                    for q in questions
                ],
                "gold": {qid: ans.value for qid, ans in gold.items()},
                "documents": [_doc_to_json(d) for d in documents],
                "idempotency_key": idempotency_key,
                "body_sha256": body_sha256,
                "created_at": time.time(),
            }
            _atomic_write(directory / "project.json", json.dumps(definition, indent=1))
            runtime = ProjectRuntime(
                project=project,
                documents={d.doc_id: d for d in documents},
                directory=directory,
                idempotency_key=idempotency_key,
                body_sha256=body_sha256,
            )
            self.projects[project_id] = runtime
            self.by_idempotency[idempotency_key] = project_id
            return runtime, True

    def _load_project(self, directory: Path):
        definition = json.loads((directory / "project.json").read_text("utf-8"))
        questions = [
            Question(q["question_id"], q["text"], q["payload"])
            for q in definition["questions"]
        ]
        gold = {qid: Answer(ans) for qid, ans in definition["gold"].items()}
        project = new_project(
            definition["project_id"],
            Step(definition["step"]),
            questions,
            gold,
            QcConfig(**definition["config"]),
        )
        runtime = ProjectRuntime(
            project=project,
            documents={
                d["doc_id"]: _doc_from_json(d) for d in definition["documents"]
            },
            directory=directory,
            idempotency_key=definition["idempotency_key"],
            body_sha256=definition["body_sha256"],
        )
        applied = 0
        if runtime.snapshot_path.exists():
            applied = self._restore_snapshot(runtime)
        if runtime.wal_path.exists():
            lines = runtime.wal_path.read_text("utf-8").splitlines()
            for lineno, line in enumerate(lines):
                if lineno < applied:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    if lineno == len(lines) - 1:
                        # torn tail from a crash mid-append: the write was
                        # never acknowledged, so drop it and repair the file
                        _atomic_write(
                            runtime.wal_path,
                            "".join(l + "\n" for l in lines[:lineno]),
                        )
                        break
                    raise CorruptLogError(
                        f"{runtime.directory.name}: undecodable log line {lineno}"
                    )
                self._apply_event(runtime, record)
                applied = lineno + 1
        runtime.applied_events = applied
        self.projects[project.project_id] = runtime
        self.by_idempotency[runtime.idempotency_key] = project.project_id
        for token, worker_id in runtime.sessions.items():
            self.token_index[token] = (project.project_id, worker_id)

    def _restore_snapshot(self, runtime: ProjectRuntime) -> int:
        snap = json.loads(runtime.snapshot_path.read_text("utf-8"))
        base = runtime.project
        judgements = [
            Judgement(
                worker_id=j[0],
                question_id=j[1],
                answer=Answer(j[2]),
                response_time=j[3],
                discarded=bool(j[4]),
            )
            for j in snap["judgements"]
        ]
        states = {
            s["worker_id"]: _state_from_json(s) for s in snap["worker_states"]
        }
        runtime.project = AnnotationProject(
            project_id=base.project_id,
            step=base.step,
            questions=base.questions,
            gold=base.gold,
            config=base.config,
            judgements=judgements,
            worker_states=states,
        )
        runtime.sessions = dict(snap["sessions"])
        return int(snap["applied_events"])

    def _apply_event(self, runtime: ProjectRuntime, record: dict):
        """Replay one logged event through the normal engine path."""
        kind = record["type"]
        project = runtime.project
        if kind == "session":
            runtime.sessions[record["token"]] = record["worker_id"]
        elif kind == "qualify":
            answers = [(qid, Answer(ans)) for qid, ans in record["answers"]]
            qualify_worker(project, record["worker_id"], answers)
        elif kind == "assign":
            question = next_task(project, record["worker_id"])
            if question.question_id != record["question_id"]:
                raise CorruptLogError(
                    f"{project.project_id}: replayed assignment "
                    f"{question.question_id} != logged {record['question_id']}"
                )
        elif kind == "judgement":
            submit_judgement(
                project,
                record["worker_id"],
                record["question_id"],
                Answer(record["answer"]),
                record["response_time"],
            )
        else:
            raise CorruptLogError(f"unknown event type {kind!r}")

    # -- durable append (call with the project lock held)

    def record(self, runtime: ProjectRuntime, record: dict):
        try:
            line = json.dumps(record, sort_keys=True, separators=(",", ":"))
            with open(runtime.wal_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        except Exception:
            runtime.poisoned = True
            raise
        runtime.applied_events += 1
        if runtime.applied_events % self.snapshot_every == 0:
            self.write_snapshot(runtime)

    def write_snapshot(self, runtime: ProjectRuntime):
        project = runtime.project
        snap = {
            "applied_events": runtime.applied_events,
            "sessions": runtime.sessions,
            "worker_states": [
                _state_to_json(s) for _, s in sorted(project.worker_states.items())
            ],
            "judgements": [
                [j.worker_id, j.question_id, j.answer.value, j.response_time,
                 1 if j.discarded else 0]
                for j in project.judgements
            ],
        }
        _atomic_write(runtime.snapshot_path, json.dumps(snap))


# ---------------------------------------------------------------- schemas


class ConfigBody(BaseModel):
    qualify_size: int = 10
    qualify_threshold: float = 0.70
    survive_threshold: float = 0.70
    judgements_per_question: int = 5
    gold_injection_rate: float = 0.1
    rng_seed: int = 0


class QuestionBody(BaseModel):
    question_id: str
    text: str
    payload: dict[str, str] = Field(default_factory=dict)


class EventBody(BaseModel):
    eid: str
    eiid: str
    token_offset: int
    category: str = "main_candidate"
    aspect: str = "NONE"
    modality: str = "NONE"
    polarity: str = "pos"
    pos_tag: str = "VB"


class DocumentBody(BaseModel):
    doc_id: str
    tokens: list[tuple[str, str, int]]
    events: list[EventBody] = Field(default_factory=list)


class CreateProjectBody(BaseModel):
    idempotency_key: str = Field(min_length=1)
    step: Literal["anchorability", "relation_q1", "relation_q2"]
    config: ConfigBody = ConfigBody()
    questions: list[QuestionBody]
    gold: dict[str, Literal["YES", "NO"]]
    documents: list[DocumentBody] = Field(default_factory=list)


class SessionBody(BaseModel):
    worker_id: str = Field(min_length=1)


class QualificationBody(BaseModel):
    answers: list[tuple[str, Literal["YES", "NO"]]]


class JudgementBody(BaseModel):
    question_id: str
    answer: Literal["YES", "NO"]
    response_time: float = Field(ge=0)


# ---------------------------------------------------------------- rendering


def _sentence_tokens(doc: Document) -> list[list[str]]:
    sentences: list[list[str]] = []
    for token in doc.tokens:
        while token.sentence_index >= len(sentences):
            sentences.append([])
        sentences[token.sentence_index].append(token.surface)
    return sentences


def _highlight(doc: Document, eiid: str) -> dict:
    event = doc.event(eiid)
    sent = doc.tokens[event.token_offset].sentence_index
    first_of_sent = next(
        i for i, t in enumerate(doc.tokens) if t.sentence_index == sent
    )
    return {
        "eiid": eiid,
        "surface": doc.surface(eiid),
        "sentence_index": sent,
        "token_index": event.token_offset - first_of_sent,
    }


def _render_context(runtime: ProjectRuntime, question: Question) -> Optional[dict]:
    doc = runtime.documents.get(question.payload.get("doc_id", ""))
    if doc is None:
        return None
    eiids = [
        question.payload[key]
        for key in ("eiid", "eiid1", "eiid2")
        if key in question.payload
    ]
    return {
        "sentences": _sentence_tokens(doc),
        "highlights": [_highlight(doc, eiid) for eiid in eiids],
    }


def _question_json(q: Question) -> dict:
    return {"question_id": q.question_id, "text": q.text, "payload": dict(q.payload)}


# ---------------------------------------------------------------- app


def create_app(
    data_dir: Optional[str | Path] = None,
    admin_token: Optional[str] = None,
    snapshot_every: int = 100,
) -> FastAPI:
    """Build the service; state persists under data_dir across restarts."""
    data_dir = Path(data_dir or os.environ.get("TEMPREL_DATA_DIR", "temprel-data"))
    admin_token = admin_token or os.environ.get("TEMPREL_ADMIN_TOKEN")
    if not admin_token:
        raise ValueError(
            "admin token required: pass admin_token or set TEMPREL_ADMIN_TOKEN"
        )
    store = ServiceStore(data_dir, admin_token, snapshot_every)
    app = FastAPI(title="temporal annotation service", version=__version__)
    app.state.store = store
    # the browser UI is served from a different origin; auth is header
    # tokens, never cookies, so a wildcard origin leaks nothing
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["Authorization", "X-Admin-Token", "Content-Type"],
    )

    def require_admin(x_admin_token: Optional[str] = Header(default=None)):
        if x_admin_token != store.admin_token:
            raise HTTPException(401, "admin token required")

    def require_session(
        authorization: Optional[str] = Header(default=None),
    ) -> tuple[ProjectRuntime, str]:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(401, "bearer session token required")
        bound = store.token_index.get(authorization[len("Bearer "):])
        if bound is None:
            raise HTTPException(401, "unknown session token")
        project_id, worker_id = bound
        return store.projects[project_id], worker_id

    def get_runtime(project_id: str) -> ProjectRuntime:
        runtime = store.projects.get(project_id)
        if runtime is None:
            raise HTTPException(404, f"no project {project_id!r}")
        return runtime

    def guard(runtime: ProjectRuntime):
        if runtime.poisoned:
            raise HTTPException(503, "project log write failed; restart to recover")

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/projects", dependencies=[Depends(require_admin)])
    def create_project(body: CreateProjectBody, response: Response):
        try:
            config = QcConfig(**body.config.model_dump())
            questions = [
                Question(q.question_id, q.text, dict(q.payload)) for q in body.questions
            ]
            gold = {qid: Answer[ans] for qid, ans in body.gold.items()}
            documents = [
                Document(
                    doc_id=d.doc_id,
                    tokens=[Token(s, p, i) for s, p, i in d.tokens],
                    events=[
                        Event(
                            eid=e.eid,
                            eiid=e.eiid,
                            token_offset=e.token_offset,
                            category=EventCategory(e.category),
                            aspect=e.aspect,
                            modality=e.modality,
                            polarity=Polarity(e.polarity),
                            pos_tag=e.pos_tag,
                        )
                        for e in d.events
                    ],
                )
                for d in body.documents
            ]
            body_hash = hashlib.sha256(
                json.dumps(body.model_dump(), sort_keys=True).encode()
            ).hexdigest()
            runtime, created = store.create_project(
                body.idempotency_key,
                Step(body.step),
                config,
                questions,
                gold,
                documents,
                body_hash,
            )
        except HTTPException:
            raise
        except (ValueError, KeyError) as err:
            raise HTTPException(422, str(err))
        response.status_code = 201 if created else 200
        return {"project_id": runtime.project.project_id}

    @app.get("/api/projects", dependencies=[Depends(require_admin)])
    def list_projects():
        out = []
        for project_id in sorted(store.projects):
            runtime = store.projects[project_id]
            with runtime.lock:
                out.append(
                    {
                        "project_id": project_id,
                        "step": runtime.project.step.value,
                        "n_questions": len(runtime.project.questions),
                        "n_judgements": len(runtime.project.judgements),
                    }
                )
        return {"projects": out}

    @app.post("/api/projects/{project_id}/sessions", status_code=201)
    def open_session(project_id: str, body: SessionBody):
        runtime = get_runtime(project_id)
        with runtime.lock:
            guard(runtime)
            token = secrets.token_urlsafe(32)
            # apply before logging so a snapshot cut at this event sees it
            runtime.sessions[token] = body.worker_id
            store.token_index[token] = (project_id, body.worker_id)
            store.record(
                runtime,
                {
                    "type": "session",
                    "token": token,
                    "worker_id": body.worker_id,
                    "issued_at": time.time(),
                },
            )
            state = runtime.project.worker_states.get(body.worker_id)
            return {
                "token": token,
                "project_id": project_id,
                "worker_id": body.worker_id,
                "qualified": bool(state and state.qualified),
            }

    @app.get("/api/qualification")
    def qualification(session: tuple = Depends(require_session)):
        runtime, worker_id = session
        with runtime.lock:
            state = runtime.project.worker_states.get(worker_id)
            return {
                "already_qualified": bool(state and state.qualified),
                "questions": [
                    _question_json(q)
                    for q in qualification_questions(runtime.project, worker_id)
                ],
            }

    @app.post("/api/qualification")
    def submit_qualification(
        body: QualificationBody, session: tuple = Depends(require_session)
    ):
        runtime, worker_id = session
        with runtime.lock:
            guard(runtime)
            answers = [(qid, Answer[ans]) for qid, ans in body.answers]
            try:
                passed = qualify_worker(runtime.project, worker_id, answers)
            except AlreadyQualifiedError:
                raise HTTPException(409, "worker already qualified")
            except WrongQuestionSetError as err:
                raise HTTPException(422, str(err))
            store.record(
                runtime,
                {
                    "type": "qualify",
                    "worker_id": worker_id,
                    "answers": [[qid, ans.value] for qid, ans in answers],
                },
            )
            return {"passed": passed}

    @app.get("/api/tasks/next")
    def get_next_task(session: tuple = Depends(require_session)):
        runtime, worker_id = session
        with runtime.lock:
            guard(runtime)
            state = runtime.project.worker_states.get(worker_id)
            outstanding_before = state.outstanding if state else None
            try:
                question = next_task(runtime.project, worker_id)
            except NotQualifiedError:
                raise HTTPException(409, "worker has not qualified")
            except BannedError:
                raise HTTPException(403, "worker is banned")
            except ExhaustedError:
                return Response(status_code=204)
            if question.question_id != outstanding_before:
                store.record(
                    runtime,
                    {
                        "type": "assign",
                        "worker_id": worker_id,
                        "question_id": question.question_id,
                    },
                )
            payload = _question_json(question)
            payload["question_kind"] = _KIND_OF_STEP[runtime.project.step]
            payload["context"] = _render_context(runtime, question)
            return payload

    @app.post("/api/judgements")
    def post_judgement(
        body: JudgementBody, session: tuple = Depends(require_session)
    ):
        runtime, worker_id = session
        with runtime.lock:
            guard(runtime)
            try:
                runtime.project.question(body.question_id)
            except KeyError:
                raise HTTPException(404, f"no question {body.question_id!r}")
            answer = Answer[body.answer]
            try:
                result = submit_judgement(
                    runtime.project,
                    worker_id,
                    body.question_id,
                    answer,
                    body.response_time,
                )
            except NotQualifiedError:
                raise HTTPException(409, "worker has not qualified")
            except BannedError:
                raise HTTPException(403, "worker is banned")
            except DuplicateJudgementError:
                raise HTTPException(409, "question already answered by this worker")
            except NotAssignedError:
                raise HTTPException(409, "question is not the worker's outstanding task")
            store.record(
                runtime,
                {
                    "type": "judgement",
                    "worker_id": worker_id,
                    "question_id": body.question_id,
                    "answer": answer.value,
                    "response_time": body.response_time,
                },
            )
            return {
                "status": "BANNED" if result is SubmitResult.BAN else "ACCEPTED"
            }

    @app.get(
        "/api/projects/{project_id}/metrics", dependencies=[Depends(require_admin)]
    )
    def get_metrics(project_id: str):
        runtime = get_runtime(project_id)
        with runtime.lock:
            project = runtime.project
            distributions = {}
            aggregates = {}
            for question in project.questions:
                qid = question.question_id
                live = [
                    j for j in project.judgements_for(qid) if not j.discarded
                ]
                if not live:
                    continue
                distributions[qid] = {
                    "YES": sum(1 for j in live if j.answer is Answer.YES),
                    "NO": sum(1 for j in live if j.answer is Answer.NO),
                }
                if len(live) >= project.config.judgements_per_question:
                    aggregates[qid] = aggregate_question(project, qid).name
            aggregate_distribution = {"YES": 0, "NO": 0}
            for answer in aggregates.values():
                aggregate_distribution[answer] += 1
            return {
                "project_id": project_id,
                "step": project.step.value,
                "n_questions": len(project.questions),
                "n_gold": len(project.gold),
                "report": quality_report(project).as_dict(),
                "question_distributions": distributions,
                "aggregates": aggregates,
                "aggregate_distribution": aggregate_distribution,
            }

    @app.get(
        "/api/projects/{project_id}/export", dependencies=[Depends(require_admin)]
    )
    def export_project(project_id: str, format: str = Query(default="log")):
        runtime = get_runtime(project_id)
        with runtime.lock:
            project = runtime.project
            if format == "log":
                text = export_judgement_log(project)
            elif format == "aggregates":
                lines = []
                for question in sorted(
                    project.questions, key=lambda q: q.question_id
                ):
                    qid = question.question_id
                    try:
                        answer = aggregate_question(project, qid)
                    except InsufficientJudgementsError:
                        continue
                    lines.append(f"{qid}\t{answer.value}")
                text = "".join(line + "\n" for line in lines)
            else:
                raise HTTPException(422, f"unknown export format {format!r}")
        return PlainTextResponse(text, media_type="text/tab-separated-values")

    @app.get("/api/exports/relations", dependencies=[Depends(require_admin)])
    def export_relations(q1: str, q2: str):
        first, second = get_runtime(q1), get_runtime(q2)
        if first.project.step is not Step.RELATION_Q1:
            raise HTTPException(409, f"{q1} is not a first-question project")
        if second.project.step is not Step.RELATION_Q2:
            raise HTTPException(409, f"{q2} is not a second-question project")
        ordered = sorted((first, second), key=lambda r: r.project.project_id)
        with ordered[0].lock, ordered[1].lock:
            shared = set(q.question_id for q in first.project.questions) & set(
                q.question_id for q in second.project.questions
            )
            entries: dict = {}
            surfaces: dict = {}
            for qid in sorted(shared):
                if qid in first.project.gold or qid in second.project.gold:
                    continue  # screening questions are not part of the dataset
                try:
                    a1 = aggregate_question(first.project, qid)
                    a2 = aggregate_question(second.project, qid)
                except InsufficientJudgementsError:
                    continue
                payload = first.project.question(qid).payload
                doc_id = payload["doc_id"]
                eiid1, eiid2 = payload["eiid1"], payload["eiid2"]
                doc = first.documents.get(doc_id) or second.documents.get(doc_id)
                if doc is None:
                    raise HTTPException(
                        409, f"no document {doc_id!r} on file for {qid!r}"
                    )
                entries[(doc_id, eiid1, eiid2)] = aggregate_relation(a1, a2)
                surfaces[(doc_id, eiid1, eiid2)] = (
                    doc.surface(eiid1),
                    doc.surface(eiid2),
                )
        text = export_matres(
            RelationSet(entries=entries, source=RelationSource.MATRES_FORMAT, surfaces=surfaces)
        )
        return PlainTextResponse(text, media_type="text/tab-separated-values")

    return app
