"""Crowd annotation engine: qualification, hidden gold tests, aggregation.

A project serves one binary question type (anchorability, or one of the
two relation possibility questions).  Workers must pass a qualifying
test on gold questions before submitting; hidden gold questions are
injected into their task stream, and a worker whose running gold
accuracy falls below the survival threshold is banned with all of their
judgements discarded.  Questions are answered by several workers and
aggregated by majority vote.

State mutations are not locked here: callers that share a project across
threads must serialize writes per project (the HTTP service does).
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .algebra import Answer, AnswerPair, PointRelation, answers_to_relation
from .corpus import Document, EventPair

__all__ = [
    "Step",
    "Question",
    "QcConfig",
    "Judgement",
    "WorkerState",
    "AnnotationProject",
    "QualityReport",
    "WorkerModel",
    "SubmitResult",
    "EngineError",
    "AlreadyQualifiedError",
    "WrongQuestionSetError",
    "NotQualifiedError",
    "BannedError",
    "ExhaustedError",
    "NotAssignedError",
    "DuplicateJudgementError",
    "InsufficientJudgementsError",
    "new_project",
    "anchorability_questions",
    "relation_questions",
    "qualification_questions",
    "qualify_worker",
    "next_task",
    "submit_judgement",
    "aggregate_question",
    "aggregate_relation",
    "quality_report",
    "export_judgement_log",
    "simulate_crowd",
]


class Step(enum.Enum):
    ANCHORABILITY = "anchorability"
    RELATION_Q1 = "relation_q1"
    RELATION_Q2 = "relation_q2"


@dataclass(frozen=True)
class Question:
    """One worker-facing yes/no question.

    payload carries the document/event references a client needs to
    render context.  Gold status deliberately lives elsewhere (in the
    project's gold map) so a serialized Question can never leak it.
    """

    question_id: str
    text: str
    payload: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class QcConfig:
    qualify_size: int = 10
    qualify_threshold: float = 0.70
    survive_threshold: float = 0.70
    judgements_per_question: int = 5
    gold_injection_rate: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 < self.qualify_threshold <= 1 or not 0 < self.survive_threshold <= 1:
            raise ValueError("thresholds must be in (0, 1]")
        if self.judgements_per_question < 1:
            raise ValueError("judgements_per_question must be >= 1")
        if self.qualify_size < 1:
            raise ValueError("qualify_size must be >= 1")
        if not 0 <= self.gold_injection_rate <= 1:
            raise ValueError("gold_injection_rate must be in [0, 1]")


@dataclass
class Judgement:
    worker_id: str
    question_id: str
    answer: Answer
    response_time: float
    discarded: bool = False


@dataclass
class WorkerState:
    worker_id: str
    qualified: bool = False
    attempted_qualification: bool = False
    gold_seen: int = 0
    gold_correct: int = 0
    banned: bool = False
    answered: set[str] = field(default_factory=set)
    outstanding: Optional[str] = None  # question assigned but not yet submitted
    n_assignments: int = 0


class EngineError(Exception):
    pass


class AlreadyQualifiedError(EngineError):
    pass


class WrongQuestionSetError(EngineError):
    pass


class NotQualifiedError(EngineError):
    pass


class BannedError(EngineError):
    pass


class ExhaustedError(EngineError):
    pass


class NotAssignedError(EngineError):
    pass


class DuplicateJudgementError(EngineError):
    pass


class InsufficientJudgementsError(EngineError):
    pass


class SubmitResult(enum.Enum):
    ACCEPT = "accept"
    BAN = "ban"


@dataclass
class AnnotationProject:
    project_id: str
    step: Step
    questions: list[Question]
    gold: dict[str, Answer]
    config: QcConfig
    judgements: list[Judgement] = field(default_factory=list)
    worker_states: dict[str, WorkerState] = field(default_factory=dict)

    def __post_init__(self):
        self._by_id = {q.question_id: q for q in self.questions}
        if len(self._by_id) != len(self.questions):
            raise ValueError("duplicate question id")
        missing = set(self.gold) - set(self._by_id)
        if missing:
            raise ValueError(f"gold answers for unknown questions: {sorted(missing)}")
        self._by_question: dict[str, list[Judgement]] = {}
        self._live_counts: dict[str, int] = {}
        self._nongold_sorted = sorted(q for q in self._by_id if q not in self.gold)
        self._gold_sorted = sorted(self.gold)
        for j in self.judgements:
            self._index_judgement(j)

    def _index_judgement(self, j: Judgement):
        self._by_question.setdefault(j.question_id, []).append(j)
        if not j.discarded:
            self._live_counts[j.question_id] = self._live_counts.get(j.question_id, 0) + 1

    def question(self, question_id: str) -> Question:
        return self._by_id[question_id]

    def live_count(self, question_id: str) -> int:
        return self._live_counts.get(question_id, 0)

    def judgements_for(self, question_id: str) -> list[Judgement]:
        return list(self._by_question.get(question_id, ()))


def new_project(
    project_id: str,
    step: Step,
    questions: Sequence[Question],
    gold: Mapping[str, Answer],
    config: QcConfig,
) -> AnnotationProject:
    return AnnotationProject(
        project_id=project_id,
        step=step,
        questions=list(questions),
        gold=dict(gold),
        config=config,
    )


def anchorability_questions(doc: Document) -> list[Question]:
    """One main-axis anchorability question per event, in text order."""
    out = []
    for ev in sorted(doc.events, key=lambda e: e.token_offset):
        out.append(
            Question(
                question_id=f"{doc.doc_id}:{ev.eiid}",
                text=(
                    f'Can the event "{doc.surface(ev.eiid)}" be anchored '
                    "on the main story timeline?"
                ),
                payload={"doc_id": doc.doc_id, "eiid": ev.eiid},
            )
        )
    return out


def relation_questions(doc: Document, pairs: Iterable[EventPair], step: Step) -> list[Question]:
    """Start-point possibility questions for the given pairs.

    The two relation steps ask mirrored questions about the same pair and
    share question ids, so aggregates can be joined by id across the two
    projects.
    """
    if step not in (Step.RELATION_Q1, Step.RELATION_Q2):
        raise ValueError("relation questions belong to a relation step")
    out = []
    for pair in pairs:
        first, second = doc.surface(pair.first), doc.surface(pair.second)
        if step is Step.RELATION_Q1:
            text = f'Is it possible that "{first}" starts before "{second}" starts?'
        else:
            text = f'Is it possible that "{second}" starts before "{first}" starts?'
        out.append(
            Question(
                question_id=f"{pair.doc_id}:{pair.first}:{pair.second}",
                text=text,
                payload={
                    "doc_id": pair.doc_id,
                    "eiid1": pair.first,
                    "eiid2": pair.second,
                },
            )
        )
    return out


def qualification_questions(project: AnnotationProject, worker_id: str) -> list[Question]:
    """The worker's qualifying test: a seeded sample of gold questions."""
    cfg = project.config
    if len(project._gold_sorted) < cfg.qualify_size:
        raise ValueError("gold set smaller than the qualifying test")
    rng = random.Random(f"{cfg.rng_seed}:qualify:{worker_id}")
    chosen = rng.sample(project._gold_sorted, cfg.qualify_size)
    return [project.question(qid) for qid in chosen]


def _state(project: AnnotationProject, worker_id: str) -> WorkerState:
    state = project.worker_states.get(worker_id)
    if state is None:
        state = WorkerState(worker_id=worker_id)
        project.worker_states[worker_id] = state
    return state


def qualify_worker(
    project: AnnotationProject,
    worker_id: str,
    answers: Sequence[tuple[str, Answer]],
) -> bool:
    """Grade a qualifying test; records the attempt and the outcome."""
    state = _state(project, worker_id)
    if state.qualified:
        raise AlreadyQualifiedError(worker_id)
    expected = {q.question_id for q in qualification_questions(project, worker_id)}
    if {qid for qid, _ in answers} != expected or len(answers) != len(expected):
        raise WrongQuestionSetError(
            f"qualifying answers must cover exactly the worker's sampled gold questions"
        )
    correct = sum(1 for qid, ans in answers if ans is project.gold[qid])
    state.attempted_qualification = True
    passed = correct / project.config.qualify_size >= project.config.qualify_threshold
    state.qualified = passed
    return passed


def _eligible_nongold(project: AnnotationProject, state: WorkerState) -> list[str]:
    cap = project.config.judgements_per_question
    return [
        qid
        for qid in project._nongold_sorted
        if qid not in state.answered and project.live_count(qid) < cap
    ]


def next_task(project: AnnotationProject, worker_id: str) -> Question:
    """Assign the worker's next question.

    Deterministic given project state: a seeded draw decides whether to
    inject a hidden gold question, then picks uniformly among eligible
    question ids.  Re-asking before submission returns the same question,
    so concurrent requests cannot assign two different ones.
    """
    state = project.worker_states.get(worker_id)
    if state is None or not state.qualified:
        raise NotQualifiedError(worker_id)
    if state.banned:
        raise BannedError(worker_id)
    if state.outstanding is not None:
        return project.question(state.outstanding)
    nongold = _eligible_nongold(project, state)
    if not nongold:
        raise ExhaustedError(worker_id)
    rng = random.Random(f"{project.config.rng_seed}:{worker_id}:{state.n_assignments}")
    gold_pool = [qid for qid in project._gold_sorted if qid not in state.answered]
    if gold_pool and rng.random() < project.config.gold_injection_rate:
        qid = rng.choice(gold_pool)
    else:
        qid = rng.choice(nongold)
    state.outstanding = qid
    state.n_assignments += 1
    return project.question(qid)


def _ban(project: AnnotationProject, state: WorkerState):
    state.banned = True
    for j in project.judgements:
        if j.worker_id == state.worker_id and not j.discarded:
            j.discarded = True
            project._live_counts[j.question_id] -= 1


def submit_judgement(
    project: AnnotationProject,
    worker_id: str,
    question_id: str,
    answer: Answer,
    response_time: float,
) -> SubmitResult:
    """Record a judgement for the worker's outstanding question.

    Gold questions update the running survival score; once the worker has
    seen at least qualify_size hidden gold questions, dropping below the
    survival threshold bans them and discards everything they submitted.
    """
    state = project.worker_states.get(worker_id)
    if state is None or not state.qualified:
        raise NotQualifiedError(worker_id)
    if state.banned:
        raise BannedError(worker_id)
    if question_id in state.answered:
        raise DuplicateJudgementError(question_id)
    if state.outstanding != question_id:
        raise NotAssignedError(question_id)
    judgement = Judgement(
        worker_id=worker_id,
        question_id=question_id,
        answer=answer,
        response_time=response_time,
    )
    project.judgements.append(judgement)
    project._index_judgement(judgement)
    state.answered.add(question_id)
    state.outstanding = None
    gold_answer = project.gold.get(question_id)
    if gold_answer is not None:
        state.gold_seen += 1
        if answer is gold_answer:
            state.gold_correct += 1
        if (
            state.gold_seen >= project.config.qualify_size
            and state.gold_correct / state.gold_seen < project.config.survive_threshold
        ):
            _ban(project, state)
            return SubmitResult.BAN
    return SubmitResult.ACCEPT


def aggregate_question(project: AnnotationProject, question_id: str) -> Answer:
    """Majority vote over non-discarded judgements; ties go to YES.

    A YES-leaning tie can only move the mapped relation label toward
    VAGUE, never toward a committed order.
    """
    live = [j for j in project.judgements_for(question_id) if not j.discarded]
    if len(live) < project.config.judgements_per_question:
        raise InsufficientJudgementsError(
            f"{question_id}: {len(live)} of {project.config.judgements_per_question} judgements"
        )
    yes = sum(1 for j in live if j.answer is Answer.YES)
    return Answer.YES if yes * 2 >= len(live) else Answer.NO


def aggregate_relation(q1_answer: Answer, q2_answer: Answer) -> PointRelation:
    """Map the two aggregated possibility answers to a start-point label."""
    return answers_to_relation(AnswerPair(q1_answer, q2_answer))


@dataclass(frozen=True)
class QualityReport:
    accuracy_on_gold: Optional[float]
    wawa: Optional[float]
    qualification_pass_rate: Optional[float]
    survival_rate: Optional[float]
    mean_response_time: Optional[float]
    n_judgements: int
    n_discarded: int
    n_aggregated_questions: int

    def as_dict(self) -> dict:
        return {
            "accuracy_on_gold": self.accuracy_on_gold,
            "wawa": self.wawa,
            "qualification_pass_rate": self.qualification_pass_rate,
            "survival_rate": self.survival_rate,
            "mean_response_time": self.mean_response_time,
            "n_judgements": self.n_judgements,
            "n_discarded": self.n_discarded,
            "n_aggregated_questions": self.n_aggregated_questions,
        }


def quality_report(project: AnnotationProject) -> QualityReport:
    """Project-level quality statistics over non-discarded judgements."""
    live = [j for j in project.judgements if not j.discarded]
    gold_live = [j for j in live if j.question_id in project.gold]
    accuracy = None
    if gold_live:
        correct = sum(1 for j in gold_live if j.answer is project.gold[j.question_id])
        accuracy = correct / len(gold_live)

    matches = total = aggregated = 0
    cap = project.config.judgements_per_question
    for qid in project._by_question:
        live_q = [j for j in project.judgements_for(qid) if not j.discarded]
        if len(live_q) < cap:
            continue
        aggregated += 1
        majority = aggregate_question(project, qid)
        total += len(live_q)
        matches += sum(1 for j in live_q if j.answer is majority)
    wawa = matches / total if total else None

    # banning does not retroactively unset qualification
    attempted = [s for s in project.worker_states.values() if s.attempted_qualification]
    pass_rate = None
    if attempted:
        pass_rate = sum(1 for s in attempted if s.qualified) / len(attempted)
    qualified = [s for s in project.worker_states.values() if s.qualified]
    survival = None
    if qualified:
        survival = sum(1 for s in qualified if not s.banned) / len(qualified)
    mean_rt = sum(j.response_time for j in live) / len(live) if live else None
    return QualityReport(
        accuracy_on_gold=accuracy,
        wawa=wawa,
        qualification_pass_rate=pass_rate,
        survival_rate=survival,
        mean_response_time=mean_rt,
        n_judgements=len(project.judgements),
        n_discarded=len(project.judgements) - len(live),
        n_aggregated_questions=aggregated,
    )


def export_judgement_log(project: AnnotationProject) -> str:
    """Judgement log as TSV, deterministically ordered.

    Columns: project_id, worker_id, question_id, answer, response_time_s,
    discarded.  Rows sort by (question_id, worker_id).
    """
    rows = sorted(project.judgements, key=lambda j: (j.question_id, j.worker_id))
    lines = [
        "\t".join(
            (
                project.project_id,
                j.worker_id,
                j.question_id,
                j.answer.value,
                f"{j.response_time:.3f}",
                "1" if j.discarded else "0",
            )
        )
        for j in rows
    ]
    return "".join(line + "\n" for line in lines)


@dataclass(frozen=True)
class WorkerModel:
    """Synthetic worker: answers correctly with probability accuracy."""

    accuracy: float
    mean_response_time: float = 6.0

    def __post_init__(self):
        if not 0 <= self.accuracy <= 1:
            raise ValueError("accuracy must be in [0, 1]")


def _flip(answer: Answer) -> Answer:
    return Answer.NO if answer is Answer.YES else Answer.YES


def simulate_crowd(
    config: QcConfig,
    worker_model: WorkerModel,
    n_workers: int,
    questions: int = 50,
    seed: int = 0,
) -> QualityReport:
    """Run the full pipeline with i.i.d. synthetic workers.

    Builds a project with the given number of non-gold questions plus a
    gold pool the size of the qualifying test, then lets each worker
    qualify and answer tasks until none remain for them.  Fully
    deterministic given the seed.
    """
    gold_answers = {}
    qs = []
    pool_rng = random.Random(f"{seed}:questions")
    for i in range(config.qualify_size):
        qid = f"gold{i:04d}"
        qs.append(Question(question_id=qid, text=f"synthetic gold question {i}"))
        gold_answers[qid] = Answer.YES if pool_rng.random() < 0.5 else Answer.NO
    for i in range(questions):
        qs.append(Question(question_id=f"task{i:04d}", text=f"synthetic question {i}"))
    project = new_project(
        project_id=f"sim-p{worker_model.accuracy}",
        step=Step.RELATION_Q1,
        questions=qs,
        gold=gold_answers,
        config=config,
    )
    # ground truth for non-gold questions, so accuracy p is meaningful
    truth = {
        q.question_id: (Answer.YES if pool_rng.random() < 0.5 else Answer.NO)
        for q in qs
    }
    truth.update(gold_answers)

    for w in range(n_workers):
        worker_id = f"w{w:05d}"
        rng = random.Random(f"{seed}:worker:{w}")

        def draw(qid: str) -> Answer:
            right = truth[qid]
            return right if rng.random() < worker_model.accuracy else _flip(right)

        test = qualification_questions(project, worker_id)
        answers = [(q.question_id, draw(q.question_id)) for q in test]
        if not qualify_worker(project, worker_id, answers):
            continue
        while True:
            try:
                question = next_task(project, worker_id)
            except ExhaustedError:
                break
            rt = rng.expovariate(1.0 / worker_model.mean_response_time)
            result = submit_judgement(
                project, worker_id, question.question_id, draw(question.question_id), rt
            )
            if result is SubmitResult.BAN:
                break
    return quality_report(project)
