"""Averaged multiclass perceptron over sparse named features.

Weights are averaged lazily: each (class, feature) cell tracks its
accumulated sum and the example counter of its last update, and the
averaged weight is the mean of the post-example snapshots.  The dev set
picks the epoch count, after which the model is retrained from scratch
on train+dev with the same seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .algebra import PointRelation
from .corpus import Document, EventPair
from .features import extract_features
from .wordnet import WordNetIndex

__all__ = [
    "LABEL_ORDER",
    "TrainConfig",
    "PerceptronModel",
    "LabelScore",
    "EvalReport",
    "EmptyTrainingSetError",
    "MissingGoldError",
    "train_epochs",
    "train",
    "predict",
    "evaluate",
    "evaluate_predictions",
    "pair_examples",
    "save_model",
    "load_model",
    "BIAS",
]

LABEL_ORDER: tuple[PointRelation, ...] = (
    PointRelation.BEFORE,
    PointRelation.AFTER,
    PointRelation.EQUAL,
    PointRelation.VAGUE,
)

BIAS = "__bias__"


class EmptyTrainingSetError(ValueError):
    pass


class MissingGoldError(KeyError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 20
    seed: int = 0


@dataclass
class PerceptronModel:
    labels: tuple[PointRelation, ...]
    weights: dict[PointRelation, dict[str, float]]  # averaged
    trained_epochs: int
    seed: int

    def score(self, fv: Mapping[str, float], label: PointRelation) -> float:
        row = self.weights[label]
        total = row.get(BIAS, 0.0)
        for name, value in fv.items():
            w = row.get(name)
            if w is not None:
                total += w * value
        return total


def predict(model: PerceptronModel, fv: Mapping[str, float]) -> PointRelation:
    """Argmax of averaged scores; ties resolve in fixed label order."""
    best_label = model.labels[0]
    best_score = model.score(fv, best_label)
    for label in model.labels[1:]:
        s = model.score(fv, label)
        if s > best_score:
            best_label, best_score = label, s
    return best_label


class _Trainer:
    """Sequential trainer with lazily averaged weights."""

    def __init__(self, examples: Sequence[tuple[Mapping[str, float], PointRelation]], seed: int):
        if not examples:
            raise EmptyTrainingSetError("no training examples")
        self.examples = list(examples)
        self.seed = seed
        self.order = list(range(len(self.examples)))
        self.epoch = 0
        self.t = 0  # examples processed
        self.w: dict[PointRelation, dict[str, float]] = {lab: {} for lab in LABEL_ORDER}
        self.acc: dict[PointRelation, dict[str, float]] = {lab: {} for lab in LABEL_ORDER}
        self.last: dict[PointRelation, dict[str, int]] = {lab: {} for lab in LABEL_ORDER}

    def _raw_predict(self, fv: Mapping[str, float]) -> PointRelation:
        best_label = LABEL_ORDER[0]
        best = self._raw_score(fv, best_label)
        for label in LABEL_ORDER[1:]:
            s = self._raw_score(fv, label)
            if s > best:
                best_label, best = label, s
        return best_label

    def _raw_score(self, fv: Mapping[str, float], label: PointRelation) -> float:
        row = self.w[label]
        total = row.get(BIAS, 0.0)
        for name, value in fv.items():
            weight = row.get(name)
            if weight is not None:
                total += weight * value
        return total

    def _bump(self, label: PointRelation, name: str, delta: float):
        # settle the pending span of the old value into the accumulator
        self.acc[label][name] = self.acc[label].get(name, 0.0) + self.w[label].get(
            name, 0.0
        ) * (self.t - self.last[label].get(name, 0))
        self.last[label][name] = self.t
        self.w[label][name] = self.w[label].get(name, 0.0) + delta

    def run_epoch(self):
        self.epoch += 1
        rng = random.Random(f"{self.seed}:epoch:{self.epoch}")
        rng.shuffle(self.order)
        for idx in self.order:
            fv, gold = self.examples[idx]
            predicted = self._raw_predict(fv)
            if predicted is not gold:
                for name, value in list(fv.items()) + [(BIAS, 1.0)]:
                    self._bump(gold, name, value)
                    self._bump(predicted, name, -value)
            self.t += 1

    def averaged(self) -> dict[PointRelation, dict[str, float]]:
        out: dict[PointRelation, dict[str, float]] = {}
        for label in LABEL_ORDER:
            row = {}
            for name, weight in self.w[label].items():
                settled = self.acc[label].get(name, 0.0)
                pending = weight * (self.t - self.last[label].get(name, 0))
                row[name] = (settled + pending) / self.t if self.t else 0.0
            out[label] = row
        return out

    def snapshot_model(self) -> PerceptronModel:
        return PerceptronModel(
            labels=LABEL_ORDER,
            weights=self.averaged(),
            trained_epochs=self.epoch,
            seed=self.seed,
        )


def train_epochs(
    examples: Sequence[tuple[Mapping[str, float], PointRelation]],
    epochs: int,
    seed: int = 0,
) -> PerceptronModel:
    """Train for a fixed epoch count; deterministic given the seed."""
    trainer = _Trainer(examples, seed)
    for _ in range(epochs):
        trainer.run_epoch()
    return trainer.snapshot_model()


def pair_examples(
    docs: Iterable[Document],
    gold: Mapping[tuple, PointRelation],
    wn: Optional[WordNetIndex] = None,
) -> list[tuple[dict[str, float], PointRelation]]:
    """Feature/label pairs for every gold entry over the given documents.

    Entries for other documents are ignored; a gold entry naming an
    unknown event in a supplied document is an error.
    """
    by_doc = {doc.doc_id: doc for doc in docs}
    examples = []
    for key in sorted(gold):
        doc_id, e1, e2 = key
        doc = by_doc.get(doc_id)
        if doc is None:
            continue
        for eiid in (e1, e2):
            try:
                doc.event(eiid)
            except KeyError:
                raise MissingGoldError(f"gold entry {key} names unknown event {eiid}")
        fv = extract_features(EventPair(e1, e2, doc_id), doc, wn)
        examples.append((fv, gold[key]))
    return examples


def train(
    train_docs: Sequence[Document],
    dev_docs: Sequence[Document],
    gold: Mapping[tuple, PointRelation],
    config: TrainConfig = TrainConfig(),
    wn: Optional[WordNetIndex] = None,
) -> PerceptronModel:
    """Epoch-tuned training: pick the epoch count by dev F1, retrain on both.

    Dev F1 ties prefer fewer epochs; retraining reuses the same seed so
    the final model is a deterministic function of data + config.
    """
    train_ex = pair_examples(train_docs, gold, wn)
    dev_ex = pair_examples(dev_docs, gold, wn)
    if not train_ex:
        raise EmptyTrainingSetError("no training pairs in the supplied documents")

    trainer = _Trainer(train_ex, config.seed)
    best_epoch, best_f1 = 1, -1.0
    for epoch in range(1, config.max_epochs + 1):
        trainer.run_epoch()
        if dev_ex:
            snapshot = trainer.snapshot_model()
            report = evaluate_predictions(
                [(predict(snapshot, fv), label) for fv, label in dev_ex]
            )
            f1 = report.overall_f1
        else:
            f1 = 0.0
        if f1 > best_f1:
            best_epoch, best_f1 = epoch, f1
    return train_epochs(train_ex + dev_ex, best_epoch, config.seed)


@dataclass(frozen=True)
class LabelScore:
    precision: Optional[float]  # None when the label was never predicted
    recall: Optional[float]  # None when the label never occurs in gold
    f1: Optional[float]
    gold_count: int
    predicted_count: int

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "gold_count": self.gold_count,
            "predicted_count": self.predicted_count,
        }


@dataclass(frozen=True)
class EvalReport:
    per_label: Mapping[PointRelation, LabelScore]
    overall_precision: float
    overall_recall: float
    overall_f1: float
    strict_accuracy: float
    n_pairs: int

    def as_dict(self) -> dict:
        return {
            "per_label": {lab.name: score.as_dict() for lab, score in self.per_label.items()},
            "overall_precision": self.overall_precision,
            "overall_recall": self.overall_recall,
            "overall_f1": self.overall_f1,
            "strict_accuracy": self.strict_accuracy,
            "n_pairs": self.n_pairs,
        }


def _f1(p: Optional[float], r: Optional[float]) -> Optional[float]:
    if p is None or r is None:
        return None
    return 2 * p * r / (p + r) if p + r else 0.0


def evaluate_predictions(
    pairs: Sequence[tuple[PointRelation, PointRelation]],
) -> EvalReport:
    """Score (predicted, gold) pairs.

    The overall row treats VAGUE as "no relation": precision counts
    correct non-VAGUE predictions over all non-VAGUE predictions, recall
    over all non-VAGUE gold labels.  A strict all-label accuracy is
    reported alongside.
    """
    per_label = {}
    for label in LABEL_ORDER:
        tp = sum(1 for pred, gold in pairs if pred is label and gold is label)
        predicted = sum(1 for pred, _ in pairs if pred is label)
        in_gold = sum(1 for _, gold in pairs if gold is label)
        precision = tp / predicted if predicted else None
        recall = tp / in_gold if in_gold else None
        per_label[label] = LabelScore(
            precision=precision,
            recall=recall,
            f1=_f1(precision, recall),
            gold_count=in_gold,
            predicted_count=predicted,
        )
    vague = PointRelation.VAGUE
    correct_committed = sum(
        1 for pred, gold in pairs if pred is gold and pred is not vague
    )
    predicted_committed = sum(1 for pred, _ in pairs if pred is not vague)
    gold_committed = sum(1 for _, gold in pairs if gold is not vague)
    precision = correct_committed / predicted_committed if predicted_committed else 0.0
    recall = correct_committed / gold_committed if gold_committed else 0.0
    overall_f1 = _f1(precision, recall) or 0.0
    accuracy = (
        sum(1 for pred, gold in pairs if pred is gold) / len(pairs) if pairs else 0.0
    )
    return EvalReport(
        per_label=per_label,
        overall_precision=precision,
        overall_recall=recall,
        overall_f1=overall_f1,
        strict_accuracy=accuracy,
        n_pairs=len(pairs),
    )


def evaluate(
    model: PerceptronModel,
    test_docs: Sequence[Document],
    gold: Mapping[tuple, PointRelation],
    wn: Optional[WordNetIndex] = None,
) -> EvalReport:
    examples = pair_examples(test_docs, gold, wn)
    return evaluate_predictions([(predict(model, fv), label) for fv, label in examples])


_FORMAT_VERSION = 1


def save_model(model: PerceptronModel) -> str:
    """JSON serialization; load_model restores it exactly."""
    return json.dumps(
        {
            "version": _FORMAT_VERSION,
            "labels": [lab.name for lab in model.labels],
            "weights": {
                lab.name: dict(sorted(model.weights[lab].items())) for lab in model.labels
            },
            "trained_epochs": model.trained_epochs,
            "seed": model.seed,
        },
        indent=0,
        sort_keys=True,
    )


def load_model(text: str) -> PerceptronModel:
    payload = json.loads(text)
    if payload.get("version") != _FORMAT_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')!r}")
    labels = tuple(PointRelation[name] for name in payload["labels"])
    weights = {
        PointRelation[name]: dict(row) for name, row in payload["weights"].items()
    }
    return PerceptronModel(
        labels=labels,
        weights=weights,
        trained_epochs=payload["trained_epochs"],
        seed=payload["seed"],
    )
