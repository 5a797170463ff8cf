"""Agreement statistics: Cohen's kappa, per-label F1, confusion matrices,
label distributions, and McNemar's paired test."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Optional, Sequence

__all__ = [
    "LengthMismatchError",
    "EmptySequenceError",
    "PerLabelStats",
    "AgreementReport",
    "ConfusionMatrix",
    "McNemarResult",
    "cohens_kappa",
    "per_label_agreement",
    "compare_datasets",
    "mcnemars_test",
    "label_distribution",
]


class LengthMismatchError(ValueError):
    pass


class EmptySequenceError(ValueError):
    pass


def _check_paired(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise LengthMismatchError(f"sequences differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise EmptySequenceError("agreement over empty sequences is undefined")


def cohens_kappa(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e).

    Expected agreement p_e uses each annotator's own marginals.  When
    both annotators use a single identical label, p_e is 1 and kappa is
    reported as 1 (agreement is perfect, if vacuous).
    """
    _check_paired(a, b)
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    marg_a = Counter(a)
    marg_b = Counter(b)
    p_e = sum(marg_a[lab] * marg_b.get(lab, 0) for lab in marg_a) / (n * n)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


@dataclass(frozen=True)
class PerLabelStats:
    kappa: float
    f1: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    distribution: float
    vacuous: bool = False  # label absent from both annotators

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "distribution": self.distribution,
            "vacuous": self.vacuous,
        }


@dataclass(frozen=True)
class AgreementReport:
    overall_kappa: float
    per_label: Mapping[Hashable, PerLabelStats]
    n_items: int

    def as_dict(self) -> dict:
        return {
            "overall_kappa": self.overall_kappa,
            "n_items": self.n_items,
            "per_label": {str(k): v.as_dict() for k, v in self.per_label.items()},
        }


def per_label_agreement(
    a: Sequence[Hashable],
    b: Sequence[Hashable],
    labels: Sequence[Hashable],
) -> AgreementReport:
    """Overall kappa plus one-vs-rest kappa/F1 per label.

    The first sequence is the reference: per-label F1 reads b's uses of
    the label as predictions against a's as truth, and the distribution
    column reports the label's frequency in a.
    """
    _check_paired(a, b)
    n = len(a)
    per_label = {}
    for lab in labels:
        in_a = [x == lab for x in a]
        in_b = [x == lab for x in b]
        if not any(in_a) and not any(in_b):
            per_label[lab] = PerLabelStats(
                kappa=1.0, f1=1.0, precision=None, recall=None,
                distribution=0.0, vacuous=True,
            )
            continue
        kappa = cohens_kappa(in_a, in_b)
        tp = sum(1 for x, y in zip(in_a, in_b) if x and y)
        fp = sum(1 for x, y in zip(in_a, in_b) if not x and y)
        fn = sum(1 for x, y in zip(in_a, in_b) if x and not y)
        precision = tp / (tp + fp) if tp + fp else None
        recall = tp / (tp + fn) if tp + fn else None
        if precision and recall:
            f1 = 2 * precision * recall / (precision + recall)
        elif precision is None or recall is None:
            f1 = None
        else:
            f1 = 0.0
        per_label[lab] = PerLabelStats(
            kappa=kappa,
            f1=f1,
            precision=precision,
            recall=recall,
            distribution=sum(in_a) / n,
        )
    return AgreementReport(
        overall_kappa=cohens_kappa(a, b),
        per_label=per_label,
        n_items=n,
    )


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows from one dataset and columns from the other."""

    row_labels: tuple
    col_labels: tuple
    counts: tuple  # tuple of row tuples
    empty_intersection: bool = False

    @property
    def row_marginals(self) -> tuple:
        return tuple(sum(row) for row in self.counts)

    @property
    def col_marginals(self) -> tuple:
        return tuple(sum(col) for col in zip(*self.counts))

    @property
    def total(self) -> int:
        return sum(self.row_marginals)

    def cell(self, row_label, col_label) -> int:
        return self.counts[self.row_labels.index(row_label)][self.col_labels.index(col_label)]

    def as_dict(self) -> dict:
        return {
            "row_labels": [str(lab) for lab in self.row_labels],
            "col_labels": [str(lab) for lab in self.col_labels],
            "counts": [list(row) for row in self.counts],
            "marginals": {
                "rows": list(self.row_marginals),
                "cols": list(self.col_marginals),
                "total": self.total,
            },
            "empty_intersection": self.empty_intersection,
        }


def _entries(dataset) -> Mapping:
    return dataset.entries if hasattr(dataset, "entries") else dataset


def compare_datasets(
    ours,
    theirs,
    projector: Optional[Callable] = None,
    label_order: Optional[Sequence[Hashable]] = None,
    inverter: Optional[Callable] = None,
) -> ConfusionMatrix:
    """Confusion matrix over the pairs two relation sets share.

    Keys are (doc_id, eiid1, eiid2).  When one side stores a pair in the
    opposite order, its label is inverted (via `inverter`) to align.
    `projector` maps the second set's labels (e.g. interval relations)
    into the first set's label space before counting.  Rows come from
    `theirs`, columns from `ours`.
    """
    ours_map = _entries(ours)
    theirs_map = _entries(theirs)
    joined = []
    for key, their_label in theirs_map.items():
        doc_id, e1, e2 = key
        if projector is not None:
            their_label = projector(their_label)
        if key in ours_map:
            joined.append((their_label, ours_map[key]))
        elif (doc_id, e2, e1) in ours_map:
            if inverter is None:
                raise ValueError("reversed pair found but no inverter supplied")
            joined.append((inverter(their_label), ours_map[(doc_id, e2, e1)]))
    if label_order is None:
        seen = []
        for their_label, our_label in joined:
            for lab in (their_label, our_label):
                if lab not in seen:
                    seen.append(lab)
        label_order = seen
    labels = tuple(label_order)
    index = {lab: i for i, lab in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for their_label, our_label in joined:
        counts[index[their_label]][index[our_label]] += 1
    return ConfusionMatrix(
        row_labels=labels,
        col_labels=labels,
        counts=tuple(tuple(row) for row in counts),
        empty_intersection=not joined,
    )


@dataclass(frozen=True)
class McNemarResult:
    chi_square: Optional[float]  # None when the test does not apply (b + c = 0)
    b: int
    c: int

    @property
    def applicable(self) -> bool:
        return self.chi_square is not None

    def as_dict(self) -> dict:
        return {"chi_square": self.chi_square, "b": self.b, "c": self.c}


def mcnemars_test(paired: Sequence[tuple[bool, bool]]) -> McNemarResult:
    """Paired binary test: chi-square = (b - c)^2 / (b + c), no correction."""
    if not paired:
        raise EmptySequenceError("no paired observations")
    b = sum(1 for x, y in paired if x and not y)
    c = sum(1 for x, y in paired if not x and y)
    if b + c == 0:
        return McNemarResult(chi_square=None, b=b, c=c)
    return McNemarResult(chi_square=(b - c) ** 2 / (b + c), b=b, c=c)


def label_distribution(labels: Sequence[Hashable]) -> dict:
    """Relative frequency of each label, summing to 1."""
    if not labels:
        raise EmptySequenceError("no labels")
    counts = Counter(labels)
    n = len(labels)
    return {lab: count / n for lab, count in counts.items()}
