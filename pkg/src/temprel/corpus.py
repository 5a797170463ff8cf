"""Corpus model: documents, verb events, axis assignment, pair generation.

An event lives on at most one timeline axis.  Intention and opinion
events hang on an orthogonal branch anchored at a main-axis event;
hypothetical and generic events live on parallel axes; negated events
are on no axis; static and recurrent events are set aside entirely.
Relation questions are only ever generated between same-axis events.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

__all__ = [
    "EventCategory",
    "Polarity",
    "AxisKind",
    "Axis",
    "Token",
    "Event",
    "Document",
    "AxisAssignment",
    "EventPair",
    "MissingAssignmentError",
    "classify_axis",
    "assignment_for",
    "anchorable_events",
    "generate_pairs",
    "document_to_json",
    "document_from_json",
]


class EventCategory(enum.Enum):
    MAIN_CANDIDATE = "main_candidate"
    INTENTION = "intention"
    OPINION = "opinion"
    HYPOTHESIS = "hypothesis"
    GENERIC = "generic"
    NEGATION = "negation"
    STATIC = "static"
    RECURRENT = "recurrent"


class Polarity(enum.Enum):
    POS = "pos"
    NEG = "neg"


class AxisKind(enum.Enum):
    MAIN = "main"
    ORTHOGONAL = "orthogonal"
    PARALLEL = "parallel"
    NONE = "none"
    OTHER = "other"  # static/recurrent: excluded from relation annotation


@dataclass(frozen=True)
class Axis:
    """An axis selector: kind plus the discriminating detail, if any."""

    kind: AxisKind
    anchor: Optional[str] = None  # orthogonal only: main-axis event the branch hangs from
    parallel_kind: Optional[EventCategory] = None  # HYPOTHESIS or GENERIC

    def __post_init__(self):
        if self.kind is AxisKind.ORTHOGONAL:
            if not self.anchor:
                raise ValueError("orthogonal axis requires an anchor event")
        elif self.anchor is not None:
            raise ValueError(f"{self.kind.value} axis takes no anchor")
        if self.kind is AxisKind.PARALLEL:
            if self.parallel_kind not in (EventCategory.HYPOTHESIS, EventCategory.GENERIC):
                raise ValueError("parallel axis requires kind hypothesis or generic")
        elif self.parallel_kind is not None:
            raise ValueError(f"{self.kind.value} axis takes no parallel kind")

    @classmethod
    def main(cls) -> "Axis":
        return cls(AxisKind.MAIN)

    @classmethod
    def orthogonal(cls, anchor: str) -> "Axis":
        return cls(AxisKind.ORTHOGONAL, anchor=anchor)

    @classmethod
    def parallel(cls, kind: EventCategory) -> "Axis":
        return cls(AxisKind.PARALLEL, parallel_kind=kind)

    @classmethod
    def none(cls) -> "Axis":
        return cls(AxisKind.NONE)

    @classmethod
    def other(cls) -> "Axis":
        return cls(AxisKind.OTHER)


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    sentence_index: int


@dataclass(frozen=True)
class Event:
    eid: str
    eiid: str
    token_offset: int
    category: EventCategory
    aspect: str = "NONE"
    modality: str = "NONE"
    polarity: Polarity = Polarity.POS
    pos_tag: str = "VB"


@dataclass
class Document:
    doc_id: str
    tokens: list[Token]
    events: list[Event] = field(default_factory=list)
    source: str = ""
    extra: dict = field(default_factory=dict)  # opaque format payloads, uninterpreted

    def __post_init__(self):
        last = 0
        for tok in self.tokens:
            if tok.sentence_index < last:
                raise ValueError(f"sentence indices go backwards in {self.doc_id}")
            last = tok.sentence_index
        for ev in self.events:
            if not 0 <= ev.token_offset < len(self.tokens):
                raise ValueError(f"event {ev.eiid} offset outside document {self.doc_id}")
        self._by_eiid = {ev.eiid: ev for ev in self.events}
        if len(self._by_eiid) != len(self.events):
            raise ValueError(f"duplicate event instance id in {self.doc_id}")

    def event(self, eiid: str) -> Event:
        return self._by_eiid[eiid]

    def surface(self, eiid: str) -> str:
        return self.tokens[self._by_eiid[eiid].token_offset].surface

    def sentence_of(self, eiid: str) -> int:
        return self.tokens[self._by_eiid[eiid].token_offset].sentence_index


@dataclass(frozen=True)
class AxisAssignment:
    event: str  # eiid
    axis: Axis
    anchorable_on_main: bool

    def __post_init__(self):
        if self.axis.kind is AxisKind.MAIN and not self.anchorable_on_main:
            raise ValueError(f"event {self.event} on the main axis must be anchorable on it")


@dataclass(frozen=True)
class EventPair:
    first: str  # eiid, earlier in text
    second: str
    doc_id: str


class MissingAssignmentError(KeyError):
    """A document event has no axis assignment."""


_AXIS_OF_CATEGORY = {
    EventCategory.MAIN_CANDIDATE: AxisKind.MAIN,
    EventCategory.INTENTION: AxisKind.ORTHOGONAL,
    EventCategory.OPINION: AxisKind.ORTHOGONAL,
    EventCategory.HYPOTHESIS: AxisKind.PARALLEL,
    EventCategory.GENERIC: AxisKind.PARALLEL,
    EventCategory.NEGATION: AxisKind.NONE,
    EventCategory.STATIC: AxisKind.OTHER,
    EventCategory.RECURRENT: AxisKind.OTHER,
}


def classify_axis(category: EventCategory) -> AxisKind:
    """Which kind of axis an event of this category belongs on."""
    return _AXIS_OF_CATEGORY[category]


def assignment_for(event: Event, anchor: Optional[str] = None) -> AxisAssignment:
    """Build the axis assignment implied by an event's category.

    Orthogonal categories need the anchor event their branch hangs from;
    parallel axes are keyed by the category itself.
    """
    kind = classify_axis(event.category)
    if kind is AxisKind.MAIN:
        axis = Axis.main()
    elif kind is AxisKind.ORTHOGONAL:
        if anchor is None:
            raise ValueError(f"orthogonal event {event.eiid} needs an anchor")
        axis = Axis.orthogonal(anchor)
    elif kind is AxisKind.PARALLEL:
        axis = Axis.parallel(event.category)
    elif kind is AxisKind.NONE:
        axis = Axis.none()
    else:
        axis = Axis.other()
    return AxisAssignment(event=event.eiid, axis=axis, anchorable_on_main=kind is AxisKind.MAIN)


def anchorable_events(
    doc: Document,
    axis: Axis,
    assignments: Sequence[AxisAssignment],
) -> list[str]:
    """Events assigned to exactly this axis, in text order."""
    by_event = {a.event: a for a in assignments}
    out = []
    for ev in sorted(doc.events, key=lambda e: e.token_offset):
        assignment = by_event.get(ev.eiid)
        if assignment is None:
            raise MissingAssignmentError(f"no axis assignment for event {ev.eiid}")
        if assignment.axis == axis:
            out.append(ev.eiid)
    return out


def generate_pairs(
    doc: Document,
    anchorable: Iterable[str],
    window_sentences: int = 2,
) -> list[EventPair]:
    """All same-axis pairs within a sliding sentence window.

    Events qualify as a pair when their sentence indices differ by less
    than window_sentences; each unordered pair is emitted once with the
    textually earlier event first, ordered by token offsets.
    """
    if window_sentences < 1:
        raise ValueError("window must cover at least one sentence")
    events = sorted((doc.event(eiid) for eiid in anchorable), key=lambda e: e.token_offset)
    pairs = []
    for i, first in enumerate(events):
        s1 = doc.tokens[first.token_offset].sentence_index
        for second in events[i + 1 :]:
            s2 = doc.tokens[second.token_offset].sentence_index
            if abs(s2 - s1) < window_sentences:
                pairs.append(EventPair(first.eiid, second.eiid, doc.doc_id))
    return pairs


def document_to_json(doc: Document) -> dict:
    """Plain-dict form used by corpus files and the annotation service."""
    return {
        "doc_id": doc.doc_id,
        "tokens": [[t.surface, t.pos, t.sentence_index] for t in doc.tokens],
        "events": [
            {
                "eid": e.eid,
                "eiid": e.eiid,
                "token_offset": e.token_offset,
                "category": e.category.value,
                "aspect": e.aspect,
                "modality": e.modality,
                "polarity": e.polarity.value,
                "pos_tag": e.pos_tag,
            }
            for e in doc.events
        ],
    }


def document_from_json(payload: dict) -> Document:
    tokens = [Token(surface=s, pos=p, sentence_index=i) for s, p, i in payload["tokens"]]
    events = [
        Event(
            eid=e["eid"],
            eiid=e["eiid"],
            token_offset=e["token_offset"],
            category=EventCategory(e["category"]),
            aspect=e.get("aspect", "NONE"),
            modality=e.get("modality", "NONE"),
            polarity=Polarity(e.get("polarity", "pos")),
            pos_tag=e.get("pos_tag", "VB"),
        )
        for e in payload["events"]
    ]
    return Document(doc_id=payload["doc_id"], tokens=tokens, events=events)
