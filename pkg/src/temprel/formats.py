"""File formats: a TimeML subset, TB-Dense and MATRES relation files,
POS sidecars, and a rule fallback tagger for fixture-sized corpora."""

from __future__ import annotations

import enum
import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .algebra import IntervalRelation, PointRelation
from .corpus import Document, Event, EventCategory, Polarity, Token

__all__ = [
    "RelationSource",
    "RelationSet",
    "MalformedXmlError",
    "DanglingInstanceError",
    "UnknownLabelError",
    "DuplicatePairError",
    "ColumnCountError",
    "parse_timeml",
    "load_tbdense",
    "export_tbdense",
    "load_matres",
    "export_matres",
    "export_relations_tsv",
    "load_relations_tsv",
    "load_pos_sidecar",
    "apply_pos_sidecar",
    "guess_pos",
    "normalize_event_id",
    "TBDENSE_LABELS",
]


class RelationSource(enum.Enum):
    MATRES_FORMAT = "matres"
    TBDENSE_FORMAT = "tbdense"
    INTERNAL = "internal"


@dataclass
class RelationSet:
    """Relations keyed by (doc_id, eiid1, eiid2).

    surfaces optionally carries the two event token strings per key, which
    the MATRES text format needs for round-tripping.
    """

    entries: dict
    source: RelationSource
    surfaces: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)


class MalformedXmlError(ValueError):
    pass


class DanglingInstanceError(ValueError):
    pass


class UnknownLabelError(ValueError):
    pass


class DuplicatePairError(ValueError):
    pass


class ColumnCountError(ValueError):
    pass


_PUNCT = set(".,;:!?\"'()[]{}`")
_SENT_END = {".", "!", "?"}


def _split_raw_token(raw: str) -> list[str]:
    """Detach leading and trailing punctuation as separate tokens."""
    head, tail = [], []
    while raw and raw[0] in _PUNCT:
        head.append(raw[0])
        raw = raw[1:]
    while raw and raw[-1] in _PUNCT:
        tail.append(raw[-1])
        raw = raw[:-1]
    middle = [raw] if raw else []
    return head + middle + list(reversed(tail))


def tokenize(text: str) -> list[str]:
    out = []
    for raw in text.split():
        out.extend(_split_raw_token(raw))
    return out


_CLOSED_CLASS = {
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT", "these": "DT",
    "will": "MD", "would": "MD", "can": "MD", "could": "MD", "may": "MD",
    "might": "MD", "shall": "MD", "should": "MD", "must": "MD",
    "in": "IN", "on": "IN", "at": "IN", "by": "IN", "for": "IN", "with": "IN",
    "from": "IN", "after": "IN", "before": "IN", "since": "IN", "during": "IN",
    "until": "IN", "of": "IN", "into": "IN", "over": "IN", "about": "IN",
    "to": "TO", "and": "CC", "or": "CC", "but": "CC",
    "he": "PRP", "she": "PRP", "they": "PRP", "it": "PRP", "we": "PRP",
    "i": "PRP", "you": "PRP", "who": "WP", "not": "RB", "also": "RB",
    "is": "VBZ", "was": "VBD", "were": "VBD", "are": "VBP", "am": "VBP",
    "be": "VB", "been": "VBN", "being": "VBG",
    "has": "VBZ", "have": "VBP", "had": "VBD", "do": "VBP", "does": "VBZ",
    "did": "VBD", "said": "VBD", "says": "VBZ", "say": "VBP",
}


def guess_pos(tokens: Sequence[str]) -> list[str]:
    """Rule tagger used only when no POS sidecar is available.

    Closed-class lexicon plus suffix heuristics; anything else is a noun.
    Fixture corpora carry event POS from their instance records, so this
    only has to be plausible for context words.
    """
    tags = []
    for i, tok in enumerate(tokens):
        low = tok.lower()
        if all(ch in _PUNCT for ch in tok):
            tags.append(tok)
        elif low in _CLOSED_CLASS:
            tags.append(_CLOSED_CLASS[low])
        elif tok[0].isdigit():
            tags.append("CD")
        elif tok[0].isupper() and i > 0 and tokens[i - 1] not in _SENT_END:
            tags.append("NNP")
        elif low.endswith("ed"):
            tags.append("VBD")
        elif low.endswith("ing"):
            tags.append("VBG")
        elif low.endswith("ly"):
            tags.append("RB")
        else:
            tags.append("NN")
    return tags


_TIMEML_POS = {
    "VERB": "VB",
    "NOUN": "NN",
    "ADJECTIVE": "JJ",
    "PREPOSITION": "IN",
    "OTHER": "XX",
}


def _category_hint(polarity: Polarity) -> EventCategory:
    # final categories come from the anchorability annotation; parsing
    # only pre-fills the one hint that is mechanical
    return EventCategory.NEGATION if polarity is Polarity.NEG else EventCategory.MAIN_CANDIDATE


def parse_timeml(xml_text: str) -> Document:
    """Parse the TimeML subset: EVENT + MAKEINSTANCE over tokenized text.

    Sentence boundaries come from <s> elements when present, otherwise
    from end-of-sentence punctuation.  TLINK and TIMEX3 records are kept
    opaque under Document.extra.  Events without a MAKEINSTANCE record
    get a synthesized instance id and a warning.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as err:
        raise MalformedXmlError(str(err)) from None

    doc_id = "doc"
    for tag in ("DOCID", "DOCNO"):
        node = root.find(f".//{tag}")
        if node is not None and node.text and node.text.strip():
            doc_id = node.text.strip()
            break

    text_root = root.find(".//TEXT")
    if text_root is None:
        text_root = root

    surfaces: list[str] = []
    sentence_ids: list[int] = []
    event_offset: dict[str, int] = {}
    event_attrs: dict[str, dict] = {}
    state = {"sentence": 0, "saw_s": False}

    def emit(text: Optional[str], sentence: int):
        for tok in tokenize(text or ""):
            surfaces.append(tok)
            sentence_ids.append(sentence)

    def walk(elem):
        if elem.tag == "s":
            state["saw_s"] = True
        if elem.tag == "EVENT":
            eid = elem.attrib.get("eid", "")
            start = len(surfaces)
            emit(elem.text, state["sentence"])
            for child in list(elem):
                walk(child)
                emit(child.tail, state["sentence"])
            if len(surfaces) > start and eid:
                event_offset[eid] = start
                event_attrs[eid] = dict(elem.attrib)
            return
        emit(elem.text, state["sentence"])
        for child in list(elem):
            walk(child)
            emit(child.tail, state["sentence"])
        if elem.tag == "s":
            state["sentence"] += 1

    emit(text_root.text, state["sentence"])
    for child in list(text_root):
        walk(child)
        emit(child.tail, state["sentence"])

    if not state["saw_s"]:
        # fall back to splitting after end-of-sentence punctuation
        sentence = 0
        for i, tok in enumerate(surfaces):
            sentence_ids[i] = sentence
            if tok in _SENT_END:
                sentence += 1

    tags = guess_pos(surfaces)

    events: list[Event] = []
    seen_eids = set()
    for inst in root.iter("MAKEINSTANCE"):
        eid = inst.attrib.get("eventID", "")
        if eid not in event_offset:
            raise DanglingInstanceError(f"MAKEINSTANCE references unknown event {eid!r}")
        seen_eids.add(eid)
        polarity = Polarity.NEG if inst.attrib.get("polarity", "POS") == "NEG" else Polarity.POS
        pos_tag = _TIMEML_POS.get(inst.attrib.get("pos", "VERB"), "VB")
        offset = event_offset[eid]
        tags[offset] = pos_tag
        events.append(
            Event(
                eid=eid,
                eiid=inst.attrib.get("eiid", f"ei{eid.lstrip('e')}"),
                token_offset=offset,
                category=_category_hint(polarity),
                aspect=inst.attrib.get("aspect") or "NONE",
                modality=inst.attrib.get("modality") or "NONE",
                polarity=polarity,
                pos_tag=pos_tag,
            )
        )
    for eid, offset in event_offset.items():
        if eid in seen_eids:
            continue
        warnings.warn(f"event {eid} has no MAKEINSTANCE record; synthesizing an instance id")
        tags[offset] = "VB"
        events.append(
            Event(
                eid=eid,
                eiid=f"ei{eid.lstrip('e')}",
                token_offset=offset,
                category=EventCategory.MAIN_CANDIDATE,
                pos_tag="VB",
            )
        )
    events.sort(key=lambda ev: (ev.token_offset, ev.eiid))

    tokens = [
        Token(surface=s, pos=p, sentence_index=sid)
        for s, p, sid in zip(surfaces, tags, sentence_ids)
    ]
    extra = {
        "tlinks": [dict(el.attrib) for el in root.iter("TLINK")],
        "timex3": [dict(el.attrib) for el in root.iter("TIMEX3")],
    }
    return Document(doc_id=doc_id, tokens=tokens, events=events, source="timeml", extra=extra)


TBDENSE_LABELS: Mapping[str, IntervalRelation] = {
    "b": IntervalRelation.BEFORE,
    "a": IntervalRelation.AFTER,
    "i": IntervalRelation.INCLUDES,
    "ii": IntervalRelation.INCLUDED,
    "s": IntervalRelation.EQUAL,
    "v": IntervalRelation.VAGUE,
}


def load_tbdense(tsv_text: str) -> RelationSet:
    """Parse `doc_id  eid1  eid2  rel` lines into interval relations."""
    entries = {}
    for lineno, line in enumerate(tsv_text.splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise ColumnCountError(f"line {lineno}: expected 4 columns, got {len(cols)}")
        doc_id, e1, e2, label = cols
        if label not in TBDENSE_LABELS:
            raise UnknownLabelError(f"line {lineno}: unknown relation {label!r}")
        key = (doc_id, e1, e2)
        if key in entries:
            raise DuplicatePairError(f"line {lineno}: duplicate pair {key}")
        entries[key] = TBDENSE_LABELS[label]
    return RelationSet(entries=entries, source=RelationSource.TBDENSE_FORMAT)


_TBDENSE_ABBREV = {rel: abbrev for abbrev, rel in TBDENSE_LABELS.items()}


def export_tbdense(relations: RelationSet) -> str:
    """Serialize interval relations back to the abbreviated four-column form."""
    lines = []
    for key in sorted(relations.entries):
        label = relations.entries[key]
        if label not in _TBDENSE_ABBREV:
            raise UnknownLabelError(f"{key}: {label!r} has no abbreviation")
        lines.append("\t".join((*key, _TBDENSE_ABBREV[label])))
    return "".join(line + "\n" for line in lines)


_MATRES_LABELS = {rel.name: rel for rel in PointRelation}


def load_matres(tsv_text: str) -> RelationSet:
    """Parse `doc_id  token1  token2  eiid1  eiid2  LABEL` lines.

    A single header line is tolerated and skipped.
    """
    entries = {}
    surfaces = {}
    lines = tsv_text.splitlines()
    start = 0
    if lines:
        cols = lines[0].split("\t")
        if len(cols) != 6 or cols[5] not in _MATRES_LABELS:
            start = 1  # header
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 6:
            raise ColumnCountError(f"line {lineno}: expected 6 columns, got {len(cols)}")
        doc_id, tok1, tok2, e1, e2, label = cols
        if label not in _MATRES_LABELS:
            raise UnknownLabelError(f"line {lineno}: unknown label {label!r}")
        key = (doc_id, e1, e2)
        if key in entries:
            raise DuplicatePairError(f"line {lineno}: duplicate pair {key}")
        entries[key] = _MATRES_LABELS[label]
        surfaces[key] = (tok1, tok2)
    return RelationSet(entries=entries, source=RelationSource.MATRES_FORMAT, surfaces=surfaces)


def export_matres(relations: RelationSet) -> str:
    """Serialize to the six-column text format, sorted by key."""
    lines = []
    for key in sorted(relations.entries):
        doc_id, e1, e2 = key
        if key not in relations.surfaces:
            raise KeyError(f"no event surfaces recorded for {key}")
        tok1, tok2 = relations.surfaces[key]
        label = relations.entries[key]
        lines.append("\t".join((doc_id, tok1, tok2, e1, e2, label.name)))
    return "".join(line + "\n" for line in lines)


def export_relations_tsv(relations: RelationSet) -> str:
    """Bare four-column `doc_id  id1  id2  LABEL` serialization."""
    lines = []
    for (doc_id, e1, e2), label in sorted(relations.entries.items()):
        lines.append("\t".join((doc_id, e1, e2, label.name)))
    return "".join(line + "\n" for line in lines)


def load_relations_tsv(tsv_text: str) -> RelationSet:
    entries = {}
    for lineno, line in enumerate(tsv_text.splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise ColumnCountError(f"line {lineno}: expected 4 columns, got {len(cols)}")
        doc_id, e1, e2, label = cols
        if label not in _MATRES_LABELS:
            raise UnknownLabelError(f"line {lineno}: unknown label {label!r}")
        key = (doc_id, e1, e2)
        if key in entries:
            raise DuplicatePairError(f"line {lineno}: duplicate pair {key}")
        entries[key] = _MATRES_LABELS[label]
    return RelationSet(entries=entries, source=RelationSource.INTERNAL)


def normalize_event_id(event_id: str) -> str:
    """Common stem of eid/eiid spellings: 'e12', 'ei12', '12' -> '12'."""
    match = re.fullmatch(r"(?:ei|e)?(\w+)", event_id)
    return match.group(1) if match else event_id


def load_pos_sidecar(tsv_text: str) -> dict:
    """Parse `doc_id  token_index  pos` lines into an override map."""
    overrides = {}
    for lineno, line in enumerate(tsv_text.splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ColumnCountError(f"line {lineno}: expected 3 columns, got {len(cols)}")
        doc_id, index, pos = cols
        try:
            overrides[(doc_id, int(index))] = pos
        except ValueError:
            raise ColumnCountError(f"line {lineno}: token index {index!r} is not an integer")
    return overrides


def apply_pos_sidecar(doc: Document, overrides: Mapping) -> Document:
    """New Document with sidecar POS tags replacing the guessed ones."""
    tokens = [
        Token(
            surface=tok.surface,
            pos=overrides.get((doc.doc_id, i), tok.pos),
            sentence_index=tok.sentence_index,
        )
        for i, tok in enumerate(doc.tokens)
    ]
    return Document(
        doc_id=doc.doc_id,
        tokens=tokens,
        events=list(doc.events),
        source=doc.source,
        extra=dict(doc.extra),
    )
