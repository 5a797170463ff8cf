"""Feature extraction for event pair classification.

Eight families: neighborhood POS, distances, intervening modals and
temporal connectives, lexicon relatedness (shared synset, derivational
link), covering preposition, and event properties (aspect, modality,
polarity).  Extraction is a pure function of (pair, document, lexicon).
"""

from __future__ import annotations

from typing import Optional

from .corpus import Document, EventPair
from .wordnet import WordNetIndex

__all__ = ["MissingPosError", "extract_features", "MODALS", "CONNECTIVES"]

MODALS = ("will", "would", "can", "could", "may", "might")
CONNECTIVES = ("before", "after", "since")

_PAD = "PAD"
_NEIGHBORHOOD = 3
_PREP_WINDOW = 5


class MissingPosError(ValueError):
    """A consulted token has no POS tag."""


def _bucket(distance: int) -> str:
    return str(distance) if distance < 5 else "5+"


def _pos_window(doc: Document, offset: int, slot: str, fv: dict):
    sentence = doc.tokens[offset].sentence_index
    for delta in range(-_NEIGHBORHOOD, _NEIGHBORHOOD + 1):
        i = offset + delta
        if 0 <= i < len(doc.tokens) and doc.tokens[i].sentence_index == sentence:
            pos = doc.tokens[i].pos
            if not pos:
                raise MissingPosError(f"token {i} of {doc.doc_id} has no POS tag")
        else:
            pos = _PAD
        fv[f"pos{slot}[{delta:+d}]={pos}"] = 1.0


def _nearest_left_preposition(doc: Document, offset: int) -> str:
    sentence = doc.tokens[offset].sentence_index
    for i in range(offset - 1, max(-1, offset - 1 - _PREP_WINDOW), -1):
        if i < 0 or doc.tokens[i].sentence_index != sentence:
            break
        if doc.tokens[i].pos == "IN":
            return doc.tokens[i].surface.lower()
    return "NONE"


def extract_features(
    pair: EventPair,
    doc: Document,
    wn: Optional[WordNetIndex] = None,
) -> dict[str, float]:
    """Named sparse features for one event pair.

    The lexicon families (shared synset, derivational link) are skipped
    when no lexicon is supplied or when either surface fails to
    lemmatize as a verb.
    """
    ev1, ev2 = doc.event(pair.first), doc.event(pair.second)
    fv: dict[str, float] = {}

    # (i) POS of each event and its in-sentence neighborhood
    _pos_window(doc, ev1.token_offset, "1", fv)
    _pos_window(doc, ev2.token_offset, "2", fv)

    # (ii) bucketed sentence and token distances
    sent_dist = abs(doc.tokens[ev2.token_offset].sentence_index
                    - doc.tokens[ev1.token_offset].sentence_index)
    tok_dist = abs(ev2.token_offset - ev1.token_offset)
    fv[f"sent_dist={_bucket(sent_dist)}"] = 1.0
    fv[f"tok_dist={_bucket(tok_dist)}"] = 1.0

    # (iii) and (iv): words strictly between the two mentions
    lo, hi = sorted((ev1.token_offset, ev2.token_offset))
    between = {doc.tokens[i].surface.lower() for i in range(lo + 1, hi)}
    for modal in MODALS:
        if modal in between:
            fv[f"modal_between={modal}"] = 1.0
    for connective in CONNECTIVES:
        if connective in between:
            fv[f"connective_between={connective}"] = 1.0

    # (v) and (vi): lexicon relations between the verb lemmas
    if wn is not None:
        lemma1 = wn.lemmatize(doc.surface(pair.first))
        lemma2 = wn.lemmatize(doc.surface(pair.second))
        if lemma1 and lemma2:
            if wn.share_synset(lemma1, lemma2):
                fv["share_synset"] = 1.0
            if wn.derivationally_linked(lemma1, lemma2):
                fv["deriv_related"] = 1.0

    # (vii) nearest preposition within five tokens to the left
    fv[f"prep1={_nearest_left_preposition(doc, ev1.token_offset)}"] = 1.0
    fv[f"prep2={_nearest_left_preposition(doc, ev2.token_offset)}"] = 1.0

    # (viii) event properties
    for slot, ev in (("1", ev1), ("2", ev2)):
        fv[f"aspect{slot}={ev.aspect}"] = 1.0
        fv[f"modality{slot}={ev.modality}"] = 1.0
        fv[f"polarity{slot}={ev.polarity.value}"] = 1.0

    return fv
