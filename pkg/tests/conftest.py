import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from temprel.corpus import Document, Event, EventCategory, Token


def build_doc(doc_id="doc1", sentences=None, events=None):
    """Assemble a Document from shorthand.

    sentences: list of token-string lists, one per sentence; verbs are
    marked by wrapping in events.  events: list of (eid, sent_idx,
    word_idx, category) tuples.
    """
    sentences = sentences or [["Police", "confirmed", "Friday", "."]]
    tokens = []
    offsets = {}
    for s_idx, words in enumerate(sentences):
        for w_idx, word in enumerate(words):
            offsets[(s_idx, w_idx)] = len(tokens)
            tokens.append(Token(surface=word, pos="VB", sentence_index=s_idx))
    evs = []
    for eid, s_idx, w_idx, category in events or []:
        evs.append(
            Event(
                eid=eid,
                eiid=f"ei{eid[1:]}" if eid.startswith("e") else f"ei_{eid}",
                token_offset=offsets[(s_idx, w_idx)],
                category=category,
            )
        )
    return Document(doc_id=doc_id, tokens=tokens, events=evs)
