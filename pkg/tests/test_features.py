"""Feature extraction: window shapes, distance buckets, lexicon gating."""

from pathlib import Path

import pytest

from temprel.corpus import Document, Event, EventCategory, EventPair, Polarity, Token
from temprel.features import MissingPosError, extract_features
from temprel.wordnet import load_wordnet

WN_DIR = Path(__file__).parent / "fixtures" / "wordnet"


@pytest.fixture(scope="module")
def wn():
    return load_wordnet(WN_DIR)


def make_doc(specs, events, doc_id="doc1"):
    """specs: (surface, pos, sentence_index) triples."""
    tokens = [Token(surface=s, pos=p, sentence_index=i) for s, p, i in specs]
    return Document(doc_id=doc_id, tokens=tokens, events=list(events))


def ev(eiid, offset, **kwargs):
    kwargs.setdefault("category", EventCategory.MAIN_CANDIDATE)
    return Event(eid="e" + eiid[2:], eiid=eiid, token_offset=offset, **kwargs)


def two_sentence_doc():
    specs = [
        ("Police", "NN", 0), ("said", "VBD", 0), ("they", "PRP", 0),
        ("left", "VBD", 0), ("Friday", "NN", 0), (".", ".", 0),
        ("They", "PRP", 1), ("returned", "VBD", 1), ("today", "NN", 1), (".", ".", 1),
    ]
    return make_doc(specs, [ev("ei1", 1), ev("ei2", 7)])


PAIR = EventPair("ei1", "ei2", "doc1")


class TestPosWindows:
    def test_window_features_with_padding(self):
        fv = extract_features(PAIR, two_sentence_doc())
        assert fv["pos1[-3]=PAD"] == 1.0
        assert fv["pos1[-2]=PAD"] == 1.0
        assert fv["pos1[-1]=NN"] == 1.0
        assert fv["pos1[+0]=VBD"] == 1.0
        assert fv["pos1[+1]=PRP"] == 1.0
        assert fv["pos1[+3]=NN"] == 1.0

    def test_window_stops_at_sentence_boundary(self):
        # tokens 4 and 5 sit in sentence 0, so ei2 at offset 7 sees PAD there
        fv = extract_features(PAIR, two_sentence_doc())
        assert fv["pos2[-3]=PAD"] == 1.0
        assert fv["pos2[-2]=PAD"] == 1.0
        assert fv["pos2[-1]=PRP"] == 1.0
        assert fv["pos2[+2]=."] == 1.0
        assert fv["pos2[+3]=PAD"] == 1.0

    def test_missing_pos_in_window_raises(self):
        specs = [("He", "PRP", 0), ("won", "VBD", 0), ("again", "", 0), ("and", "CC", 0),
                 ("celebrated", "VBD", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 4)])
        with pytest.raises(MissingPosError):
            extract_features(PAIR, doc)

    def test_missing_pos_outside_windows_is_ignored(self):
        # blank tag at offset 5 is more than three tokens from either event
        specs = [("He", "PRP", 0), ("said", "VBD", 0), ("that", "IN", 0),
                 ("the", "DT", 0), ("old", "JJ", 0), ("crumbling", "", 0),
                 ("walls", "NNS", 0), ("around", "IN", 0), ("town", "NN", 0),
                 ("collapsed", "VBD", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 9)])
        fv = extract_features(PAIR, doc)
        assert fv["pos2[+0]=VBD"] == 1.0


class TestDistances:
    def test_same_sentence_distances(self):
        specs = [("He", "PRP", 0), ("came", "VBD", 0), ("and", "CC", 0),
                 ("went", "VBD", 0), (".", ".", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 3)])
        fv = extract_features(PAIR, doc)
        assert fv["sent_dist=0"] == 1.0
        assert fv["tok_dist=2"] == 1.0

    def test_cross_sentence_distance_buckets(self):
        fv = extract_features(PAIR, two_sentence_doc())
        assert fv["sent_dist=1"] == 1.0
        assert fv["tok_dist=5+"] == 1.0  # six tokens apart

    def test_bucket_boundary(self):
        specs = [("a", "DT", 0)] * 7
        near = make_doc(specs, [ev("ei1", 0), ev("ei2", 4)])
        far = make_doc(specs, [ev("ei1", 0), ev("ei2", 5)])
        assert "tok_dist=4" in extract_features(PAIR, near)
        assert "tok_dist=5+" in extract_features(PAIR, far)


class TestBetweenWords:
    def test_modal_and_connective_between(self):
        specs = [("He", "PRP", 0), ("said", "VBD", 0), ("he", "PRP", 0),
                 ("would", "MD", 0), ("resign", "VB", 0), ("Before", "IN", 0),
                 ("Friday", "NN", 0), (".", ".", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 6)])
        fv = extract_features(PAIR, doc)
        assert fv["modal_between=would"] == 1.0
        # matching folds case
        assert fv["connective_between=before"] == 1.0
        assert "connective_between=after" not in fv

    def test_window_is_strictly_between(self):
        # the modal is one of the event tokens, so it must not fire
        specs = [("He", "PRP", 0), ("would", "MD", 0), ("go", "VB", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 2)])
        fv = extract_features(PAIR, doc)
        assert not any(name.startswith("modal_between") for name in fv)
        assert not any(name.startswith("connective_between") for name in fv)


class TestLexicon:
    def test_shared_synset_fires_on_inflected_forms(self, wn):
        specs = [("Workers", "NNS", 0), ("hitting", "VBG", 0), ("and", "CC", 0),
                 ("struck", "VBD", 0), (".", ".", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 3)])
        fv = extract_features(PAIR, doc, wn)
        assert fv["share_synset"] == 1.0
        # hit and strike have no derivational pointers in the fixture
        assert "deriv_related" not in fv

    def test_derivational_link_through_shared_nominalization(self, wn):
        specs = [("They", "PRP", 0), ("destroyed", "VBD", 0), ("what", "WP", 0),
                 ("others", "NNS", 0), ("destructed", "VBD", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 4)])
        fv = extract_features(PAIR, doc, wn)
        assert fv["deriv_related"] == 1.0
        assert "share_synset" not in fv

    def test_skipped_without_lexicon(self):
        specs = [("Workers", "NNS", 0), ("hitting", "VBG", 0), ("and", "CC", 0),
                 ("struck", "VBD", 0), (".", ".", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 3)])
        fv = extract_features(PAIR, doc)
        assert "share_synset" not in fv
        assert "deriv_related" not in fv

    def test_skipped_when_a_surface_does_not_lemmatize(self, wn):
        specs = [("On", "IN", 0), ("Friday", "NN", 0), ("they", "PRP", 0),
                 ("struck", "VBD", 0)]
        doc = make_doc(specs, [ev("ei1", 1), ev("ei2", 3)])
        fv = extract_features(PAIR, doc, wn)
        assert "share_synset" not in fv
        assert "deriv_related" not in fv


class TestPrepositions:
    def test_nearest_left_preposition_and_none(self):
        specs = [("After", "IN", 0), ("the", "DT", 0), ("war", "NN", 0),
                 ("he", "PRP", 0), ("rebuilt", "VBD", 0), ("quickly", "RB", 0),
                 ("He", "PRP", 1), ("left", "VBD", 1)]
        doc = make_doc(specs, [ev("ei1", 4), ev("ei2", 7)])
        fv = extract_features(PAIR, doc)
        assert fv["prep1=after"] == 1.0
        assert fv["prep2=NONE"] == 1.0

    def test_preposition_beyond_five_tokens_is_missed(self):
        specs = [("In", "IN", 0), ("the", "DT", 0), ("dark", "JJ", 0),
                 ("cold", "JJ", 0), ("winter", "NN", 0), ("night", "NN", 0),
                 ("stumbled", "VBD", 0), ("the", "DT", 0), ("watchman", "NN", 0),
                 ("dozing", "VBG", 0)]
        doc = make_doc(specs, [ev("ei1", 6), ev("ei2", 9)])
        fv = extract_features(PAIR, doc)
        assert fv["prep1=NONE"] == 1.0

    def test_closest_preposition_wins(self):
        specs = [("In", "IN", 0), ("fights", "NNS", 0), ("after", "IN", 0),
                 ("dark", "NN", 0), ("he", "PRP", 0), ("ran", "VBD", 0),
                 ("off", "RP", 0)]
        doc = make_doc(specs, [ev("ei1", 5), ev("ei2", 6)])
        fv = extract_features(PAIR, doc)
        assert fv["prep1=after"] == 1.0


class TestEventProperties:
    def test_property_features_per_slot(self):
        specs = [("He", "PRP", 0), ("was", "VBD", 0), ("running", "VBG", 0),
                 ("and", "CC", 0), ("fell", "VBD", 0)]
        first = ev("ei1", 2, aspect="PROGRESSIVE", modality="would",
                   polarity=Polarity.NEG)
        doc = make_doc(specs, [first, ev("ei2", 4)])
        fv = extract_features(PAIR, doc)
        assert fv["aspect1=PROGRESSIVE"] == 1.0
        assert fv["modality1=would"] == 1.0
        assert fv["polarity1=neg"] == 1.0
        assert fv["aspect2=NONE"] == 1.0
        assert fv["modality2=NONE"] == 1.0
        assert fv["polarity2=pos"] == 1.0


class TestGeneral:
    def test_all_values_are_one(self, wn):
        fv = extract_features(PAIR, two_sentence_doc(), wn)
        assert all(v == 1.0 for v in fv.values())

    def test_extraction_is_pure(self, wn):
        doc = two_sentence_doc()
        assert extract_features(PAIR, doc, wn) == extract_features(PAIR, doc, wn)

    def test_unknown_event_raises(self):
        with pytest.raises(KeyError):
            extract_features(EventPair("ei1", "ei9", "doc1"), two_sentence_doc())
