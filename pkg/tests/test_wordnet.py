"""Dictionary-file reader: synsets, derivational links, lemmatization."""

from pathlib import Path

import pytest

from temprel.wordnet import MissingFileError, WordNetParseError, load_wordnet

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "wordnet"


@pytest.fixture(scope="module")
def wn():
    return load_wordnet(FIXTURE_DIR)


class TestLoading:
    def test_missing_directory_rejected(self, tmp_path):
        with pytest.raises(MissingFileError):
            load_wordnet(tmp_path)

    def test_missing_data_file_rejected(self, tmp_path):
        (tmp_path / "index.verb").write_text("hit v 1 1 @ 1 1 00100001\n")
        with pytest.raises(MissingFileError, match="data.verb"):
            load_wordnet(tmp_path)

    def test_parse_error_carries_file_and_line(self, tmp_path):
        (tmp_path / "index.verb").write_text("hit v 1 1 @ 1 1 00100001\n")
        (tmp_path / "data.verb").write_text("00100001 35 v zz hit 0 000 | broken\n")
        with pytest.raises(WordNetParseError, match="data.verb line 1"):
            load_wordnet(tmp_path)

    def test_header_lines_skipped(self, wn):
        assert "1" not in wn.synsets_of


class TestSynsets:
    def test_lemma_with_two_synsets(self, wn):
        assert wn.synsets("run") == ("00200001", "00200002")

    def test_absent_lemma_is_empty(self, wn):
        assert wn.synsets("fly") == ()

    def test_shared_synset_membership(self, wn):
        assert wn.share_synset("hit", "strike")
        assert wn.share_synset("run", "sprint")
        assert not wn.share_synset("hit", "run")
        assert not wn.share_synset("fly", "fly")  # absent lemma never matches

    def test_case_insensitive(self, wn):
        assert wn.share_synset("Hit", "STRIKE")

    def test_synset_words_parsed_with_counts(self, wn):
        assert wn.synset_words["00100001"] == ("hit", "strike")
        assert wn.synset_words["00300001"] == ("destroy",)


class TestDerivational:
    def test_direct_link_across_pos(self, wn):
        assert wn.derivationally_linked("destroy", "destruction")
        assert wn.derivationally_linked("destruction", "destroy")
        assert wn.derivationally_linked("run", "running")

    def test_verbs_sharing_a_nominalization_are_linked(self, wn):
        assert wn.derivationally_linked("destroy", "destruct")

    def test_unrelated_lemmas(self, wn):
        assert not wn.derivationally_linked("hit", "destroy")
        assert not wn.derivationally_linked("confirm", "kill")

    def test_links_are_symmetric(self, wn):
        for a, linked in wn.derivational.items():
            for b in linked:
                assert a in wn.derivational[b]


class TestLemmatize:
    def test_irregular_forms_use_exceptions(self, wn):
        assert wn.lemmatize("ran") == "run"
        assert wn.lemmatize("hitting") == "hit"
        assert wn.lemmatize("struck") == "strike"

    def test_regular_suffix_detachment(self, wn):
        assert wn.lemmatize("searched") == "search"
        assert wn.lemmatize("runs") == "run"
        assert wn.lemmatize("vowed") == "vow"
        assert wn.lemmatize("killed") == "kill"

    def test_exact_match_passes_through(self, wn):
        assert wn.lemmatize("hit") == "hit"
        assert wn.lemmatize("Destroy") == "destroy"

    def test_unknown_word_is_none(self, wn):
        assert wn.lemmatize("Friday") is None
        assert wn.lemmatize("quickly") is None
