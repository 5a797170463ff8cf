"""Reader for WordNet 3.x dictionary files, verb-centric.

Parses index.verb and data.verb directly (plus data.noun / data.adj /
data.adv when present, which the derivational "+" pointers usually
target), and verb.exc for irregular forms.  Two verb lemmas count as
derivationally linked when a "+" pointer joins them directly or when
they share a derivational target (e.g. two verbs pointing at the same
nominalization).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

__all__ = [
    "WordNetIndex",
    "MissingFileError",
    "WordNetParseError",
    "load_wordnet",
]


class MissingFileError(FileNotFoundError):
    pass


class WordNetParseError(ValueError):
    pass


# suffix detachment rules for verbs, tried in order
_DETACH = (
    ("s", ""),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ing", "e"),
    ("ing", ""),
)


@dataclass
class WordNetIndex:
    synsets_of: dict[str, tuple[str, ...]]  # verb lemma -> synset offsets
    synset_words: dict[str, tuple[str, ...]]  # verb offset -> member lemmas
    derivational: dict[str, set[str]]  # lemma -> directly linked lemmas
    exceptions: dict[str, str] = field(default_factory=dict)  # irregular -> base

    def synsets(self, lemma: str) -> tuple[str, ...]:
        return self.synsets_of.get(lemma.lower(), ())

    def share_synset(self, lemma1: str, lemma2: str) -> bool:
        own = set(self.synsets(lemma1))
        return bool(own) and any(s in own for s in self.synsets(lemma2))

    def derivationally_linked(self, lemma1: str, lemma2: str) -> bool:
        a, b = lemma1.lower(), lemma2.lower()
        links_a = self.derivational.get(a, set())
        links_b = self.derivational.get(b, set())
        if b in links_a or a in links_b:
            return True
        return bool(links_a & links_b)

    def lemmatize(self, form: str) -> Optional[str]:
        """Base verb lemma of an inflected form, or None if not a known verb."""
        low = form.lower()
        if low in self.exceptions:
            return self.exceptions[low]
        if low in self.synsets_of:
            return low
        for suffix, replacement in _DETACH:
            if low.endswith(suffix):
                candidate = low[: len(low) - len(suffix)] + replacement
                if candidate in self.synsets_of:
                    return candidate
        return None


def _data_lines(path: Path):
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line or line.startswith("  "):  # license header
            continue
        yield lineno, line


def _strip_marker(word: str) -> str:
    # adjective entries carry syntactic markers like "(p)"
    return word.split("(", 1)[0].lower()


def _parse_data_file(path: Path):
    """Synset words and '+' pointers of one data.pos file."""
    words_of: dict[str, tuple[str, ...]] = {}
    pointers: list[tuple[str, int, str, str, int]] = []
    # (source offset, source word#, target pos, target offset, target word#)
    for lineno, line in _data_lines(path):
        body = line.split("|", 1)[0].split()
        try:
            offset = body[0]
            w_cnt = int(body[3], 16)
            words = tuple(_strip_marker(body[4 + 2 * i]) for i in range(w_cnt))
            cursor = 4 + 2 * w_cnt
            p_cnt = int(body[cursor])
            cursor += 1
            for _ in range(p_cnt):
                symbol, tgt_offset, tgt_pos, src_tgt = body[cursor : cursor + 4]
                cursor += 4
                if symbol == "+":
                    src_num = int(src_tgt[:2], 16)
                    tgt_num = int(src_tgt[2:], 16)
                    pointers.append((offset, src_num, tgt_pos, tgt_offset, tgt_num))
        except (IndexError, ValueError) as err:
            raise WordNetParseError(f"{path.name} line {lineno}: {err}") from None
        words_of[offset] = words
    return words_of, pointers


def load_wordnet(dictionary_dir) -> WordNetIndex:
    """Build the verb index from a dictionary directory.

    index.verb and data.verb are required; data.noun, data.adj and
    data.adv are read when present so derivational pointers into them
    resolve; verb.exc is optional.
    """
    root = Path(dictionary_dir)
    index_path = root / "index.verb"
    data_path = root / "data.verb"
    for required in (index_path, data_path):
        if not required.exists():
            raise MissingFileError(str(required))

    synsets_of: dict[str, tuple[str, ...]] = {}
    for lineno, line in _data_lines(index_path):
        fields = line.split()
        try:
            lemma = fields[0].lower()
            synset_cnt = int(fields[2])
            offsets = tuple(fields[-synset_cnt:])
        except (IndexError, ValueError) as err:
            raise WordNetParseError(f"index.verb line {lineno}: {err}") from None
        synsets_of[lemma] = offsets

    words_by_pos: dict[str, dict[str, tuple[str, ...]]] = {}
    all_pointers = []
    verb_words, verb_pointers = _parse_data_file(data_path)
    words_by_pos["v"] = verb_words
    all_pointers.extend(verb_pointers)
    for pos, name in (("n", "data.noun"), ("a", "data.adj"), ("r", "data.adv")):
        path = root / name
        if path.exists():
            words, pointers = _parse_data_file(path)
            words_by_pos[pos] = words
            all_pointers.extend(pointers)
    words_by_pos["s"] = words_by_pos.get("a", {})  # satellite adjectives

    derivational: dict[str, set[str]] = {}
    for src_offset, src_num, tgt_pos, tgt_offset, tgt_num in verb_pointers:
        source_words = verb_words.get(src_offset, ())
        target_words = words_by_pos.get(tgt_pos, {}).get(tgt_offset, ())
        if src_num < 1 or src_num > len(source_words):
            continue
        if tgt_num < 1 or tgt_num > len(target_words):
            continue
        a = source_words[src_num - 1]
        b = target_words[tgt_num - 1]
        derivational.setdefault(a, set()).add(b)
        derivational.setdefault(b, set()).add(a)

    exceptions: dict[str, str] = {}
    exc_path = root / "verb.exc"
    if exc_path.exists():
        for lineno, line in _data_lines(exc_path):
            fields = line.split()
            if len(fields) < 2:
                raise WordNetParseError(f"verb.exc line {lineno}: need form and base")
            exceptions[fields[0].lower()] = fields[1].lower()

    return WordNetIndex(
        synsets_of=synsets_of,
        synset_words={k: v for k, v in verb_words.items()},
        derivational=derivational,
        exceptions=exceptions,
    )
