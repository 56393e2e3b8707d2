"""Document and seed-corpus loading, sentence segmentation, tokenization.

Input formats:

* Document pairs: JSONL, one object per line with keys
  ``id``, ``src_lang``, ``tgt_lang``, ``src``, ``tgt``. The ``src``/``tgt``
  values are either raw text (segmented here) or a list of pre-segmented
  sentence strings.
* Seed corpus: two UTF-8 plain-text files, one sentence per line,
  line-aligned.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import DataError

log = logging.getLogger(__name__)

# Tokens are maximal alphanumeric runs; anything else is a single-character
# token. Underscore counts as punctuation, not as a word character.
_TOKEN_RE = re.compile(r"[^\W_]+|\S", re.UNICODE)

_TERMINATORS = frozenset(".!?")

# A period after one of these words never ends a sentence (case-insensitive).
ABBREVIATIONS = frozenset(
    {"dr", "mr", "mrs", "ms", "prof", "st", "no", "vs", "etc"}
)


def normalize(text: str) -> str:
    """NFC, lowercase, and collapse all whitespace runs to single spaces."""
    return " ".join(unicodedata.normalize("NFC", text).lower().split())


def tokenize(text: str) -> list[str]:
    """Split text into alphanumeric runs and single punctuation marks.

    "3.14 apples" -> ["3", ".", "14", "apples"]. Case is preserved;
    lowercase at lookup time for normalized comparisons.
    """
    return _TOKEN_RE.findall(text)


@dataclass
class Sentence:
    raw: str
    tokens: list[str]
    normalized: str

    @classmethod
    def from_text(cls, raw: str) -> "Sentence":
        return cls(raw=raw, tokens=tokenize(raw), normalized=normalize(raw))


@dataclass
class Document:
    id: str
    lang: str
    sentences: list[Sentence]


@dataclass
class DocumentPair:
    id: str
    source: Document
    target: Document


@dataclass
class SeedCorpus:
    """Line-aligned parallel sentences used for classifier training."""

    pairs: list[tuple[Sentence, Sentence]]
    dropped: int = 0  # blank-on-either-side lines removed at load time


def _preceding_word(text: str, idx: int) -> str:
    k = idx - 1
    while k >= 0 and text[k].isalpha():
        k -= 1
    return text[k + 1 : idx]


def segment_sentences(text: str) -> list[Sentence]:
    """Split raw text into sentences.

    A sentence ends at ``.``, ``!`` or ``?`` followed by whitespace and an
    uppercase letter or digit, or at end of input. A period directly after
    an abbreviation from ABBREVIATIONS never splits. The raw text of each
    sentence is an exact substring of the input, so joining the results
    reproduces the input up to inter-sentence whitespace.
    """
    sentences: list[Sentence] = []
    n = len(text)
    i = 0
    while i < n and text[i].isspace():
        i += 1
    start = i
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            if ch == "." and _preceding_word(text, i).lower() in ABBREVIATIONS:
                i += 1
                continue
            j = i + 1
            if j < n and text[j].isspace():
                while j < n and text[j].isspace():
                    j += 1
                if j < n and (text[j].isupper() or text[j].isdigit()):
                    sentences.append(Sentence.from_text(text[start : i + 1]))
                    start = j
                    i = j
                    continue
        i += 1
    tail = text[start:].rstrip()
    if tail:
        sentences.append(Sentence.from_text(tail))
    return sentences


def _sentences_from_field(value: object, path: str, lineno: int, name: str) -> list[Sentence]:
    if isinstance(value, str):
        return segment_sentences(value)
    if isinstance(value, list) and all(isinstance(s, str) for s in value):
        return [Sentence.from_text(s) for s in value if s.strip()]
    raise DataError(
        f"{path}: line {lineno}: field '{name}' must be a string or a list of strings"
    )


def parse_document_pair(obj: dict, path: str, lineno: int) -> DocumentPair:
    """Build a DocumentPair from one decoded JSONL object."""
    for name in ("id", "src_lang", "tgt_lang", "src", "tgt"):
        if name not in obj:
            raise DataError(f"{path}: line {lineno}: missing field '{name}'")
    if obj["src_lang"] == obj["tgt_lang"]:
        raise DataError(
            f"{path}: line {lineno}: src_lang and tgt_lang must differ "
            f"(both {obj['src_lang']!r})"
        )
    pair_id = str(obj["id"])
    source = Document(
        id=pair_id,
        lang=str(obj["src_lang"]),
        sentences=_sentences_from_field(obj["src"], path, lineno, "src"),
    )
    target = Document(
        id=pair_id,
        lang=str(obj["tgt_lang"]),
        sentences=_sentences_from_field(obj["tgt"], path, lineno, "tgt"),
    )
    return DocumentPair(id=pair_id, source=source, target=target)


def load_document_pairs(
    path: str,
    fmt: str = "jsonl",
    on_skip: Callable[[str, str], None] | None = None,
) -> Iterator[DocumentPair]:
    """Stream document pairs from a JSONL file, in file order.

    Pairs with an empty side are skipped with a warning; ``on_skip`` (when
    given) is called with (pair id, reason) so callers can count them.
    Malformed lines raise DataError naming the line.
    """
    if fmt != "jsonl":
        raise ValueError(f"unsupported document-pair format: {fmt!r}")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise DataError(f"{path}: line {lineno}: expected a JSON object")
            pair = parse_document_pair(obj, path, lineno)
            if not pair.source.sentences or not pair.target.sentences:
                side = "src" if not pair.source.sentences else "tgt"
                log.warning("skipping pair %r: empty %s document", pair.id, side)
                if on_skip is not None:
                    on_skip(pair.id, f"empty {side} document")
                continue
            yield pair


def load_seed_corpus(src_path: str, tgt_path: str) -> SeedCorpus:
    """Load a line-aligned parallel corpus.

    Line i of src pairs with line i of tgt. Lines blank on either side are
    dropped and counted in ``SeedCorpus.dropped``. A line-count mismatch is
    an error.
    """
    with open(src_path, encoding="utf-8") as fh:
        src_lines = fh.read().splitlines()
    with open(tgt_path, encoding="utf-8") as fh:
        tgt_lines = fh.read().splitlines()
    if len(src_lines) != len(tgt_lines):
        raise DataError(
            f"seed corpus line count mismatch: {len(src_lines)} vs {len(tgt_lines)}"
        )
    pairs = []
    dropped = 0
    for s, t in zip(src_lines, tgt_lines):
        if not s.strip() or not t.strip():
            dropped += 1
            continue
        pairs.append((Sentence.from_text(s.strip()), Sentence.from_text(t.strip())))
    if dropped:
        log.info("seed corpus: dropped %d blank-sided lines", dropped)
    return SeedCorpus(pairs=pairs, dropped=dropped)
