"""Bilingual word-translation table with probabilities.

File format: TSV with columns ``src<TAB>tgt<TAB>prob``, UTF-8, lines
starting with ``#`` ignored. Probabilities must lie in (0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus import normalize
from .errors import DataError


@dataclass
class Lexicon:
    """Translation table keyed by normalized source word.

    Per source word, candidate translations are sorted by descending
    probability (ties alphabetical, for stable output).
    """

    direction: tuple[str, str]
    entries: dict[str, list[tuple[str, float]]]
    _rev: "Lexicon | None" = field(default=None, repr=False, compare=False)

    def translations(self, word: str) -> list[tuple[str, float]]:
        return self.entries.get(normalize(word), [])

    def reversed(self) -> "Lexicon":
        """The same table with source and target sides swapped."""
        if self._rev is None:
            inverted: dict[str, dict[str, float]] = {}
            for src, cands in self.entries.items():
                for tgt, prob in cands:
                    best = inverted.setdefault(tgt, {})
                    if prob > best.get(src, 0.0):
                        best[src] = prob
            rev = Lexicon(
                direction=(self.direction[1], self.direction[0]),
                entries=_sorted_entries(inverted),
            )
            rev._rev = self
            self._rev = rev
        return self._rev


def _sorted_entries(table: dict[str, dict[str, float]]) -> dict[str, list[tuple[str, float]]]:
    return {
        src: sorted(cands.items(), key=lambda kv: (-kv[1], kv[0]))
        for src, cands in sorted(table.items())
    }


def load_lexicon(path: str, src_lang: str = "src", tgt_lang: str = "tgt") -> Lexicon:
    """Load a TSV translation table.

    Duplicate (src, tgt) rows keep the maximum probability. Rows with fewer
    than three columns or a probability outside (0, 1] raise DataError
    naming the line.
    """
    table: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith("#") or not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) < 3:
                raise DataError(f"{path}: line {lineno}: expected 3 tab-separated columns")
            src, tgt = normalize(cols[0]), normalize(cols[1])
            try:
                prob = float(cols[2])
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: bad probability {cols[2]!r}") from exc
            if not (0.0 < prob <= 1.0) or math.isnan(prob):
                raise DataError(
                    f"{path}: line {lineno}: probability {prob} outside (0, 1]"
                )
            if not src or not tgt:
                raise DataError(f"{path}: line {lineno}: empty word")
            cands = table.setdefault(src, {})
            if prob > cands.get(tgt, 0.0):
                cands[tgt] = prob
    return Lexicon(direction=(src_lang, tgt_lang), entries=_sorted_entries(table))


def coverage(lex: Lexicon, src_tokens: list[str], tgt_tokens: list[str]) -> float:
    """Fraction of alphabetic source tokens with a known translation present
    in the target token set (both sides compared in normalized form).

    Punctuation and digit tokens do not count toward the denominator.
    Returns 0.0 when there are no alphabetic source tokens.
    """
    alpha = [normalize(t) for t in src_tokens if t.isalpha()]
    if not alpha:
        return 0.0
    tgt_set = {normalize(t) for t in tgt_tokens}
    hits = 0
    for tok in alpha:
        for cand, _prob in lex.entries.get(tok, ()):
            if cand in tgt_set:
                hits += 1
                break
    return hits / len(alpha)
