"""Corpus-level BLEU and NIST scoring plus the segment test-set sampler.

Both scorers are single-reference and corpus-level. Inputs are lists of
token lists; plain strings are whitespace-split, nothing more. Scores are
on a [0,1] scale for BLEU and unbounded >= 0 for NIST.

BLEU here is the geometric mean of clipped modified n-gram precisions
times the brevity penalty exp(min(0, 1 - r/c)), with two documented
conventions: an order whose precision numerator is zero is smoothed to
1/(2 * denominator), and an order with no hypothesis n-grams at all
(every sentence shorter than n) is dropped from the mean with the
remaining orders re-weighted. NIST is the information-weighted n-gram
co-occurrence sum with its standard brevity factor, calibrated so the
factor is 0.5 when the hypothesis is 2/3 of the reference length.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass

from .errors import DataError

# NIST brevity exponent: exp(BETA * ln(ratio)^2) equals 0.5 at ratio 2/3.
NIST_BETA = math.log(0.5) / math.log(2.0 / 3.0) ** 2


@dataclass
class NGramProfile:
    """Counts of n-grams per order, pooled over a sentence list."""

    max_n: int
    counts: dict[int, Counter]
    total_words: int


@dataclass
class TestSplit:
    test: list[tuple[str, str]]
    remainder: list[tuple[str, str]]
    seed: int


def extract_ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(
        tuple(tokens[k : k + n]) for k in range(len(tokens) - n + 1)
    )


def ngram_profile(sentences: list[list[str]], max_n: int) -> NGramProfile:
    counts: dict[int, Counter] = {n: Counter() for n in range(1, max_n + 1)}
    total = 0
    for tokens in sentences:
        total += len(tokens)
        for n in range(1, max_n + 1):
            counts[n].update(extract_ngrams(tokens, n))
    return NGramProfile(max_n=max_n, counts=counts, total_words=total)


def _to_token_lists(seqs: list) -> list[list[str]]:
    return [s.split() if isinstance(s, str) else list(s) for s in seqs]


def _check_corpus(hypotheses: list, references: list) -> tuple[list, list]:
    hyps = _to_token_lists(hypotheses)
    refs = _to_token_lists(references)
    if len(hyps) != len(refs):
        raise DataError(
            f"hypothesis/reference length mismatch: {len(hyps)} vs {len(refs)}"
        )
    if not hyps:
        raise DataError("empty corpus: no hypothesis/reference pairs to score")
    return hyps, refs


def bleu_report(
    hypotheses: list, references: list, max_n: int = 4
) -> dict:
    """BLEU with its per-order precisions and brevity penalty."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    hyps, refs = _check_corpus(hypotheses, references)
    hyp_len = sum(len(h) for h in hyps)
    ref_len = sum(len(r) for r in refs)
    numer = [0] * (max_n + 1)
    denom = [0] * (max_n + 1)
    for h, r in zip(hyps, refs):
        for n in range(1, max_n + 1):
            hyp_grams = extract_ngrams(h, n)
            if not hyp_grams:
                continue
            ref_grams = extract_ngrams(r, n)
            denom[n] += sum(hyp_grams.values())
            numer[n] += sum(
                min(c, ref_grams[g]) for g, c in hyp_grams.items()
            )
    precisions: list[float | None] = []
    log_sum = 0.0
    active = 0
    for n in range(1, max_n + 1):
        if denom[n] == 0:
            precisions.append(None)  # no n-grams of this order exist
            continue
        p = numer[n] / denom[n] if numer[n] > 0 else 1.0 / (2.0 * denom[n])
        precisions.append(p)
        log_sum += math.log(p)
        active += 1
    if hyp_len == 0 or active == 0:
        score = 0.0
        brevity = 0.0
    else:
        brevity = math.exp(min(0.0, 1.0 - ref_len / hyp_len))
        score = brevity * math.exp(log_sum / active)
    return {
        "metric": "bleu",
        "score": score,
        "details": {
            "precisions": precisions,
            "brevity": brevity,
            "hyp_len": hyp_len,
            "ref_len": ref_len,
        },
    }


def bleu(hypotheses: list, references: list, max_n: int = 4) -> float:
    return bleu_report(hypotheses, references, max_n)["score"]


def nist_report(
    hypotheses: list, references: list, max_n: int = 5
) -> dict:
    """NIST with its per-order information sums and brevity factor.

    Information weights come from the pooled reference statistics:
    info(g) = log2(count(prefix of g) / count(g)), where the empty prefix
    counts every reference word. Co-occurrences are clipped per sentence
    against that sentence's own reference.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    hyps, refs = _check_corpus(hypotheses, references)
    profile = ngram_profile(refs, max_n)

    def info(gram: tuple[str, ...]) -> float:
        c = profile.counts[len(gram)][gram]
        if c == 0:
            return 0.0
        prefix_count = (
            profile.total_words
            if len(gram) == 1
            else profile.counts[len(gram) - 1][gram[:-1]]
        )
        if prefix_count == 0:
            return 0.0
        return math.log2(prefix_count / c)

    matched_info = [0.0] * (max_n + 1)
    denom = [0] * (max_n + 1)
    for h, r in zip(hyps, refs):
        for n in range(1, max_n + 1):
            hyp_grams = extract_ngrams(h, n)
            if not hyp_grams:
                continue
            ref_grams = extract_ngrams(r, n)
            denom[n] += sum(hyp_grams.values())
            for g, c in hyp_grams.items():
                matched = min(c, ref_grams[g])
                if matched:
                    matched_info[n] += matched * info(g)

    info_sum = sum(
        matched_info[n] / denom[n] for n in range(1, max_n + 1) if denom[n] > 0
    )
    hyp_len = sum(len(h) for h in hyps)
    ref_len = sum(len(r) for r in refs)
    if hyp_len == 0 or ref_len == 0:
        brevity = 0.0
    else:
        ratio = min(1.0, hyp_len / ref_len)
        brevity = math.exp(NIST_BETA * math.log(ratio) ** 2)
    score = info_sum * brevity
    return {
        "metric": "nist",
        "score": score,
        "details": {
            "info_sums": matched_info[1:],
            "hyp_ngrams": denom[1:],
            "brevity": brevity,
            "hyp_len": hyp_len,
            "ref_len": ref_len,
        },
    }


def nist(hypotheses: list, references: list, max_n: int = 5) -> float:
    return nist_report(hypotheses, references, max_n)["score"]


def sample_test_set(
    corpus: list[tuple[str, str]],
    segments: int = 200,
    per_segment: int = 10,
    seed: int = 42,
) -> TestSplit:
    """Draw a test set by sampling pairs from contiguous corpus segments.

    The corpus is cut into ``segments`` contiguous chunks whose sizes
    differ by at most one; ``per_segment`` pairs are drawn uniformly
    without replacement from each. Test and remainder both keep corpus
    order and partition the input exactly.
    """
    if segments < 1 or per_segment < 1:
        raise ValueError("segments and per_segment must be >= 1")
    need = segments * per_segment
    size = len(corpus)
    if size < need:
        raise DataError(
            f"corpus has {size} pairs; need at least {need} "
            f"({segments} segments x {per_segment} per segment)"
        )
    rng = random.Random(seed)
    base = size // segments
    extra = size % segments
    chosen: list[int] = []
    start = 0
    for s in range(segments):
        seg_len = base + (1 if s < extra else 0)
        picks = rng.sample(range(start, start + seg_len), per_segment)
        chosen.extend(sorted(picks))
        start += seg_len
    chosen_set = set(chosen)
    test = [corpus[i] for i in chosen]
    remainder = [corpus[i] for i in range(size) if i not in chosen_set]
    return TestSplit(test=test, remainder=remainder, seed=seed)
