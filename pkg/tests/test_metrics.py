import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bimine.errors import DataError
from bimine.metrics import (
    NIST_BETA,
    bleu,
    bleu_report,
    extract_ngrams,
    ngram_profile,
    nist,
    nist_report,
    sample_test_set,
)


class TestNgrams:
    def test_bigrams_with_repeats(self):
        got = extract_ngrams(["a", "b", "a", "b"], 2)
        assert got == Counter({("a", "b"): 2, ("b", "a"): 1})

    def test_order_longer_than_sentence(self):
        assert extract_ngrams(["a", "b"], 3) == Counter()

    def test_profile_totals(self):
        prof = ngram_profile([["a", "b"], ["b"]], max_n=2)
        assert prof.total_words == 3
        assert prof.counts[1] == Counter({("a",): 1, ("b",): 2})
        assert prof.counts[2] == Counter({("a", "b"): 1})


class TestBleu:
    def test_identity_is_exactly_one(self):
        corpus = ["the cat sat on the mat", "a dog ran", "hello there friend"]
        assert bleu(corpus, corpus) == 1.0

    def test_short_hypothesis_brevity_fixture(self):
        # all active precisions are 1 (the hypothesis is a prefix of the
        # reference), 4-grams are absent from the 3-token hypothesis and
        # drop out of the mean, so the score is the brevity penalty alone:
        # exp(1 - 6/3) = exp(-1)
        got = bleu(["the cat sat"], ["the cat sat on the mat"])
        assert got == pytest.approx(math.exp(-1.0), abs=1e-9)

    def test_clipping_fixture(self):
        # "the" appears once in the reference, so 4 hypothesis copies clip
        # to numerator 1: p1 = 1/4, and the long hypothesis has no brevity
        # penalty
        assert bleu(["the the the the"], ["the cat"], max_n=1) == pytest.approx(
            0.25, abs=1e-12
        )

    def test_zero_numerator_smoothing(self):
        # no overlap anywhere: p1 = 1/(2*2), p2 = 1/(2*1), equal lengths,
        # score = sqrt(1/8)
        got = bleu(["xx yy"], ["aa bb"], max_n=2)
        assert got == pytest.approx(math.sqrt(0.125), abs=1e-12)

    def test_report_details(self):
        report = bleu_report(["the cat sat"], ["the cat sat on the mat"])
        assert report["metric"] == "bleu"
        d = report["details"]
        assert d["precisions"][:3] == [1.0, 1.0, 1.0]
        assert d["precisions"][3] is None
        assert d["brevity"] == pytest.approx(math.exp(-1.0), abs=1e-12)
        assert (d["hyp_len"], d["ref_len"]) == (3, 6)

    def test_empty_hypothesis_scores_zero(self):
        assert bleu([""], ["the cat"]) == 0.0

    def test_errors_decrease_score(self):
        ref = ["the quick brown fox jumps over the lazy dog"] * 3
        one_err = list(ref)
        one_err[0] = "the quick brown fox jumps over the lazy cat"
        two_err = list(one_err)
        two_err[1] = "a quick brown fox jumps over the lazy cat"
        s0, s1, s2 = bleu(ref, ref), bleu(one_err, ref), bleu(two_err, ref)
        assert s0 > s1 > s2

    def test_corpus_level_not_average(self):
        # pooled counts differ from averaging per-sentence scores
        report = bleu_report(["a b", "c d"], ["a b", "x y"], max_n=1)
        assert report["details"]["precisions"][0] == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(DataError, match="2 vs 1"):
            bleu(["a", "b"], ["a"])

    def test_empty_corpus(self):
        with pytest.raises(DataError, match="empty corpus"):
            bleu([], [])

    def test_bad_max_n(self):
        with pytest.raises(ValueError):
            bleu(["a"], ["a"], max_n=0)

    def test_token_lists_accepted(self):
        assert bleu([["a", "b"]], [["a", "b"]]) == 1.0

    @given(
        st.lists(
            st.lists(st.sampled_from("abcdef"), min_size=1, max_size=8),
            min_size=1,
            max_size=4,
        )
    )
    @settings(max_examples=150)
    def test_score_in_unit_interval(self, corpus):
        assert 0.0 <= bleu(corpus, corpus) <= 1.0
        junk = [["zz"] * len(s) for s in corpus]
        assert 0.0 <= bleu(junk, corpus) <= 1.0


class TestNist:
    def test_beta_calibration(self):
        # the brevity factor is exactly 0.5 at a 2/3 length ratio
        assert math.exp(NIST_BETA * math.log(2.0 / 3.0) ** 2) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_single_sentence_identity_value(self):
        # ref profile for "a b c": each word occurs once among 3 words, so
        # each unigram carries log2(3) bits; all higher orders are fully
        # predicted by their prefix (count ratio 1) and carry 0. The score
        # is the mean unigram information log2(3).
        got = nist(["a b c"], ["a b c"])
        assert got == pytest.approx(math.log2(3.0), abs=1e-12)

    def test_three_sentence_hand_computed_fixture(self):
        refs = ["the cat sat", "the cat ran", "a dog ran"]
        hyps = ["the cat sat", "the dog ran", "a dog ran"]
        # pooled reference counts: 9 words; the:2 cat:2 sat:1 ran:2 a:1
        # dog:1. Unigram info: log2(9/2) for the/cat/ran, log2(9) for
        # sat/a/dog. Matched unigrams: s1 all three; s2 "the" and "ran"
        # ("dog" is absent from its own reference); s3 all three. That is
        # five log2(9/2) terms plus three log2(9) terms over 9 hypothesis
        # unigrams. Bigram info: only (cat,sat) and (cat,ran) carry 1 bit
        # (prefix "cat" count 2 over bigram count 1); matched bigrams are
        # s1 (the,cat)+(cat,sat) and s3 (a,dog)+(dog,ran), total info 1
        # over 6 hypothesis bigrams. Equal lengths, brevity 1.
        want = (5 * math.log2(4.5) + 3 * math.log2(9.0)) / 9.0 + 1.0 / 6.0
        assert nist(hyps, refs, max_n=2) == pytest.approx(want, abs=1e-12)

    def test_disjoint_scores_zero(self):
        assert nist(["xx yy"], ["aa bb"]) == 0.0

    def test_report_details(self):
        report = nist_report(["a b c"], ["a b c"], max_n=3)
        assert report["metric"] == "nist"
        d = report["details"]
        assert d["hyp_ngrams"] == [3, 2, 1]
        assert d["brevity"] == 1.0
        assert (d["hyp_len"], d["ref_len"]) == (3, 3)

    def test_empty_hypothesis_scores_zero(self):
        assert nist([""], ["a b"]) == 0.0

    def test_short_hypothesis_penalized(self):
        full = nist(["a b c d e f"], ["a b c d e f"])
        cut = nist(["a b c d"], ["a b c d e f"])
        assert cut < full

    @given(
        corpus=st.lists(
            st.lists(st.sampled_from("abcdef"), min_size=2, max_size=8),
            min_size=1,
            max_size=4,
        ),
        data=st.data(),
    )
    @settings(max_examples=150)
    def test_identity_maximal_among_same_length_hypotheses(self, corpus, data):
        # same-length corruption: junk replacements lose matched info while
        # the brevity factor stays fixed, so the identity can never lose
        corrupted = []
        for sent in corpus:
            k = data.draw(st.integers(0, len(sent)))
            corrupted.append(["zzz"] * k + sent[k:])
        assert (
            nist(corpus, corpus) + 1e-9
            >= nist(corrupted, corpus)
        )

    def test_length_mismatch(self):
        with pytest.raises(DataError, match="mismatch"):
            nist(["a"], ["a", "b"])


class TestSampler:
    def _corpus(self, n):
        return [(f"s{i}", f"t{i}") for i in range(n)]

    def test_exact_partition_4000(self):
        corpus = self._corpus(4000)
        split = sample_test_set(corpus, segments=200, per_segment=10, seed=42)
        assert len(split.test) == 2000
        assert len(split.remainder) == 2000
        assert sorted(split.test + split.remainder) == sorted(corpus)
        assert split.seed == 42

    def test_per_segment_draw_counts(self):
        corpus = self._corpus(4000)
        split = sample_test_set(corpus, segments=200, per_segment=10, seed=1)
        test_ids = [int(s[1:]) for s, _ in split.test]
        for seg in range(200):
            lo, hi = seg * 20, (seg + 1) * 20
            assert sum(lo <= i < hi for i in test_ids) == 10

    def test_order_preserved(self):
        corpus = self._corpus(400)
        split = sample_test_set(corpus, segments=20, per_segment=5, seed=3)
        test_ids = [int(s[1:]) for s, _ in split.test]
        rem_ids = [int(s[1:]) for s, _ in split.remainder]
        assert test_ids == sorted(test_ids)
        assert rem_ids == sorted(rem_ids)

    def test_uneven_segments_spread_remainder(self):
        # 43 items over 4 segments: sizes 11, 11, 11, 10
        corpus = self._corpus(43)
        split = sample_test_set(corpus, segments=4, per_segment=10, seed=7)
        test_ids = [int(s[1:]) for s, _ in split.test]
        bounds = [(0, 11), (11, 22), (22, 33), (33, 43)]
        for lo, hi in bounds:
            assert sum(lo <= i < hi for i in test_ids) == 10

    def test_minimal_split(self):
        split = sample_test_set(self._corpus(3), segments=1, per_segment=1, seed=5)
        assert len(split.test) == 1
        assert len(split.remainder) == 2

    def test_deterministic(self):
        corpus = self._corpus(100)
        a = sample_test_set(corpus, segments=5, per_segment=2, seed=9)
        b = sample_test_set(corpus, segments=5, per_segment=2, seed=9)
        assert a == b

    def test_seed_changes_draw(self):
        corpus = self._corpus(100)
        a = sample_test_set(corpus, segments=5, per_segment=2, seed=9)
        b = sample_test_set(corpus, segments=5, per_segment=2, seed=10)
        assert a.test != b.test

    def test_too_small_names_minimum(self):
        with pytest.raises(DataError, match=r"need at least 6 \(3 segments x 2"):
            sample_test_set(self._corpus(5), segments=3, per_segment=2)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            sample_test_set(self._corpus(5), segments=0, per_segment=1)
        with pytest.raises(ValueError):
            sample_test_set(self._corpus(5), segments=1, per_segment=0)
